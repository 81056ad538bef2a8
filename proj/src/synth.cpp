#include "wearfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wearfuse/error.hpp"
#include "wearfuse/rng.hpp"

namespace wearfuse {

namespace {

constexpr std::array<ToneTable, 5> kTones{{
    {Modality::ECG, {2.0, 8.0, 15.0}, 0.3},
    {Modality::EDA, {1.0, 6.0, 6.0}, 0.25},
    {Modality::EMG, {12.0, 20.0, 4.0}, 0.4},
    {Modality::BVP, {3.0, 3.0, 10.0}, 0.3},
    {Modality::ACC, {5.0, 11.0, 5.0}, 0.35},
}};

constexpr double kAccTone = 0.3;  // dynamic acceleration relative to gravity

std::vector<double> tone_track(const std::vector<AffectClass>& order, std::size_t block, const ToneTable& table,
                               double fs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> detune(-0.3, 0.3);
  std::uniform_real_distribution<double> gain(0.8, 1.2);
  std::vector<double> out(order.size() * block);
  for (std::size_t b = 0; b < order.size(); ++b) {
    double f = table.hz[static_cast<std::size_t>(order[b])] + detune(rng);
    double a = gain(rng);
    double phi = phase(rng);
    for (std::size_t n = 0; n < block; ++n) {
      out[b * block + n] = a * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(n) / fs + phi);
    }
  }
  return out;
}

}  // namespace

std::span<const ToneTable> synthetic_tone_table() { return kTones; }

const ToneTable& tone_table_for(Modality sensor) {
  for (const auto& t : kTones) {
    if (t.sensor == sensor) return t;
  }
  fail(ErrorCode::MissingModality, "no synthetic tone table for " + std::string(to_string(sensor)));
}

std::vector<double> pink_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> white(0.0, 1.0);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  std::vector<double> out(n);
  for (auto& v : out) {
    double w = white(rng);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  if (n > 1) {
    double mean = 0.0;
    for (double v : out) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : out) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / static_cast<double>(n));
    if (sd > 0.0) {
      for (auto& v : out) v = (v - mean) / sd;
    }
  }
  return out;
}

std::string synthetic_subject_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "S%02zu", index + 1);
  return buf;
}

SubjectData synthesize_subject(const PipelineConfig& config, std::size_t index) {
  const auto& sc = config.synth;
  SubjectData data;
  data.subject_id = synthetic_subject_id(index);
  const std::string base = "synth/" + data.subject_id;

  std::vector<AffectClass> order{AffectClass::Baseline, AffectClass::Stress, AffectClass::Amusement};
  std::mt19937_64 order_rng(derive_seed(config.seed, base + "/order"));
  std::shuffle(order.begin(), order.end(), order_rng);

  auto label_block = static_cast<std::size_t>(std::llround(sc.block_seconds * kLabelRateHz));
  auto block = static_cast<std::size_t>(std::llround(sc.block_seconds * sc.fs));
  if (block < 2 || label_block < 1) fail(ErrorCode::Validation, "synthetic block too short");

  data.labels.subject_id = data.subject_id;
  for (auto c : order) data.labels.labels.insert(data.labels.labels.end(), label_block, code_of(c));

  for (Modality m : config.sensors) {
    const auto& table = tone_table_for(m);
    const std::string stream = base + "/" + std::string(to_string(m));
    std::mt19937_64 rng(derive_seed(config.seed, stream + "/tone"));
    auto tone = tone_track(order, block, table, sc.fs, rng);
    const std::size_t n = tone.size();
    if (m != Modality::ACC) {
      auto noise = pink_noise(n, derive_seed(config.seed, stream + "/noise"));
      SignalRecord r{data.subject_id, m, sc.fs, std::vector<double>(n)};
      for (std::size_t i = 0; i < n; ++i) r.samples[i] = tone[i] + table.noise * noise[i];
      data.signals[m] = std::move(r);
      continue;
    }
    // Gravity on z, a shared dynamic tone along a fixed tilted direction, independent pink noise per axis.
    const std::array<Modality, 3> axes{Modality::ACC_X, Modality::ACC_Y, Modality::ACC_Z};
    const std::array<double, 3> gravity{0.0, 0.0, 1.0};
    const std::array<double, 3> dir{0.3, 0.3, 0.9055385138137417};
    for (std::size_t a = 0; a < 3; ++a) {
      auto noise = pink_noise(n, derive_seed(config.seed, stream + "/noise/" + std::string(to_string(axes[a]))));
      SignalRecord r{data.subject_id, axes[a], sc.fs, std::vector<double>(n)};
      for (std::size_t i = 0; i < n; ++i) {
        r.samples[i] = gravity[a] + kAccTone * (dir[a] * tone[i] + table.noise * noise[i]);
      }
      data.signals[axes[a]] = std::move(r);
    }
  }
  return data;
}

std::vector<std::string> generate_synthetic(const PipelineConfig& config, const std::filesystem::path& dir) {
  config.validate();
  std::vector<std::string> ids;
  for (std::size_t s = 0; s < config.synth.subjects; ++s) {
    auto data = synthesize_subject(config, s);
    write_subject(dir / data.subject_id, data);
    ids.push_back(data.subject_id);
  }
  return ids;
}

}  // namespace wearfuse
