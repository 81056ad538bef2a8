#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "tempdir.hpp"
#include "wearfuse/error.hpp"
#include "wearfuse/fbse.hpp"
#include "wearfuse/rng.hpp"
#include "wearfuse/synth.hpp"

using namespace wearfuse;

namespace {

PipelineConfig small_config(std::size_t subjects) {
  PipelineConfig c;
  c.synth.subjects = subjects;
  c.synth.block_seconds = 40.0;
  return c;
}

}  // namespace

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(42, "a") == derive_seed(42, "a"));
  CHECK(derive_seed(42, "a") != derive_seed(42, "b"));
  CHECK(derive_seed(42, "a") != derive_seed(43, "a"));
  CHECK(derive_seed(0, "") != 0);
}

TEST_CASE("pink noise: unit scale and falling spectrum") {
  auto x = pink_noise(1 << 14, 5);
  double mean = 0.0, var = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double v : x) var += (v - mean) * (v - mean);
  CHECK(std::abs(mean) < 1e-12);
  CHECK(var / static_cast<double>(x.size()) == doctest::Approx(1.0).epsilon(1e-9));
  // Lag-1 correlation of pink noise is strongly positive; white noise sits near 0.
  double c1 = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) c1 += x[i] * x[i - 1];
  CHECK(c1 / var > 0.5);
  CHECK(pink_noise(100, 5) == pink_noise(100, 5));
  CHECK(pink_noise(100, 5) != pink_noise(100, 6));
}

TEST_CASE("byte-identical regeneration") {
  TempDir a("synth"), b("synth");
  auto config = small_config(3);
  auto ids = generate_synthetic(config, a.path());
  generate_synthetic(config, b.path());
  CHECK(ids == std::vector<std::string>{"S01", "S02", "S03"});
  std::size_t files = 0;
  for (const auto& id : ids) {
    for (const auto& entry : std::filesystem::directory_iterator(a / id)) {
      auto name = entry.path().filename().string();
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / id / name), id << "/" << name);
      ++files;
    }
  }
  CHECK(files == 3 * 9);  // 7 signal files + labels + meta per subject

  config.seed = 43;
  TempDir c("synth");
  generate_synthetic(config, c.path());
  CHECK(slurp(a / "S01" / "ECG.csv") != slurp(c / "S01" / "ECG.csv"));
}

TEST_CASE("labels: codes 1..3 in three contiguous blocks") {
  auto config = small_config(6);
  for (std::size_t s = 0; s < 6; ++s) {
    auto d = synthesize_subject(config, s);
    const auto& l = d.labels.labels;
    CHECK(l.size() == 3 * 40 * 700);
    CHECK(std::all_of(l.begin(), l.end(), [](int c) { return c >= 1 && c <= 3; }));
    std::vector<int> blocks;
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (i == 0 || l[i] != l[i - 1]) blocks.push_back(l[i]);
    }
    CHECK(blocks.size() == 3);
    auto sorted = blocks;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{1, 2, 3});
    for (const auto& [m, r] : d.signals) {
      CHECK(r.fs == 64.0);
      CHECK(r.samples.size() == 3 * 40 * 64);
      CHECK(r.subject_id == d.subject_id);
    }
    CHECK(d.signals.size() == 7);
  }
}

TEST_CASE("per-class band recoverable from the FBSE peak") {
  auto config = small_config(4);
  const std::size_t u = 1280;  // 20 s at 64 Hz, inside one block
  for (std::size_t s = 0; s < 4; ++s) {
    auto d = synthesize_subject(config, s);
    std::vector<SignalRecord> records;
    for (auto m : config.sensors) {
      if (m == Modality::ACC) {
        records.push_back(acceleration_magnitude(d.signals.at(Modality::ACC_X), d.signals.at(Modality::ACC_Y),
                                                 d.signals.at(Modality::ACC_Z)));
      } else {
        records.push_back(d.signals.at(m));
      }
    }
    const std::size_t block = 40 * 64;
    for (std::size_t b = 0; b < 3; ++b) {
      const auto cls = class_from_code(d.labels.labels[b * 40 * 700]).value();
      for (const auto& r : records) {
        std::vector<double> y(r.samples.begin() + static_cast<std::ptrdiff_t>(b * block + 640),
                              r.samples.begin() + static_cast<std::ptrdiff_t>(b * block + 640 + u));
        double mean = 0.0;
        for (double v : y) mean += v;
        mean /= static_cast<double>(u);
        for (double& v : y) v -= mean;
        auto spec = fbse_forward(y, r.fs);
        auto mags = spec.magnitudes();
        auto peak = static_cast<std::size_t>(std::max_element(mags.begin(), mags.end()) - mags.begin());
        const double found = order_to_freq(peak + 1, u, r.fs);
        const double expected = tone_table_for(r.modality).hz[static_cast<std::size_t>(cls)];
        // detune is at most 0.3 Hz; one order spans fs/(2U) = 0.025 Hz
        CHECK_MESSAGE(std::abs(found - expected) <= 0.35,
                      d.subject_id << " " << to_string(r.modality) << " class " << to_string(cls) << ": " << found);
      }
    }
  }
}

TEST_CASE("tone table covers the default sensors") {
  for (auto m : PipelineConfig{}.sensors) CHECK_NOTHROW(tone_table_for(m));
  CHECK_THROWS_AS(tone_table_for(Modality::ACC_X), Error);
  for (const auto& t : synthetic_tone_table()) {
    for (double f : t.hz) CHECK(f < 32.0);
  }
}
