#include "wearfuse/windowing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "wearfuse/error.hpp"

namespace wearfuse {

namespace {

constexpr std::array<std::pair<Modality, std::string_view>, 8> kModalityNames{{
    {Modality::ECG, "ECG"},
    {Modality::EDA, "EDA"},
    {Modality::EMG, "EMG"},
    {Modality::BVP, "BVP"},
    {Modality::ACC_X, "ACC_X"},
    {Modality::ACC_Y, "ACC_Y"},
    {Modality::ACC_Z, "ACC_Z"},
    {Modality::ACC, "ACC"},
}};

std::size_t round_index(double v) {
  return static_cast<std::size_t>(std::llround(v));
}

}  // namespace

std::string_view to_string(Modality m) noexcept {
  for (const auto& [mod, name] : kModalityNames) {
    if (mod == m) return name;
  }
  return "?";
}

std::optional<Modality> parse_modality(std::string_view name) {
  for (const auto& [mod, n] : kModalityNames) {
    if (n.size() != name.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < n.size(); ++i) {
      char c = name[i];
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      if (c != n[i]) {
        same = false;
        break;
      }
    }
    if (same) return mod;
  }
  return std::nullopt;
}

std::string_view to_string(AffectClass c) noexcept {
  switch (c) {
    case AffectClass::Baseline: return "Baseline";
    case AffectClass::Stress: return "Stress";
    case AffectClass::Amusement: return "Amusement";
  }
  return "?";
}

std::optional<AffectClass> class_from_code(int code) noexcept {
  switch (code) {
    case 1: return AffectClass::Baseline;
    case 2: return AffectClass::Stress;
    case 3: return AffectClass::Amusement;
    default: return std::nullopt;
  }
}

int code_of(AffectClass c) noexcept { return static_cast<int>(c) + 1; }

WindowSpec WindowSpec::make(double seconds, double overlap, double fs) {
  if (!(seconds > 0.0) || !(fs > 0.0) || !std::isfinite(seconds) || !std::isfinite(fs)) {
    fail(ErrorCode::InvalidSpec, "window duration and sampling rate must be positive");
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    fail(ErrorCode::InvalidSpec, "overlap must lie in [0, 1)");
  }
  WindowSpec spec;
  spec.seconds = seconds;
  spec.overlap = overlap;
  spec.length = round_index(seconds * fs);
  const auto hop = std::llround((1.0 - overlap) * static_cast<double>(spec.length));
  spec.hop = hop < 1 ? 1 : static_cast<std::size_t>(hop);
  spec.validate();
  return spec;
}

void WindowSpec::validate() const {
  if (length < 2) fail(ErrorCode::InvalidSpec, "window length must be at least 2 samples");
  if (hop < 1 || hop > length) fail(ErrorCode::InvalidSpec, "hop must lie in [1, W]");
}

std::size_t window_count(std::size_t n_samples, const WindowSpec& spec) {
  if (n_samples < spec.length) return 0;
  return (n_samples - spec.length) / spec.hop + 1;
}

std::vector<Window> segment(const SignalRecord& record, const WindowSpec& spec) {
  spec.validate();
  const std::size_t n = record.samples.size();
  if (n < spec.length) {
    std::ostringstream msg;
    msg << "stream " << record.subject_id << "/" << to_string(record.modality) << " has " << n
        << " samples, window needs " << spec.length;
    fail(ErrorCode::StreamTooShort, msg.str());
  }
  const std::size_t count = window_count(n, spec);
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto first = record.samples.begin() + static_cast<std::ptrdiff_t>(k * spec.hop);
    out.push_back({k, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(spec.length))});
  }
  return out;
}

IndexRange label_index_range(std::size_t k, const WindowSpec& spec, double fs_signal) {
  if (!(fs_signal > 0.0)) fail(ErrorCode::InvalidArgument, "sampling rate must be positive");
  const double scale = kLabelRateHz / fs_signal;
  const double start = static_cast<double>(k * spec.hop);
  IndexRange r{round_index(start * scale),
               round_index((start + static_cast<double>(spec.length)) * scale)};
  if (r.end <= r.begin) r.end = r.begin + 1;
  return r;
}

std::optional<LabelDecision> majority_label(std::span<const int> range_labels, double rho) {
  if (range_labels.empty()) fail(ErrorCode::EmptyRange, "label range is empty");
  if (!(rho > 0.0 && rho <= 1.0)) fail(ErrorCode::InvalidArgument, "purity threshold must lie in (0, 1]");

  std::array<std::size_t, kNumClasses> counts{};
  // Non-target codes are tallied per code so a single foreign code can win the vote.
  std::vector<std::pair<int, std::size_t>> foreign;
  for (int code : range_labels) {
    if (auto c = class_from_code(code)) {
      ++counts[static_cast<std::size_t>(*c)];
      continue;
    }
    bool found = false;
    for (auto& [fc, n] : foreign) {
      if (fc == code) {
        ++n;
        found = true;
        break;
      }
    }
    if (!found) foreign.emplace_back(code, 1);
  }

  std::size_t best = 0;
  std::size_t best_count = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (counts[c] > best_count) {
      best = c;
      best_count = counts[c];
    }
  }
  if (best_count == 0) return std::nullopt;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (c != best && counts[c] == best_count) return std::nullopt;
  }
  for (const auto& [code, n] : foreign) {
    if (n >= best_count) return std::nullopt;
  }

  const double purity =
      static_cast<double>(best_count) / static_cast<double>(range_labels.size());
  if (purity < rho) return std::nullopt;
  return LabelDecision{static_cast<AffectClass>(best), purity};
}

LabelingResult label_windows(const SignalRecord& record, const LabelStream& labels,
                             const WindowSpec& spec, double rho) {
  LabelingResult result;
  for (auto& w : segment(record, spec)) {
    IndexRange r = label_index_range(w.k, spec, record.fs);
    if (r.begin >= labels.labels.size()) {
      ++result.rejected;
      continue;
    }
    r.end = std::min(r.end, labels.labels.size());
    std::span<const int> range(labels.labels.data() + r.begin, r.size());
    auto decision = majority_label(range, rho);
    if (!decision) {
      ++result.rejected;
      continue;
    }
    result.accepted.push_back(LabeledWindow{record.subject_id, record.modality, w.k,
                                            std::move(w.samples), decision->label,
                                            decision->purity});
  }
  return result;
}

SignalRecord acceleration_magnitude(const SignalRecord& x, const SignalRecord& y,
                                    const SignalRecord& z) {
  if (x.samples.size() != y.samples.size() || x.samples.size() != z.samples.size()) {
    fail(ErrorCode::DimensionMismatch, "acceleration axes for " + x.subject_id +
                                           " differ in length");
  }
  if (x.fs != y.fs || x.fs != z.fs) {
    fail(ErrorCode::DimensionMismatch, "acceleration axes for " + x.subject_id +
                                           " differ in sampling rate");
  }
  SignalRecord out{x.subject_id, Modality::ACC, x.fs, {}};
  out.samples.resize(x.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = std::sqrt(x.samples[i] * x.samples[i] + y.samples[i] * y.samples[i] +
                               z.samples[i] * z.samples[i]);
  }
  return out;
}

}  // namespace wearfuse
