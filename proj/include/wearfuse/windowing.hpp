#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wearfuse {

// ACC is the derived three-axis magnitude; the axis records are what ingestion reads.
enum class Modality { ECG, EDA, EMG, BVP, ACC_X, ACC_Y, ACC_Z, ACC };

std::string_view to_string(Modality m) noexcept;
std::optional<Modality> parse_modality(std::string_view name);

enum class AffectClass { Baseline = 0, Stress = 1, Amusement = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr double kLabelRateHz = 700.0;

std::string_view to_string(AffectClass c) noexcept;
/// Raw label code (1, 2, 3) to class; nullopt for any other code.
std::optional<AffectClass> class_from_code(int code) noexcept;
int code_of(AffectClass c) noexcept;

struct SignalRecord {
  std::string subject_id;
  Modality modality = Modality::ECG;
  double fs = 0.0;
  std::vector<double> samples;
};

struct WindowSpec {
  double seconds = 0.0;
  double overlap = 0.0;
  std::size_t length = 0;  // W
  std::size_t hop = 0;     // H

  /// W = round(L*fs), H = max(1, round((1-alpha)*W)). Throws InvalidSpec.
  static WindowSpec make(double seconds, double overlap, double fs);
  void validate() const;
};

struct LabelStream {
  std::string subject_id;
  std::vector<int> labels;  // 700 Hz codes, unfiltered
};

struct Window {
  std::size_t k = 0;
  std::vector<double> samples;
};

struct LabeledWindow {
  std::string subject_id;
  Modality modality = Modality::ECG;
  std::size_t k = 0;
  std::vector<double> samples;
  AffectClass label = AffectClass::Baseline;
  double purity = 0.0;
};

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

struct LabelDecision {
  AffectClass label = AffectClass::Baseline;
  double purity = 0.0;
};

std::size_t window_count(std::size_t n_samples, const WindowSpec& spec);

/// Windows k = 0..floor((N-W)/H). Throws StreamTooShort / InvalidSpec.
std::vector<Window> segment(const SignalRecord& record, const WindowSpec& spec);

/// [round(kH*700/fs), round((kH+W)*700/fs)), widened to one index if it rounds empty.
IndexRange label_index_range(std::size_t k, const WindowSpec& spec, double fs_signal);

/// Majority vote restricted to the three target classes. Purity uses the full
/// range length as denominator. Ties, non-target majorities and purity < rho
/// all reject (nullopt). Throws EmptyRange on empty input.
std::optional<LabelDecision> majority_label(std::span<const int> range_labels, double rho);

struct LabelingResult {
  std::vector<LabeledWindow> accepted;
  std::size_t rejected = 0;
};

/// Segments and labels one record. Windows whose label range falls outside the
/// label stream are rejected.
LabelingResult label_windows(const SignalRecord& record, const LabelStream& labels,
                             const WindowSpec& spec, double rho);

/// Combines three equally sized axis records into a magnitude record (Modality::ACC).
SignalRecord acceleration_magnitude(const SignalRecord& x, const SignalRecord& y,
                                    const SignalRecord& z);

}  // namespace wearfuse
