#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wearfuse/ewt.hpp"
#include "wearfuse/windowing.hpp"

namespace wearfuse {

inline constexpr double kDefaultEpsilon = 1e-12;
inline constexpr std::size_t kFeaturesPerMode = 3;

/// (1/W) sum mode[n]^2
double mode_energy(std::span<const double> mode);
double mode_log_energy(double energy, double epsilon = kDefaultEpsilon);
/// Shannon entropy (natural log) of mode[n]^2 / sum mode^2; 0 for an all-zero mode.
double mode_entropy(std::span<const double> mode);

struct FeatureVector {
  std::string subject_id;
  Modality modality = Modality::ECG;
  std::size_t k = 0;
  AffectClass label = AffectClass::Baseline;
  std::vector<double> values;  // (E_1, logE_1, H_1, ..., E_K, logE_K, H_K)
};

/// 3K values in band order; missing bands padded with (0, log eps, 0).
std::vector<double> feature_values(const ModeSet& modes, std::size_t max_modes,
                                   double epsilon = kDefaultEpsilon);

FeatureVector feature_vector(const ModeSet& modes, const LabeledWindow& window,
                             std::size_t max_modes, double epsilon = kDefaultEpsilon);

/// Per-feature z-score statistics (fit on training rows only).
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // std, 1 where the std is ~0

  static Standardizer fit(std::span<const std::vector<double>> rows);
  std::vector<double> apply(std::span<const double> row) const;
  bool empty() const noexcept { return mean.empty(); }
};

}  // namespace wearfuse
