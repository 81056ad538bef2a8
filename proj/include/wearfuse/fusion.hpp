#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wearfuse/mlp.hpp"
#include "wearfuse/windowing.hpp"

namespace wearfuse {

struct SspOutput {
  Modality sensor = Modality::ECG;
  ClassDistribution p{};
  double f1 = 0.0;
};

/// Ordered set of distinct sensors.
struct Team {
  std::vector<Modality> members;

  std::string name() const;  // e.g. "ECG+EDA"
  bool operator==(const Team&) const = default;
};

struct TeamDecision {
  ClassDistribution p{};
  std::vector<double> entropies;  // normalized, per member
  std::vector<double> weights;    // (1 - H~)^F1, per member
  double gamma = 0.0;             // sum of weights
  bool fallback = false;          // all weights ~0: unweighted mean used
};

/// Throws InvalidDistribution unless components are finite, nonnegative and sum to 1 (1e-6).
void check_distribution(std::span<const double> p);

/// Shannon entropy over |C| classes divided by log |C|.
double normalized_entropy(std::span<const double> p);

/// w_i = (1 - H~(P_i))^F1_i (0^0 = 1), P_T = sum w_i P_i / sum w_i. When
/// sum w_i < 1e-12 the unweighted mean is returned and `fallback` is set.
TeamDecision fuse(std::span<const SspOutput> members);

/// Subsets of `sensors` of one size (or all nonempty ones), lexicographic by index.
std::vector<Team> enumerate_teams(std::span<const Modality> sensors,
                                  std::optional<std::size_t> size = std::nullopt);

struct SensorFeatures {
  Modality sensor = Modality::ECG;
  std::vector<double> values;
};

/// Concatenates per-sensor vectors in `order`; MissingModality if one is absent.
std::vector<double> feature_level_fuse(std::span<const SensorFeatures> parts,
                                       std::span<const Modality> order);

}  // namespace wearfuse
