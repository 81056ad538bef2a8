#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wearfuse {

/// Ordered band edges 0 = w_0 < w_1 < ... < w_N = pi and the transition ratio.
struct BoundarySet {
  std::vector<double> omegas;
  double xi = 0.5;

  std::size_t segment_count() const noexcept { return omegas.empty() ? 0 : omegas.size() - 1; }
  /// Largest admissible xi (exclusive): min over interior edges of (w_{n+1}-w_n)/(w_{n+1}+w_n).
  double xi_bound() const;
  void validate() const;
  bool operator==(const BoundarySet&) const = default;
};

/// Squared responses sum to one on the grid w = pi m / U, m = 1..U.
struct FilterBank {
  std::vector<std::vector<double>> responses;  // [segment][m - 1]
};

struct ModeSet {
  std::vector<std::vector<double>> modes;  // ascending band order, each length W
  BoundarySet boundaries;
};

struct ScaleSpaceConfig {
  std::size_t scales = 32;
  double sigma0 = 0.5;
  double growth = 1.15;
  double truncate = 4.0;  // kernel radius in sigmas
};

struct EwtConfig {
  std::size_t max_modes = 5;
  ScaleSpaceConfig scale_space;
  bool demean = true;
};

/// Meyer transition polynomial v^4 (35 - 84 v + 70 v^2 - 20 v^3), v clamped to [0, 1].
double meyer_beta(double v) noexcept;

/// Smallest integer t maximizing the between-class variance of the split
/// {v < t} / {v >= t}. Throws DegenerateInput when all values are equal.
std::uint32_t otsu_threshold(std::span<const std::uint32_t> values);

/// Interior local minima of `curve` (plateaus resolved to their centre).
std::vector<std::size_t> local_minima(std::span<const double> curve);

/// Gaussian smoothing with reflective edges.
std::vector<double> gaussian_smooth(std::span<const double> curve, double sigma, double truncate);

struct PersistentMinimum {
  std::size_t index = 0;         // position at the finest scale (0-based)
  std::uint32_t persistence = 0; // consecutive scales survived, from the finest
};

/// Tracks finest-scale minima through the scale space.
std::vector<PersistentMinimum> track_minima(std::span<const double> curve,
                                            const ScaleSpaceConfig& config);

/// 0.9 x bound, clipped to [0.01, 0.5] while staying strictly below the bound.
double auto_xi(std::span<const double> omegas);

/// Scale-space persistence + Otsu selection on a magnitude spectrum indexed by
/// order m = 1..U. Keeps at most max_modes - 1 interior edges.
BoundarySet detect_boundaries(std::span<const double> magnitudes, std::size_t max_modes,
                              const ScaleSpaceConfig& config = {});

FilterBank build_filter_bank(const BoundarySet& boundaries, std::size_t grid_size);

/// demean -> FBSE -> boundaries on |C_m| -> filter bank -> per-band synthesis.
/// Each band keeps the coefficients weighted by its squared response, so the
/// modes sum back to the (demeaned) window.
ModeSet decompose(std::span<const double> window, double fs, const EwtConfig& config = {});

}  // namespace wearfuse
