#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wearfuse {

inline constexpr std::size_t kMaxFbseLength = 4096;

/// Shared, read-only J0 basis for one window length U.
struct FbseBasis {
  std::size_t length = 0;
  std::vector<double> roots;        // beta_1..beta_U
  Eigen::MatrixXd synthesis;        // (n, m) -> J0(beta_m n / U)
  Eigen::PartialPivLU<Eigen::MatrixXd> solver;  // factorization of `synthesis`
};

/// Built once per U and cached for the process lifetime. Thread-safe.
std::shared_ptr<const FbseBasis> fbse_basis(std::size_t length);

struct FbseSpectrum {
  std::vector<double> coeffs;  // C_1..C_U
  double fs = 0.0;

  std::size_t length() const noexcept { return coeffs.size(); }
  std::vector<double> magnitudes() const;
};

/// Coefficients for which the J0 synthesis sum reproduces `y` exactly at
/// n = 0..U-1 (dense solve against the cached basis).
FbseSpectrum fbse_forward(std::span<const double> y, double fs);

/// Classic quadrature estimate
/// C_m = 2 / (U^2 J1(beta_m)^2) * sum_n n y[n] J0(beta_m n / U).
/// Approximate: y[0] carries no weight, so it does not invert fbse_inverse.
FbseSpectrum fbse_forward_quadrature(std::span<const double> y, double fs);

/// y[n] = sum_m C_m J0(beta_m n / U).
std::vector<double> fbse_inverse(const FbseSpectrum& spectrum);

/// f_m = m fs / (2U). Throws OrderOutOfRange unless 1 <= m <= U.
double order_to_freq(std::size_t order, std::size_t length, double fs);
/// Nearest valid order to 2 f U / fs, clamped to [1, U].
std::size_t freq_to_order(double freq, std::size_t length, double fs);

}  // namespace wearfuse
