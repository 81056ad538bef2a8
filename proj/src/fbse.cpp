#include "wearfuse/fbse.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "wearfuse/bessel.hpp"
#include "wearfuse/error.hpp"

namespace wearfuse {

namespace {

void check_input(std::span<const double> y, double fs) {
  if (y.size() < 2) fail(ErrorCode::InvalidArgument, "FBSE needs at least 2 samples");
  if (y.size() > kMaxFbseLength) {
    fail(ErrorCode::InvalidArgument, "FBSE window of " + std::to_string(y.size()) +
                                         " samples exceeds the " +
                                         std::to_string(kMaxFbseLength) + " sample limit");
  }
  if (!(fs > 0.0)) fail(ErrorCode::InvalidArgument, "sampling rate must be positive");
  for (double v : y) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteInput, "FBSE input contains non-finite samples");
  }
}

std::shared_ptr<const FbseBasis> build_basis(std::size_t length) {
  auto basis = std::make_shared<FbseBasis>();
  basis->length = length;
  basis->roots = j0_roots(length).roots;
  const auto u = static_cast<Eigen::Index>(length);
  basis->synthesis.resize(u, u);
  const double inv_len = 1.0 / static_cast<double>(length);
  for (Eigen::Index m = 0; m < u; ++m) {
    const double beta = basis->roots[static_cast<std::size_t>(m)];
    for (Eigen::Index n = 0; n < u; ++n) {
      basis->synthesis(n, m) = bessel_j0(beta * static_cast<double>(n) * inv_len);
    }
  }
  basis->solver.compute(basis->synthesis);
  return basis;
}

}  // namespace

std::shared_ptr<const FbseBasis> fbse_basis(std::size_t length) {
  if (length < 2 || length > kMaxFbseLength) {
    fail(ErrorCode::InvalidArgument, "FBSE basis length out of range: " + std::to_string(length));
  }
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const FbseBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[length];
  if (!slot) slot = build_basis(length);
  return slot;
}

std::vector<double> FbseSpectrum::magnitudes() const {
  std::vector<double> out(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = std::abs(coeffs[i]);
  return out;
}

FbseSpectrum fbse_forward(std::span<const double> y, double fs) {
  check_input(y, fs);
  const auto basis = fbse_basis(y.size());
  const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::VectorXd c = basis->solver.solve(rhs);
  FbseSpectrum out{std::vector<double>(c.data(), c.data() + c.size()), fs};
  for (double v : out.coeffs) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteInput, "FBSE produced non-finite coefficients");
  }
  return out;
}

FbseSpectrum fbse_forward_quadrature(std::span<const double> y, double fs) {
  check_input(y, fs);
  const auto basis = fbse_basis(y.size());
  const std::size_t u = y.size();
  const double u2 = static_cast<double>(u) * static_cast<double>(u);
  FbseSpectrum out{std::vector<double>(u, 0.0), fs};
  for (std::size_t m = 0; m < u; ++m) {
    double acc = 0.0;
    for (std::size_t n = 1; n < u; ++n) {
      acc += static_cast<double>(n) * y[n] *
             basis->synthesis(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    }
    const double j1 = bessel_j1(basis->roots[m]);
    out.coeffs[m] = 2.0 * acc / (u2 * j1 * j1);
  }
  return out;
}

std::vector<double> fbse_inverse(const FbseSpectrum& spectrum) {
  const auto basis = fbse_basis(spectrum.length());
  const Eigen::Map<const Eigen::VectorXd> c(spectrum.coeffs.data(),
                                            static_cast<Eigen::Index>(spectrum.length()));
  const Eigen::VectorXd y = basis->synthesis * c;
  return {y.data(), y.data() + y.size()};
}

double order_to_freq(std::size_t order, std::size_t length, double fs) {
  if (order < 1 || order > length) {
    fail(ErrorCode::OrderOutOfRange, "order " + std::to_string(order) + " outside [1, " +
                                         std::to_string(length) + "]");
  }
  return static_cast<double>(order) * fs / (2.0 * static_cast<double>(length));
}

std::size_t freq_to_order(double freq, std::size_t length, double fs) {
  if (length < 1 || !(fs > 0.0)) fail(ErrorCode::InvalidArgument, "invalid length or sampling rate");
  const double m = std::round(2.0 * freq * static_cast<double>(length) / fs);
  if (!(m >= 1.0)) return 1;
  if (m > static_cast<double>(length)) return length;
  return static_cast<std::size_t>(m);
}

}  // namespace wearfuse
