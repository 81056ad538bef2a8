#include "wearfuse/bessel.hpp"

#include <cmath>
#include <numbers>

#include "wearfuse/error.hpp"

namespace wearfuse {

namespace {

constexpr double kSeriesLimit = 12.0;

double series(double x, int order) {
  const double q = -0.25 * x * x;
  double term = order == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

// J_nu(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - (nu/2 + 1/4) pi.
double hankel(double x, int order) {
  const double mu = 4.0 * order * order;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 120; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
    if (std::abs(term) > last) break;  // asymptotic series starts diverging
    last = std::abs(term);
    // a_k / x^k alternates between Q (odd k) and P (even k) with sign (-1)^{floor(k/2)}
    const double signed_term = ((k / 2) % 2 == 0) ? term : -term;
    if (k % 2 == 1) {
      q += signed_term;
    } else {
      p += signed_term;
    }
    if (last < 1e-17) break;
  }
  const double chi = x - (0.5 * order + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) noexcept {
  const double ax = std::abs(x);
  return ax <= kSeriesLimit ? series(ax, 0) : hankel(ax, 0);
}

double bessel_j1(double x) noexcept {
  const double ax = std::abs(x);
  const double v = ax <= kSeriesLimit ? series(ax, 1) : hankel(ax, 1);
  return x < 0.0 ? -v : v;
}

BesselRoots j0_roots(std::size_t count) {
  if (count == 0) fail(ErrorCode::InvalidArgument, "root count must be at least 1");
  BesselRoots out;
  out.roots.reserve(count);
  for (std::size_t m = 1; m <= count; ++m) {
    const double b = (static_cast<double>(m) - 0.25) * std::numbers::pi;
    const double b8 = 8.0 * b;
    double beta = b + 1.0 / b8 - 124.0 / (3.0 * b8 * b8 * b8);
    for (int it = 0; it < 60; ++it) {
      const double step = bessel_j0(beta) / bessel_j1(beta);
      beta += step;
      if (std::abs(step) < 1e-15 * beta) break;
    }
    out.roots.push_back(beta);
  }
  return out;
}

}  // namespace wearfuse
