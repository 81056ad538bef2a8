#pragma once

// Independent reference implementations shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "wearfuse/ewt.hpp"
#include "wearfuse/mlp.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Plain power series for J0, evaluated in long double.
inline long double j0_series(long double x) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = -x * x / 4.0L;
  for (int k = 1; k < 80; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
  }
  return sum;
}

inline double bisect_root(double lo, double hi) {
  long double a = lo, b = hi;
  long double fa = j0_series(a);
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (a + b);
    const long double fm = j0_series(mid);
    if ((fm < 0) == (fa < 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return static_cast<double>(0.5L * (a + b));
}

inline double rel_rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

inline std::size_t argmax_abs(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  return best;
}

// Brute-force Otsu: between-class variance by definition, smallest maximizing t.
inline std::optional<std::uint32_t> otsu(const std::vector<std::uint32_t>& v) {
  long double best = -1.0L;
  std::optional<std::uint32_t> best_t;
  for (std::uint32_t t = 1; t <= 11; ++t) {
    long double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (auto x : v) {
      if (x < t) {
        n0 += 1;
        s0 += x;
      } else {
        n1 += 1;
        s1 += x;
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    const long double n = n0 + n1;
    const long double mu0 = s0 / n0, mu1 = s1 / n1;
    const long double var = (n0 / n) * (n1 / n) * (mu0 - mu1) * (mu0 - mu1);
    if (var > best * (1.0L + 1e-12L)) {
      best = var;
      best_t = t;
    }
  }
  return best_t;
}

// All multisets of `left` values from [from, 10].
inline void multisets(std::vector<std::uint32_t>& cur, std::uint32_t from, std::size_t left,
                      const std::function<void(const std::vector<std::uint32_t>&)>& visit) {
  if (left == 0) {
    visit(cur);
    return;
  }
  for (std::uint32_t x = from; x <= 10; ++x) {
    cur.push_back(x);
    multisets(cur, x, left - 1, visit);
    cur.pop_back();
  }
}

// Energy of a real sequence below / above a cutoff via a direct DFT.
inline std::pair<double, double> band_energy(const std::vector<double>& y, double fs, double cutoff) {
  const std::size_t n = y.size();
  double low = 0.0, high = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += y[t] * std::polar(1.0, -2.0 * kPi * k * t / n);
    const double f = static_cast<double>(k) * fs / n;
    (f < cutoff ? low : high) += std::norm(acc);
  }
  return {low, high};
}

inline std::vector<double> tones(std::size_t u, double fs, std::initializer_list<double> freqs) {
  std::vector<double> y(u, 0.0);
  for (std::size_t n = 0; n < u; ++n) {
    for (double f : freqs) y[n] += std::sin(2.0 * kPi * f * n / fs);
  }
  return y;
}

inline wearfuse::BoundarySet random_boundaries(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_real_distribution<double> pos(0.05, kPi - 0.05);
  std::vector<double> inner;
  const int k = count(rng);
  while (static_cast<int>(inner.size()) < k) {
    const double w = pos(rng);
    bool ok = true;
    for (double o : inner) ok = ok && std::abs(o - w) > 0.05;
    if (ok) inner.push_back(w);
  }
  std::sort(inner.begin(), inner.end());
  wearfuse::BoundarySet b;
  b.omegas.push_back(0.0);
  b.omegas.insert(b.omegas.end(), inner.begin(), inner.end());
  b.omegas.push_back(kPi);
  std::uniform_real_distribution<double> frac(0.05, 0.99);
  b.xi = std::min(0.99, frac(rng) * b.xi_bound());
  return b;
}

inline wearfuse::ClassDistribution random_distribution(std::mt19937_64& rng) {
  std::gamma_distribution<double> g(0.7, 1.0);
  wearfuse::ClassDistribution p{};
  double sum = 0.0;
  for (double& v : p) {
    v = g(rng);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

// Three isotropic unit-variance blobs in `dim` dimensions, centres 5 sigma apart.
inline wearfuse::LabeledSet blobs(std::size_t per_class, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  wearfuse::LabeledSet s;
  const double offset = 5.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int c = 0; c < 3; ++c) {
      std::vector<double> x(dim);
      for (double& v : x) v = g(rng);
      x[static_cast<std::size_t>(c)] += offset;
      s.x.push_back(std::move(x));
      s.y.push_back(c);
    }
  }
  return s;
}

}  // namespace oracle
