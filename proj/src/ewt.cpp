#include "wearfuse/ewt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "wearfuse/error.hpp"
#include "wearfuse/fbse.hpp"

namespace wearfuse {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

}  // namespace

double BoundarySet::xi_bound() const {
  double bound = 1.0;
  for (std::size_t n = 1; n + 1 < omegas.size(); ++n) {
    bound = std::min(bound, (omegas[n + 1] - omegas[n]) / (omegas[n + 1] + omegas[n]));
  }
  return bound;
}

void BoundarySet::validate() const {
  if (omegas.size() < 2) fail(ErrorCode::InvalidArgument, "boundary set needs at least {0, pi}");
  if (omegas.front() != 0.0 || std::abs(omegas.back() - kPi) > 1e-12) {
    fail(ErrorCode::InvalidArgument, "boundary set must start at 0 and end at pi");
  }
  for (std::size_t n = 1; n < omegas.size(); ++n) {
    if (!(omegas[n] > omegas[n - 1])) fail(ErrorCode::InvalidArgument, "boundaries must be strictly increasing");
  }
  if (!(xi > 0.0 && xi < 1.0)) fail(ErrorCode::InvalidXi, "xi must lie in (0, 1)");
  if (omegas.size() > 2 && !(xi < xi_bound())) {
    fail(ErrorCode::InvalidXi, "xi " + std::to_string(xi) + " violates the tight-frame bound " +
                                   std::to_string(xi_bound()));
  }
}

double meyer_beta(double v) noexcept {
  v = std::clamp(v, 0.0, 1.0);
  const double v4 = v * v * v * v;
  return v4 * (35.0 - 84.0 * v + 70.0 * v * v - 20.0 * v * v * v);
}

std::uint32_t otsu_threshold(std::span<const std::uint32_t> values) {
  if (values.size() < 2) fail(ErrorCode::InvalidArgument, "Otsu needs at least two values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const std::uint32_t lo = *lo_it;
  const std::uint32_t hi = *hi_it;
  if (lo == hi) fail(ErrorCode::DegenerateInput, "all values are equal");

  std::vector<std::uint64_t> hist(hi - lo + 1, 0);
  for (auto v : values) ++hist[v - lo];

  // Between-class variance (n0 S1 - n1 S0)^2 / (n0 n1 n^2); the common n^2 is
  // dropped and fractions are compared exactly in 128-bit integers.
  __extension__ typedef unsigned __int128 u128;
  const std::uint64_t n = values.size();
  std::uint64_t total = 0;
  for (auto v : values) total += v;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  u128 best_num = 0;
  u128 best_den = 1;
  std::uint32_t best_t = lo + 1;
  bool have = false;
  for (std::uint32_t t = lo + 1; t <= hi; ++t) {
    n0 += hist[t - 1 - lo];
    s0 += hist[t - 1 - lo] * static_cast<std::uint64_t>(t - 1);
    const std::uint64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const std::uint64_t s1 = total - s0;
    const u128 a = static_cast<u128>(n0) * s1;
    const u128 b = static_cast<u128>(n1) * s0;
    const u128 diff = a > b ? a - b : b - a;
    const u128 num = diff * diff;
    const u128 den = static_cast<u128>(n0) * n1;
    if (!have || num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_t = t;
      have = true;
    }
  }
  return best_t;
}

std::vector<std::size_t> local_minima(std::span<const double> curve) {
  std::vector<std::size_t> out;
  const std::size_t n = curve.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (curve[i] < curve[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && curve[j + 1] == curve[i]) ++j;
      if (j + 1 < n && curve[j + 1] > curve[i]) out.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<double> gaussian_smooth(std::span<const double> curve, double sigma, double truncate) {
  const std::size_t n = curve.size();
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(truncate * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
    const double w = std::exp(-0.5 * static_cast<double>(j * j) / (sigma * sigma));
    kernel[static_cast<std::size_t>(j + radius)] = w;
    norm += w;
  }
  for (double& w : kernel) w /= norm;

  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
      acc += kernel[static_cast<std::size_t>(j + radius)] *
             curve[reflect(static_cast<std::ptrdiff_t>(i) + j, n)];
    }
    out[i] = acc;
  }
  return out;
}

std::vector<PersistentMinimum> track_minima(std::span<const double> curve,
                                            const ScaleSpaceConfig& config) {
  if (config.scales < 1 || !(config.sigma0 > 0.0) || !(config.growth >= 1.0)) {
    fail(ErrorCode::InvalidArgument, "invalid scale-space configuration");
  }
  double sigma = config.sigma0;
  const auto first = local_minima(gaussian_smooth(curve, sigma, config.truncate));

  std::vector<PersistentMinimum> tracks;
  std::vector<std::size_t> position;
  std::vector<bool> alive;
  for (auto idx : first) {
    tracks.push_back({idx, 1});
    position.push_back(idx);
    alive.push_back(true);
  }

  struct Candidate {
    std::size_t distance;
    std::size_t track;
    std::size_t minimum;
  };

  for (std::size_t s = 1; s < config.scales; ++s) {
    sigma *= config.growth;
    const auto minima = local_minima(gaussian_smooth(curve, sigma, config.truncate));
    const auto reach = static_cast<std::size_t>(std::max(2.0, std::ceil(sigma)));

    std::vector<Candidate> pairs;
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      if (!alive[t]) continue;
      for (std::size_t q = 0; q < minima.size(); ++q) {
        const std::size_t d = position[t] > minima[q] ? position[t] - minima[q] : minima[q] - position[t];
        if (d <= reach) pairs.push_back({d, t, q});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      if (a.track != b.track) return a.track < b.track;
      return a.minimum < b.minimum;
    });

    std::vector<bool> track_taken(tracks.size(), false);
    std::vector<bool> minimum_taken(minima.size(), false);
    for (const auto& c : pairs) {
      if (track_taken[c.track] || minimum_taken[c.minimum]) continue;
      track_taken[c.track] = true;
      minimum_taken[c.minimum] = true;
      position[c.track] = minima[c.minimum];
      ++tracks[c.track].persistence;
    }
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      if (!track_taken[t]) alive[t] = false;
    }
  }
  return tracks;
}

double auto_xi(std::span<const double> omegas) {
  BoundarySet probe{std::vector<double>(omegas.begin(), omegas.end()), 0.5};
  if (probe.omegas.size() <= 2) return 0.5;
  const double bound = probe.xi_bound();
  double xi = std::clamp(0.9 * bound, 0.01, 0.5);
  if (!(xi < bound)) xi = 0.9 * bound;
  return xi;
}

BoundarySet detect_boundaries(std::span<const double> magnitudes, std::size_t max_modes,
                              const ScaleSpaceConfig& config) {
  if (magnitudes.size() < 8) fail(ErrorCode::SpectrumTooShort, "spectrum needs at least 8 orders");
  if (max_modes < 1) fail(ErrorCode::InvalidArgument, "max_modes must be at least 1");

  auto minima = track_minima(magnitudes, config);

  std::vector<PersistentMinimum> kept;
  if (!minima.empty()) {
    std::vector<std::uint32_t> values;
    values.reserve(minima.size());
    for (const auto& m : minima) values.push_back(m.persistence);
    const bool degenerate =
        values.size() < 2 || std::all_of(values.begin(), values.end(),
                                          [&](std::uint32_t v) { return v == values.front(); });
    // No split to make: a lone minimum (or a uniform group) counts as meaningful
    // when it survives at least half of the scales.
    const std::uint32_t threshold =
        degenerate ? static_cast<std::uint32_t>((config.scales + 1) / 2) : otsu_threshold(values);
    for (const auto& m : minima) {
      if (m.persistence >= threshold) kept.push_back(m);
    }
  }

  if (kept.size() > max_modes - 1) {
    std::sort(kept.begin(), kept.end(), [&](const PersistentMinimum& a, const PersistentMinimum& b) {
      if (a.persistence != b.persistence) return a.persistence > b.persistence;
      if (magnitudes[a.index] != magnitudes[b.index]) return magnitudes[a.index] < magnitudes[b.index];
      return a.index < b.index;
    });
    kept.resize(max_modes - 1);
  }
  std::sort(kept.begin(), kept.end(),
            [](const PersistentMinimum& a, const PersistentMinimum& b) { return a.index < b.index; });

  const double u = static_cast<double>(magnitudes.size());
  BoundarySet out;
  out.omegas.push_back(0.0);
  for (const auto& m : kept) out.omegas.push_back(kPi * static_cast<double>(m.index + 1) / u);
  out.omegas.push_back(kPi);
  out.xi = auto_xi(out.omegas);
  return out;
}

FilterBank build_filter_bank(const BoundarySet& boundaries, std::size_t grid_size) {
  boundaries.validate();
  if (grid_size < 1) fail(ErrorCode::InvalidArgument, "grid size must be positive");
  const auto& w = boundaries.omegas;
  const double xi = boundaries.xi;
  const std::size_t segments = boundaries.segment_count();

  auto rising = [xi](double omega, double edge) {
    return std::sin(0.5 * kPi * meyer_beta((omega - (1.0 - xi) * edge) / (2.0 * xi * edge)));
  };
  auto falling = [xi](double omega, double edge) {
    return std::cos(0.5 * kPi * meyer_beta((omega - (1.0 - xi) * edge) / (2.0 * xi * edge)));
  };

  FilterBank bank;
  bank.responses.assign(segments, std::vector<double>(grid_size, 0.0));
  for (std::size_t m = 1; m <= grid_size; ++m) {
    const double omega = kPi * static_cast<double>(m) / static_cast<double>(grid_size);
    for (std::size_t r = 0; r < segments; ++r) {
      const bool has_lower = r > 0;
      const bool has_upper = r + 1 < segments;
      double value = 1.0;
      if (has_lower) {
        const double edge = w[r];
        if (omega < (1.0 - xi) * edge) {
          value = 0.0;
        } else if (omega <= (1.0 + xi) * edge) {
          value = rising(omega, edge);
        }
      }
      if (has_upper && value != 0.0) {
        const double edge = w[r + 1];
        if (omega > (1.0 + xi) * edge) {
          value = 0.0;
        } else if (omega >= (1.0 - xi) * edge) {
          value = falling(omega, edge);
        }
      }
      bank.responses[r][m - 1] = value;
    }
  }
  return bank;
}

ModeSet decompose(std::span<const double> window, double fs, const EwtConfig& config) {
  if (window.size() < 8) fail(ErrorCode::SpectrumTooShort, "decompose needs at least 8 samples");
  if (config.max_modes < 1) fail(ErrorCode::InvalidArgument, "max_modes must be at least 1");

  std::vector<double> y(window.begin(), window.end());
  if (config.demean) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    for (double& v : y) v -= mean;
  }

  const FbseSpectrum spectrum = fbse_forward(y, fs);
  const auto magnitudes = spectrum.magnitudes();
  ModeSet out;
  out.boundaries = detect_boundaries(magnitudes, config.max_modes, config.scale_space);
  const FilterBank bank = build_filter_bank(out.boundaries, y.size());

  const auto basis = fbse_basis(y.size());
  const auto u = static_cast<Eigen::Index>(y.size());
  const auto segments = static_cast<Eigen::Index>(bank.responses.size());
  Eigen::MatrixXd weighted(u, segments);
  for (Eigen::Index r = 0; r < segments; ++r) {
    const auto& resp = bank.responses[static_cast<std::size_t>(r)];
    for (Eigen::Index m = 0; m < u; ++m) {
      const double g = resp[static_cast<std::size_t>(m)];
      weighted(m, r) = spectrum.coeffs[static_cast<std::size_t>(m)] * g * g;
    }
  }
  const Eigen::MatrixXd modes = basis->synthesis * weighted;
  out.modes.resize(static_cast<std::size_t>(segments));
  for (Eigen::Index r = 0; r < segments; ++r) {
    out.modes[static_cast<std::size_t>(r)].assign(modes.col(r).data(), modes.col(r).data() + u);
  }
  return out;
}

}  // namespace wearfuse
