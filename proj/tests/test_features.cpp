#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wearfuse/error.hpp"
#include "wearfuse/features.hpp"
#include "wearfuse/fbse.hpp"

using namespace wearfuse;

TEST_CASE("mode energy") {
  CHECK(mode_energy(std::vector<double>(8, 0.0)) == 0.0);
  CHECK(mode_energy(std::vector<double>(10, -1.5)) == doctest::Approx(2.25).epsilon(1e-15));
  std::vector<double> impulse(8, 0.0);
  impulse[3] = 1.0;
  CHECK(mode_energy(impulse) == 0.125);
}

TEST_CASE("log energy") {
  CHECK(mode_log_energy(0.0, 1e-12) == doctest::Approx(-27.631021115928547));
  CHECK(std::abs(mode_log_energy(1.0 - 1e-12, 1e-12)) < 1e-12);
  CHECK(std::abs(mode_log_energy(std::numbers::e - 1e-12, 1e-12) - 1.0) < 1e-12);
  CHECK_THROWS_AS(mode_log_energy(-1.0, 1e-12), Error);
}

TEST_CASE("mode entropy") {
  std::vector<double> impulse(16, 0.0);
  impulse[5] = 4.0;
  CHECK(mode_entropy(impulse) == 0.0);
  CHECK(std::abs(mode_entropy(std::vector<double>(16, 0.3)) - std::log(16.0)) <= 1e-9);
  std::vector<double> two(10, 0.0);
  two[1] = 2.0;
  two[7] = -2.0;
  CHECK(std::abs(mode_entropy(two) - std::log(2.0)) <= 1e-12);
  CHECK(mode_entropy(std::vector<double>(4, 0.0)) == 0.0);
}

TEST_CASE("entropy and energy properties") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::size_t> len(1, 300);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> mode(len(rng));
    for (double& v : mode) v = g(rng);
    const double e = mode_energy(mode);
    const double h = mode_entropy(mode);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(mode.size())) + 1e-12);

    double c = g(rng);
    if (c == 0.0) c = 1.0;
    std::vector<double> scaled(mode);
    for (double& v : scaled) v *= c;
    CHECK(std::abs(mode_energy(scaled) - c * c * e) <= 1e-9 * std::max(1.0, c * c * e));
    CHECK(std::abs(mode_entropy(scaled) - h) <= 1e-9);

    std::vector<double> shuffled(mode);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(mode_energy(shuffled) == doctest::Approx(e).epsilon(1e-12));
    CHECK(mode_entropy(shuffled) == doctest::Approx(h).epsilon(1e-12));
  }
}

TEST_CASE("feature vector padding and length") {
  ModeSet ms;
  ms.modes = {std::vector<double>(8, 1.0), std::vector<double>(8, 0.5), std::vector<double>(8, 0.0)};
  const auto v = feature_values(ms, 5, 1e-12);
  REQUIRE(v.size() == 15);
  CHECK(v[0] == 1.0);
  CHECK(v[3] == 0.25);
  for (std::size_t r = 3; r < 5; ++r) {
    CHECK(v[3 * r] == 0.0);
    CHECK(v[3 * r + 1] == std::log(1e-12));
    CHECK(v[3 * r + 2] == 0.0);
  }
  CHECK_THROWS_AS(feature_values(ms, 2, 1e-12), Error);
  for (std::size_t k = 3; k < 9; ++k) CHECK(feature_values(ms, k).size() == 3 * k);
}

TEST_CASE("feature vector from a two-tone decomposition starts with the low band") {
  std::vector<double> y(256);
  for (std::size_t n = 0; n < y.size(); ++n) {
    y[n] = 2.0 * std::sin(2.0 * std::numbers::pi * 5.0 * n / 64.0) + 0.5 * std::sin(2.0 * std::numbers::pi * 20.0 * n / 64.0);
  }
  EwtConfig cfg;
  cfg.max_modes = 2;
  const auto ms = decompose(y, 64.0, cfg);
  REQUIRE(ms.modes.size() == 2);
  // lower edge of band 0 is 0 Hz; the boundary sits between the tones
  const double edge_hz = ms.boundaries.omegas[1] / std::numbers::pi * 32.0;
  CHECK(edge_hz > 5.0);
  CHECK(edge_hz < 20.0);
  const auto v = feature_values(ms, 2);
  REQUIRE(v.size() == 6);
  // the 5 Hz tone (amplitude 2) carries ~16x the 20 Hz tone's energy
  CHECK(v[0] > 8.0 * v[3]);
}

TEST_CASE("zero window features") {
  const auto ms = decompose(std::vector<double>(64, 0.0), 16.0);
  const auto v = feature_values(ms, 5);
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(v[3 * r] == 0.0);
    CHECK(v[3 * r + 2] == 0.0);
  }
}

TEST_CASE("standardizer") {
  std::vector<std::vector<double>> rows{{1.0, 5.0}, {3.0, 5.0}};
  const auto s = Standardizer::fit(rows);
  CHECK(s.mean[0] == 2.0);
  CHECK(s.scale[0] == 1.0);
  CHECK(s.scale[1] == 1.0);  // constant column keeps unit scale
  const auto z = s.apply(std::vector<double>{3.0, 5.0});
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 0.0);
  CHECK_THROWS_AS(s.apply(std::vector<double>{1.0}), Error);
}
