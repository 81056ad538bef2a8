#pragma once

#include <cstddef>
#include <vector>

namespace wearfuse {

// Power series for |x| <= 12, Hankel asymptotic expansion beyond.
double bessel_j0(double x) noexcept;
double bessel_j1(double x) noexcept;

struct BesselRoots {
  std::vector<double> roots;  // beta_1 < beta_2 < ... (positive zeros of J0)
};

/// First `count` positive zeros of J0: McMahon initial guess, Newton refinement.
BesselRoots j0_roots(std::size_t count);

}  // namespace wearfuse
