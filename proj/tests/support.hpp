#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "critnls/groundstate.hpp"
#include "critnls/grid.hpp"

namespace critnls::testing {

// Reference values from tools/oracles.py (mpmath, 40 digits).
namespace oracle {
inline constexpr double bump_c = 2.252283621043581;
inline constexpr double sobolev_pow_d3 = 12.820992204969127;
inline constexpr double sobolev_pow_d4 = 105.27578027828649;
inline constexpr double sobolev_pow_d5 = 844.36026476273856;
inline constexpr double strauss_c_d4 = 0.31830988618379067;
// Norms of exp(-r^2) in R^4 with p = 2.5.
inline constexpr double gauss4_mass = 2.4674011002723397;
inline constexpr double gauss4_grad2 = 9.8696044010893586;
inline constexpr double gauss4_lp1 = 0.80568199192566193;
inline constexpr double gauss4_lcrit = 0.61685027506808491;
// Same for d = 3, p = 3.
inline constexpr double gauss3_mass = 1.9687012432153025;
inline constexpr double gauss3_grad2 = 5.9061037296459074;
inline constexpr double gauss3_lp1 = 0.69604099960396348;
inline constexpr double gauss3_lcrit = 0.37887673090810193;
}  // namespace oracle

// Regression values of this discretization (d = 4, p = 2.5, omega = mu = 1, N = 4096,
// r_max = 40), recorded from a converged run.
namespace regression {
inline constexpr double m_omega = 40.721119546187154;
inline constexpr double amplitude_nehari = 17.189088481143497;
inline constexpr double amplitude_shooting = 17.176847098130985;
}  // namespace regression

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline Parameters default_params() { return Parameters::make(4, 2.5, 1.0, 1.0); }

inline const GridPtr& default_grid() {
  static const GridPtr g = make_grid(4, 4096, 40.0);
  return g;
}

// The d = 4 ground state on the default grid, computed once per test binary.
inline const GroundStateResult& default_ground() {
  static const GroundStateResult g = minimize_nehari(default_params(), default_grid());
  return g;
}

// Sum of one to three Gaussian shells with seeded random centres, widths and amplitudes.
inline RealRadialField random_bump(const GridPtr& grid, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int shells = 1 + static_cast<int>(gen() % 3);
  double c[3], w[3], a[3];
  for (int k = 0; k < shells; ++k) {
    c[k] = 3.0 * unit(gen);
    w[k] = 0.3 + 0.7 * unit(gen);
    a[k] = 0.5 + 1.5 * unit(gen);
  }
  return RealRadialField::sample(grid, [&](double r) {
    double v = 0.0;
    for (int k = 0; k < shells; ++k) v += a[k] * std::exp(-std::pow((r - c[k]) / w[k], 2));
    return v;
  });
}

}  // namespace critnls::testing
