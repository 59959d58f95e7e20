#pragma once

#include <complex>
#include <span>
#include <vector>

#include "critnls/band.hpp"
#include "critnls/grid.hpp"

namespace critnls::discrete {

// The unknowns of the solvers are the interior nodes 1..N-2. The origin value is
// slaved to them by an even sixth-order extrapolation and the last node is zero.
inline constexpr double origin_c1 = 1.5;
inline constexpr double origin_c2 = -0.6;
inline constexpr double origin_c3 = 0.1;

template <class T>
T origin_value(const T& u1, const T& u2, const T& u3) {
  return origin_c1 * u1 + origin_c2 * u2 + origin_c3 * u3;
}

template <class T>
std::vector<T> expand(std::span<const T> reduced) {
  std::vector<T> u(reduced.size() + 2, T{});
  std::copy(reduced.begin(), reduced.end(), u.begin() + 1);
  u[0] = origin_value(u[1], u[2], u[3]);
  return u;
}

template <class T>
std::vector<T> restrict_to_interior(std::span<const T> full) {
  return std::vector<T>(full.begin() + 1, full.end() - 1);
}

// Fourth-order staggered derivative at the N-1 midpoints r_{j+1/2}.
template <class T>
std::vector<T> midpoint_derivative(const RadialGrid& g, std::span<const T> u) {
  const std::size_t n = u.size();
  const double c = 1.0 / (24.0 * g.spacing());
  auto at = [&](std::ptrdiff_t k) -> T {
    if (k < 0) return u[static_cast<std::size_t>(-k)];
    if (k >= static_cast<std::ptrdiff_t>(n)) return 2.0 * u[n - 1] - u[n - 2];
    return u[static_cast<std::size_t>(k)];
  };
  std::vector<T> du(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const auto k = static_cast<std::ptrdiff_t>(j);
    du[j] = c * (at(k - 1) - 27.0 * at(k) + 27.0 * at(k + 1) - at(k + 2));
  }
  return du;
}

template <class T>
double dirichlet_energy(const RadialGrid& g, std::span<const T> u) {
  const auto du = midpoint_derivative(g, u);
  const auto& wm = g.midpoint_weights();
  double s = 0.0;
  for (std::size_t j = 0; j < du.size(); ++j) s += wm[j] * std::norm(du[j]);
  return s;
}

inline double integrate(const RadialGrid& g, std::span<const double> f) {
  const auto& w = g.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

// Stiffness A = P^T D^T Omega D P on the interior unknowns (symmetric, bandwidth 3),
// so that grad2(expand(v)) = v^T A v.
BandMatrix<double> stiffness(const RadialGrid& g);

// Interior quadrature weights (the diagonal mass matrix).
std::vector<double> interior_mass(const RadialGrid& g);

// A v for the interior unknowns.
template <class T>
std::vector<T> apply_stiffness(const BandMatrix<double>& a, std::span<const T> v) {
  const std::size_t n = v.size();
  std::vector<T> y(n, T{});
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a.row(i);
    T s{};
    if (i >= 3 && i + 3 < n) {
      const T* x = v.data() + (i - 3);
      for (std::size_t k = 0; k < 7; ++k) s += row[k] * x[k];
    } else {
      const std::size_t j0 = i >= 3 ? i - 3 : 0;
      const std::size_t j1 = std::min(n - 1, i + 3);
      for (std::size_t j = j0; j <= j1; ++j) s += row[j + 3 - i] * v[j];
    }
    y[i] = s;
  }
  return y;
}

}  // namespace critnls::discrete
