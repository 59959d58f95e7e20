#include "critnls/grid.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "critnls/errors.hpp"

namespace critnls {

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

namespace {

// End corrections c_j (j = 0..7, counted inward from the last node) of the
// Gregory rule: sum_j c_j j^n matches the Euler-Maclaurin moments for n <= 7.
std::array<double, 8> gregory_corrections() {
  constexpr int m = 8;
  std::array<std::array<double, m + 1>, m> a{};
  const std::array<double, m> target = {0.0, 1.0 / 12.0, 0.0, -1.0 / 120.0, 0.0, 1.0 / 252.0, 0.0, -1.0 / 240.0};
  for (int n = 0; n < m; ++n) {
    for (int j = 0; j < m; ++j) a[n][j] = (n == 0) ? 1.0 : std::pow(static_cast<double>(j), n);
    a[n][m] = target[n];
  }
  for (int k = 0; k < m; ++k) {
    int p = k;
    for (int i = k + 1; i < m; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    for (int i = k + 1; i < m; ++i) {
      const double l = a[i][k] / a[k][k];
      for (int j = k; j <= m; ++j) a[i][j] -= l * a[k][j];
    }
  }
  std::array<double, m> c{};
  for (int k = m - 1; k >= 0; --k) {
    double s = a[k][m];
    for (int j = k + 1; j < m; ++j) s -= a[k][j] * c[j];
    c[k] = s / a[k][k];
  }
  return c;
}

}  // namespace

RadialGrid::RadialGrid(int d, std::size_t n, double r_max) : d_(d) {
  if (d < 1) throw Error(ErrorKind::domain, "grid dimension must be positive");
  if (n < 16) throw Error(ErrorKind::domain, "grid needs at least 16 nodes, got " + std::to_string(n));
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw Error(ErrorKind::domain, "r_max must be positive");
  h_ = r_max / static_cast<double>(n - 1);
  sphere_ = unit_sphere_area(d);
  r_.resize(n);
  for (std::size_t i = 0; i < n; ++i) r_[i] = h_ * static_cast<double>(i);
  r_.back() = r_max;

  std::vector<double> tau(n, h_);
  tau.front() *= 0.5;
  tau.back() *= 0.5;
  const auto c = gregory_corrections();
  for (std::size_t j = 0; j < c.size(); ++j) tau[n - 1 - j] += h_ * c[j];

  w_.resize(n);
  for (std::size_t i = 0; i < n; ++i) w_[i] = sphere_ * std::pow(r_[i], d - 1) * tau[i];

  rm_.resize(n - 1);
  wm_.resize(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    rm_[j] = h_ * (static_cast<double>(j) + 0.5);
    wm_[j] = sphere_ * h_ * std::pow(rm_[j], d - 1);
  }
}

double RadialGrid::ball_volume() const { return sphere_ * std::pow(r_max(), d_) / d_; }

GridPtr make_grid(int d, std::size_t n, double r_max) { return std::make_shared<const RadialGrid>(d, n, r_max); }

}  // namespace critnls
