#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace critnls {

double unit_sphere_area(int d);

// Uniform radial grid r_i = i h on [0, r_max] with d-dimensional quadrature weights.
// Node weights are trapezoid weights with 8-point Gregory corrections at r_max,
// times s_{d-1} r^{d-1}. Midpoint weights s_{d-1} h r_{j+1/2}^{d-1} integrate the
// staggered gradient.
class RadialGrid {
 public:
  RadialGrid(int d, std::size_t n, double r_max);

  int dim() const { return d_; }
  std::size_t size() const { return r_.size(); }
  double spacing() const { return h_; }
  double r_max() const { return r_.back(); }
  double sphere_area() const { return sphere_; }
  double ball_volume() const;

  const std::vector<double>& nodes() const { return r_; }
  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& midpoints() const { return rm_; }
  const std::vector<double>& midpoint_weights() const { return wm_; }

  double r(std::size_t i) const { return r_[i]; }
  double weight(std::size_t i) const { return w_[i]; }

 private:
  int d_;
  double h_;
  double sphere_;
  std::vector<double> r_, w_, rm_, wm_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(int d, std::size_t n = 4096, double r_max = 40.0);

}  // namespace critnls
