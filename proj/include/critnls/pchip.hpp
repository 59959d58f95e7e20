#pragma once

#include <span>
#include <vector>

namespace critnls {

// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes) on uniform nodes x_i = i h.
class UniformPchip {
 public:
  UniformPchip(double h, std::vector<double> y);
  double operator()(double x) const;  // zero outside [0, x_max]
  double x_max() const { return h_ * static_cast<double>(y_.size() - 1); }

 private:
  double h_;
  std::vector<double> y_, m_;
};

}  // namespace critnls
