#pragma once

#include <vector>

namespace critnls {

// n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int n = 20);

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < x_.size(); ++k) s += w_[k] * f(c + h * x_[k]);
    return h * s;
  }

  // Composite rule over consecutive breakpoints.
  template <class F>
  double integrate(F&& f, const std::vector<double>& breaks) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) s += integrate(f, breaks[i], breaks[i + 1]);
    return s;
  }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& weights() const { return w_; }

 private:
  std::vector<double> x_, w_;
};

// Breakpoints 0, s/64, s/32, ..., geometric by factor 2 through the scale s, then up to b,
// with every extra point in `also` inserted if it lies inside (0, b).
std::vector<double> geometric_breaks(double scale, double b, const std::vector<double>& also = {});

}  // namespace critnls
