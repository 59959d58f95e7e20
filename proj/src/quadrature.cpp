#include "critnls/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace critnls {

GaussLegendre::GaussLegendre(int n) : x_(n), w_(n) {
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    x_[i] = x;
    w_[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

std::vector<double> geometric_breaks(double scale, double b, const std::vector<double>& also) {
  std::vector<double> br{0.0};
  for (double x = scale / 64.0; x < b; x *= 1.5) br.push_back(x);
  for (double x : also)
    if (x > 0.0 && x < b) br.push_back(x);
  br.push_back(b);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

}  // namespace critnls
