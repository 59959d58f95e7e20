#include "critnls/pchip.hpp"

#include <cmath>

namespace critnls {

UniformPchip::UniformPchip(double h, std::vector<double> y) : h_(h), y_(std::move(y)), m_(y_.size(), 0.0) {
  const std::size_t n = y_.size();
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / h_;
  // Even reflection at the origin: zero slope at node 0.
  m_[0] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      m_[i] = 0.0;
    } else {
      m_[i] = 2.0 / (1.0 / delta[i - 1] + 1.0 / delta[i]);
    }
  }
  m_[n - 1] = delta[n - 2];
}

double UniformPchip::operator()(double x) const {
  if (x < 0.0 || x > x_max()) return 0.0;
  const double s = x / h_;
  auto i = static_cast<std::size_t>(s);
  if (i >= y_.size() - 1) i = y_.size() - 2;
  const double t = s - static_cast<double>(i);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y_[i] + h10 * h_ * m_[i] + h01 * y_[i + 1] + h11 * h_ * m_[i + 1];
}

}  // namespace critnls
