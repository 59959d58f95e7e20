#include "critnls/discrete.hpp"

#include <array>
#include <utility>

namespace critnls::discrete {

BandMatrix<double> stiffness(const RadialGrid& g) {
  const std::size_t nn = g.size();
  const std::size_t n = nn - 2;
  BandMatrix<double> a(n, 3, 3);
  const double c = 1.0 / (24.0 * g.spacing());
  const std::array<double, 4> stencil = {c, -27.0 * c, 27.0 * c, -c};
  const auto& om = g.midpoint_weights();

  for (std::size_t j = 0; j + 1 < nn; ++j) {
    // Row of D expressed on grid nodes, then folded onto interior unknowns.
    std::array<std::pair<std::ptrdiff_t, double>, 12> terms{};
    std::size_t count = 0;
    auto add_node = [&](std::ptrdiff_t node, double coef) {
      if (node == static_cast<std::ptrdiff_t>(nn - 1)) return;  // clamped to zero
      if (node == 0) {
        terms[count++] = {0, coef * origin_c1};
        terms[count++] = {1, coef * origin_c2};
        terms[count++] = {2, coef * origin_c3};
        return;
      }
      terms[count++] = {node - 1, coef};
    };
    for (std::size_t k = 0; k < 4; ++k) {
      const auto node = static_cast<std::ptrdiff_t>(j) - 1 + static_cast<std::ptrdiff_t>(k);
      if (node < 0) {
        add_node(-node, stencil[k]);
      } else if (node >= static_cast<std::ptrdiff_t>(nn)) {
        add_node(static_cast<std::ptrdiff_t>(nn - 2), -stencil[k]);
        add_node(static_cast<std::ptrdiff_t>(nn - 1), 2.0 * stencil[k]);
      } else {
        add_node(node, stencil[k]);
      }
    }
    for (std::size_t x = 0; x < count; ++x)
      for (std::size_t y = 0; y < count; ++y) {
        const auto i = static_cast<std::size_t>(terms[x].first);
        const auto k = static_cast<std::size_t>(terms[y].first);
        a.at(i, k) += om[j] * terms[x].second * terms[y].second;
      }
  }
  return a;
}

std::vector<double> interior_mass(const RadialGrid& g) {
  const auto& w = g.weights();
  return std::vector<double>(w.begin() + 1, w.end() - 1);
}

}  // namespace critnls::discrete
