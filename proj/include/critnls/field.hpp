#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "critnls/errors.hpp"
#include "critnls/grid.hpp"

namespace critnls {

template <class T>
inline bool is_finite_value(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return std::isfinite(v);
  } else {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }
}

// Samples of a radial profile on a grid. The value at r = 0 is stored explicitly;
// the derivative stencil reflects evenly across the origin, and the last node is
// the decay clamp u(r_max) = 0 whenever the field comes from a sampler.
template <class T>
class RadialField {
 public:
  using value_type = T;

  RadialField() = default;

  RadialField(GridPtr grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw Error(ErrorKind::invalid_field, "field without grid");
    if (values_.size() != grid_->size())
      throw Error(ErrorKind::invalid_field, "field length " + std::to_string(values_.size()) +
                                                " does not match grid size " + std::to_string(grid_->size()));
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!is_finite_value(values_[i]))
        throw Error(ErrorKind::invalid_field, "non-finite sample at node " + std::to_string(i));
  }

  static RadialField zeros(GridPtr grid) {
    std::vector<T> v(grid->size(), T{});
    return RadialField(std::move(grid), std::move(v));
  }

  template <class F>
  static RadialField sample(GridPtr grid, F&& f) {
    std::vector<T> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<T>(f(grid->r(i)));
    v.back() = T{};
    return RadialField(std::move(grid), std::move(v));
  }

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const T> values() const { return values_; }
  const std::vector<T>& data() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const T& operator[](std::size_t i) const { return values_[i]; }

 private:
  GridPtr grid_;
  std::vector<T> values_;
};

using RealRadialField = RadialField<double>;
using ComplexRadialField = RadialField<std::complex<double>>;

ComplexRadialField to_complex(const RealRadialField& u);
RealRadialField modulus(const ComplexRadialField& psi);

}  // namespace critnls
