#include "critnls/field.hpp"

namespace critnls {

ComplexRadialField to_complex(const RealRadialField& u) {
  std::vector<std::complex<double>> v(u.values().begin(), u.values().end());
  return ComplexRadialField(u.grid_ptr(), std::move(v));
}

RealRadialField modulus(const ComplexRadialField& psi) {
  std::vector<double> v(psi.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(psi[i]);
  return RealRadialField(psi.grid_ptr(), std::move(v));
}

}  // namespace critnls
