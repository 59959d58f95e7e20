#pragma once

#include "critnls/groundstate.hpp"

namespace critnls {

GroundStateResult finalize_shooting(const Parameters& q, const RealRadialField& Q, const NormSet& continuum,
                                    const ShootOptions& o,
                                    std::size_t iterations, bool bisection_converged);

}  // namespace critnls
