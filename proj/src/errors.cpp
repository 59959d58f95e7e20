#include "critnls/errors.hpp"

namespace critnls {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::invalid_field: return "invalid-field";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::degenerate: return "degenerate-field";
    case ErrorKind::bracket: return "bracket";
    case ErrorKind::integrator: return "integrator";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

}  // namespace critnls
