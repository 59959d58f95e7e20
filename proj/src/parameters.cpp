#include "critnls/parameters.hpp"

#include <cmath>
#include <sstream>

#include "critnls/errors.hpp"

namespace critnls {

namespace {

[[noreturn]] void reject(const std::string& rule, const Parameters& q) {
  std::ostringstream os;
  os.precision(17);
  os << "rule '" << rule << "' violated (d=" << q.d << ", p=" << q.p << ", mu=" << q.mu
     << ", omega=" << q.omega << ")";
  throw Error(ErrorKind::domain, os.str());
}

}  // namespace

void Parameters::validate(const Parameters& q, Admissibility rules) {
  if (q.d < 3) reject("d >= 3", q);
  if (!std::isfinite(q.p) || !std::isfinite(q.mu) || !std::isfinite(q.omega)) reject("finite parameters", q);
  const double lower = 1.0 + 4.0 / q.d;
  const double upper = q.two_star() - 1.0;
  if (rules.allow_boundary_p) {
    if (q.p < lower) reject("p >= 1 + 4/d", q);
    if (q.p > upper) reject("p <= 2* - 1", q);
  } else {
    if (!(q.p > lower)) reject("p > 1 + 4/d", q);
    if (!(q.p < upper)) reject("p < 2* - 1", q);
  }
  if (!(q.omega > 0.0)) reject("omega > 0", q);
  if (!rules.allow_nonpositive_mu && !(q.mu > 0.0)) reject("mu > 0", q);
}

Parameters Parameters::make(int d, double p, double mu, double omega, Admissibility rules) {
  Parameters q{d, p, mu, omega};
  validate(q, rules);
  return q;
}

double Parameters::default_p(int d) {
  const double lower = 1.0 + 4.0 / d;
  const double upper = 2.0 * d / (d - 2.0) - 1.0;
  return 0.5 * (lower + upper);
}

}  // namespace critnls
