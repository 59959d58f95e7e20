#include <algorithm>
#include <cmath>
#include <sstream>

#include "critnls/ode.hpp"
#include "critnls/grid.hpp"
#include "groundstate_detail.hpp"

namespace critnls {

namespace {

double source(const Parameters& q, double Q) {
  const double a = std::abs(Q);
  return q.omega * Q - q.mu * std::pow(a, q.p - 1.0) * Q - std::pow(a, q.two_star() - 2.0) * Q;
}

using Shooter = DormandPrince<2>;
// Profile, slope and the running integrals mass, grad2, lp1, lcrit.
using Sampler = DormandPrince<6>;

Shooter::Rhs radial_rhs(const Parameters& q) {
  return [q](double r, const Shooter::State& y) -> Shooter::State {
    return {y[1], source(q, y[0]) - (q.d - 1.0) / r * y[1]};
  };
}

Sampler::Rhs sampling_rhs(const Parameters& q) {
  const double s = unit_sphere_area(q.d);
  return [q, s](double r, const Sampler::State& y) -> Sampler::State {
    const double a = std::abs(y[0]);
    const double wr = s * std::pow(r, q.d - 1);
    return {y[1], source(q, y[0]) - (q.d - 1.0) / r * y[1], wr * a * a, wr * y[1] * y[1],
            wr * std::pow(a, q.p + 1.0), wr * std::pow(a, q.two_star())};
  };
}

template <class State>
State series_start(const Parameters& q, double a, double r0) {
  const double f = source(q, a);
  State y{};
  y[0] = a + f * r0 * r0 / (2.0 * q.d);
  y[1] = f * r0 / q.d;
  return y;
}

template <class State>
ShotOutcome classify_state(const State& y) {
  if (y[0] < 0.0) return ShotOutcome::overshoot;
  if (y[1] > 0.0) return ShotOutcome::undershoot;
  return ShotOutcome::undecided;
}

}  // namespace

Shot shoot_once(const Parameters& q, double a, const ShootOptions& o) {
  Shooter ode;
  ode.rtol = o.rtol;
  ode.atol = o.atol;
  auto y = series_start<Shooter::State>(q, a, o.r0);
  double h = 1e-3 * o.r0;
  Shot shot;
  const double r = ode.advance(radial_rhs(q), o.r0, o.r_end, y, h, [&](double, const Shooter::State& s) {
    return classify_state(s) != ShotOutcome::undecided;
  });
  shot.outcome = classify_state(y);
  shot.r_event = r;
  return shot;
}

Bracket find_bracket(const Parameters& q, double a_min, double a_max, std::size_t count, const ShootOptions& o) {
  ShotOutcome prev = ShotOutcome::undecided;
  double prev_a = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double a = a_min * std::pow(a_max / a_min, static_cast<double>(k) / static_cast<double>(count - 1));
    const ShotOutcome out = shoot_once(q, a, o).outcome;
    if (k > 0 && prev != ShotOutcome::undecided && out != ShotOutcome::undecided && out != prev)
      return {prev_a, a};
    prev = out;
    prev_a = a;
  }
  std::ostringstream os;
  os << "no amplitude in [" << a_min << ", " << a_max << "] separates overshoot from undershoot";
  throw Error(ErrorKind::bracket, os.str());
}

GroundStateResult shoot_radial(const Parameters& q, const GridPtr& grid, const Bracket& b, const ShootOptions& o) {
  double lo = b.lo, hi = b.hi;
  const ShotOutcome out_lo = shoot_once(q, lo, o).outcome;
  const ShotOutcome out_hi = shoot_once(q, hi, o).outcome;
  if (out_lo == ShotOutcome::undecided || out_hi == ShotOutcome::undecided || out_lo == out_hi) {
    std::ostringstream os;
    os << "bracket [" << lo << ", " << hi << "] has no overshoot/undershoot sign difference";
    throw Error(ErrorKind::bracket, os.str());
  }
  std::size_t it = 0;
  bool converged = false;
  for (; it < o.max_bisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      converged = true;
      break;
    }
    const ShotOutcome m = shoot_once(q, mid, o).outcome;
    if (m == ShotOutcome::undecided) {
      lo = hi = mid;
      converged = true;
      break;
    }
    (m == out_lo ? lo : hi) = mid;
  }
  const double a = out_lo == ShotOutcome::undershoot ? lo : hi;

  // Sample the undershooting trajectory node by node; past the turning point the
  // profile is continued by the linearised decay e^{-sqrt(w) r} r^{-(d-1)/2}.
  const auto& r = grid->nodes();
  std::vector<double> Q(r.size(), 0.0);
  Q[0] = a;
  Sampler ode;
  ode.rtol = o.rtol;
  ode.atol = o.atol;
  ode.controlled = 2;
  auto y = series_start<Sampler::State>(q, a, o.r0);
  double h = 1e-3 * o.r0;
  double rr = o.r0;
  std::vector<NormSet> running(r.size());
  std::size_t last = r.size() - 1;
  bool turned = false;
  for (std::size_t i = 1; i < r.size(); ++i) {
    rr = ode.advance(sampling_rhs(q), rr, r[i], y, h,
                     [&](double, const Sampler::State& s) { return classify_state(s) != ShotOutcome::undecided; });
    if (rr < r[i] || classify_state(y) != ShotOutcome::undecided) {
      last = i - 1;
      turned = true;
      break;
    }
    Q[i] = y[0];
    running[i] = {y[2], y[3], y[4], y[5]};
  }
  NormSet continuum = running[last];
  if (turned) {
    const double k = std::sqrt(q.omega);
    const double cut_r = std::max(r[1], r[last] - 5.0 / k);
    std::size_t c = static_cast<std::size_t>(cut_r / grid->spacing());
    c = std::clamp<std::size_t>(c, 1, last);
    const double rc = r[c], Qc = Q[c];
    for (std::size_t i = c + 1; i < r.size(); ++i)
      Q[i] = Qc * std::pow(rc / r[i], 0.5 * (q.d - 1.0)) * std::exp(-k * (r[i] - rc));
    // Integrals up to the cut plus the continued tail by grid quadrature.
    continuum = running[c];
    for (std::size_t i = c + 1; i < r.size(); ++i) {
      const double w = grid->weight(i), v = Q[i];
      continuum.mass += w * v * v;
      continuum.lp1 += w * std::pow(v, q.p + 1.0);
      continuum.lcrit += w * std::pow(v, q.two_star());
      const double dv = -v * (k + 0.5 * (q.d - 1.0) / r[i]);
      continuum.grad2 += w * dv * dv;
    }
  }
  Q.back() = 0.0;
  return finalize_shooting(q, RealRadialField(grid, std::move(Q)), continuum, o, it, converged);
}

}  // namespace critnls
