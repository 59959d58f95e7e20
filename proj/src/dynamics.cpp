#include "critnls/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "critnls/discrete.hpp"

namespace critnls {

const char* to_string(Membership m) {
  switch (m) {
    case Membership::A_minus: return "A_minus";
    case Membership::A_plus: return "A_plus";
    case Membership::boundary_or_outside: return "boundary_or_outside";
  }
  return "unknown";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::global_horizon: return "global-horizon";
    case Verdict::blow_up: return "blow-up";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

SetMembership classify_report(const FunctionalReport& rep, const GroundStateResult& ground, double tol) {
  if (!ground.converged)
    throw Error(ErrorKind::convergence, "classification needs a converged ground state (" + ground.message + ")");
  SetMembership s;
  s.S_omega = rep.S_omega;
  s.K = rep.K;
  s.m_omega = ground.m_omega;
  const bool on_level = std::abs(rep.S_omega - ground.m_omega) <= tol * std::abs(ground.m_omega);
  const bool on_nehari = std::abs(rep.K) <= tol * rep.grad2;
  if (on_level || on_nehari || !(rep.S_omega < ground.m_omega)) {
    s.kind = Membership::boundary_or_outside;
  } else {
    s.kind = rep.K < 0.0 ? Membership::A_minus : Membership::A_plus;
  }
  return s;
}

}  // namespace

SetMembership classify(const RealRadialField& u, const GroundStateResult& ground, const Parameters& q, double tol) {
  return classify_report(report(u, q), ground, tol);
}

SetMembership classify(const ComplexRadialField& psi, const GroundStateResult& ground, const Parameters& q,
                       double tol) {
  return classify_report(report(psi, q), ground, tol);
}

SplitStepIntegrator::SplitStepIntegrator(GridPtr grid, Parameters params, StepControl control, bool linear_only)
    : grid_(std::move(grid)), params_(params), control_(control), linear_only_(linear_only),
      A_(discrete::stiffness(*grid_)), M_(discrete::interior_mass(*grid_)) {}

const BandLU<cplx>& SplitStepIntegrator::factor(double dt) const {
  auto it = cache_.find(dt);
  if (it != cache_.end()) return it->second;
  if (cache_.size() >= 48) cache_.clear();
  const std::size_t n = M_.size();
  BandMatrix<cplx> m(n, 3, 3);
  const cplx c(0.0, dt / 4.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i >= 3 ? i - 3 : 0;
    const std::size_t j1 = std::min(n - 1, i + 3);
    for (std::size_t j = j0; j <= j1; ++j) m.at(i, j) = c * A_.at(i, j);
    m.at(i, i) += M_[i];
  }
  return cache_.emplace(dt, BandLU<cplx>(m)).first->second;
}

namespace {

// e^{i theta}; the short series is exact to rounding for the small angles of a step.
inline cplx cis(double theta) {
  if (std::abs(theta) < 0.02) {
    const double t2 = theta * theta;
    const double c = 1.0 - t2 * (0.5 - t2 * (1.0 / 24.0 - t2 * (1.0 / 720.0)));
    const double s = theta * (1.0 - t2 * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0))));
    return {c, s};
  }
  return {std::cos(theta), std::sin(theta)};
}

}  // namespace

double SplitStepIntegrator::rate(double a2) const {
  if (a2 == 0.0) return 0.0;
  const double crit = params_.d == 4 ? a2 : std::pow(a2, 0.5 * params_.critical_power());
  const double half_pm = 0.5 * (params_.p - 1.0);
  const double sub = half_pm == 0.75 ? std::sqrt(a2 * std::sqrt(a2)) : std::pow(a2, half_pm);
  return params_.mu * sub + crit;
}

void SplitStepIntegrator::phase(std::vector<cplx>& v, double dt) const {
  if (linear_only_) return;
  const double c = 0.25 * dt;
  for (auto& z : v) z *= cis(c * rate(std::norm(z)));
}

void SplitStepIntegrator::linear(std::vector<cplx>& v, double dt) const {
  // (M + i dt/4 A) v' = (M - i dt/4 A) v
  const auto Av = discrete::apply_stiffness<cplx>(A_, v);
  const cplx c(0.0, dt / 4.0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = M_[i] * v[i] - c * Av[i];
  factor(dt).solve_in_place(v);
}

void SplitStepIntegrator::trial(const std::vector<cplx>& v0, double dt, std::vector<cplx>& big,
                                std::vector<cplx>& half) const {
  // The opening half steps of the single step and of the pair act on the same modulus.
  // The inner half steps of the pair combine into one rotation of size dt/2.
  big = v0;
  half = v0;
  if (!linear_only_) {
    const double c = 0.125 * dt;
    for (std::size_t i = 0; i < v0.size(); ++i) {
      const cplx e = cis(c * rate(std::norm(v0[i])));
      half[i] *= e;
      big[i] *= e * e;
    }
  }
  linear(big, dt);
  phase(big, dt);
  const double h = 0.5 * dt;
  linear(half, h);
  phase(half, dt);
  linear(half, h);
  phase(half, h);
}

std::vector<cplx> SplitStepIntegrator::strang(const std::vector<cplx>& v0, double dt) const {
  std::vector<cplx> v = v0;
  phase(v, dt);
  linear(v, dt);
  phase(v, dt);
  return v;
}

ComplexRadialField SplitStepIntegrator::strang(const ComplexRadialField& psi, double dt) const {
  auto v = strang(discrete::restrict_to_interior<cplx>(psi.values()), dt);
  return ComplexRadialField(grid_, discrete::expand<cplx>(v));
}

double SplitStepIntegrator::m_norm(const std::vector<cplx>& v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += M_[i] * std::norm(v[i]);
  return std::sqrt(s);
}

double SplitStepIntegrator::snap(double dt) const {
  if (!control_.quantize) return dt;
  const double k = std::floor(8.0 * std::log2(dt) + 1e-9);
  return std::exp2(k / 8.0);
}

bool SplitStepIntegrator::step(SimulationState& state, double t_stop) const {
  auto v = discrete::restrict_to_interior<cplx>(state.psi.values());
  const double norm = m_norm(v);
  std::vector<cplx> big, half;
  double proposal = std::clamp(state.dt, control_.dt_min, control_.dt_max);
  while (true) {
    const double remaining = t_stop - state.t;
    if (remaining <= 0.0) return true;
    double dt = snap(proposal);
    if (dt >= remaining * (1.0 - 1e-12)) dt = remaining;
    if (dt < control_.dt_min && dt < remaining) {
      state.dt_floor_hit = true;
      state.dt = dt;
      return false;
    }
    trial(v, dt, big, half);
    double diff = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) diff += M_[i] * std::norm(big[i] - half[i]);
    const double err = std::sqrt(diff) / (3.0 * norm);
    const double fac = err > 0.0 ? std::clamp(control_.safety * std::cbrt(control_.tolerance / err), 0.2, 2.0) : 2.0;
    if (std::isfinite(err) && err <= control_.tolerance) {
      state.psi = ComplexRadialField(grid_, discrete::expand<cplx>(half));
      state.t = (dt == remaining) ? t_stop : state.t + dt;
      state.last_error = err;
      // A step clipped to t_stop keeps the pending proposal for the next interval.
      state.dt = std::min(dt == remaining ? std::max(proposal, dt) : dt * fac, control_.dt_max);
      ++state.accepted;
      return true;
    }
    ++state.rejected;
    proposal = dt * (std::isfinite(err) ? fac : 0.2);
  }
}

TrajectoryRecord evolve(const ComplexRadialField& psi0, const Parameters& q, double horizon,
                        const GroundStateResult* ground, const EvolveOptions& o) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw Error(ErrorKind::domain, "horizon must be finite and nonnegative");
  if (!(o.sample_interval > 0.0) || !std::isfinite(o.sample_interval))
    throw Error(ErrorKind::domain, "sample interval must be positive");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const GridPtr& grid = psi0.grid_ptr();
  SplitStepIntegrator integ(grid, q, o.control, o.linear_only);

  TrajectoryRecord rec;
  rec.params = q;
  rec.horizon = horizon;
  rec.observer_columns = o.observer_columns;

  const auto& r = grid->nodes();
  const auto& w = grid->weights();
  const double r_edge = o.boundary_fraction * grid->r_max();
  auto sample = [&](const ComplexRadialField& psi, double t, double dt) {
    TrajectorySample s;
    s.t = t;
    s.dt = dt;
    const FunctionalReport rep = report(psi, q);
    s.mass = rep.mass;
    s.grad2 = rep.grad2;
    s.H = o.linear_only ? rep.grad2 : rep.H;
    s.S_omega = o.linear_only ? q.omega * rep.mass + rep.grad2 : rep.S_omega;
    s.K = o.linear_only ? 2.0 * rep.grad2 : rep.K;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] > r_edge) s.boundary_mass += w[i] * std::norm(psi[i]);
    if (o.observer) {
      s.extras = o.observer(psi);
      if (!s.extras.empty()) s.M_R = s.extras.front();
    }
    return s;
  };

  SimulationState state;
  state.psi = psi0;
  state.dt = o.control.dt_initial;
  rec.samples.push_back(sample(psi0, 0.0, state.dt));
  const TrajectorySample first = rec.samples.front();
  if (ground) rec.membership = classify(psi0, *ground, q);
  const double m_omega = ground ? ground->m_omega : std::nan("");

  auto check_sample = [&](const TrajectorySample& s) {
    rec.max_mass_drift = std::max(rec.max_mass_drift, std::abs(s.mass - first.mass) / first.mass);
    rec.max_H_drift = std::max(rec.max_H_drift, std::abs(s.H - first.H) / (std::abs(first.H) + first.grad2));
    rec.max_S_drift = std::max(rec.max_S_drift, std::abs(s.S_omega - first.S_omega) / std::abs(first.S_omega));
    rec.max_boundary_mass = std::max(rec.max_boundary_mass, s.boundary_mass / first.mass);
    if (!(s.K < 0.0)) rec.K_negative_throughout = false;
    if (!(s.K > 0.0)) rec.K_positive_throughout = false;
    if (ground && !(s.K < first.S_omega - m_omega)) rec.K_bound_throughout = false;
  };
  check_sample(first);

  double next_sample = o.sample_interval;
  bool done = false;
  std::size_t steps = 0;
  while (!done) {
    const double t_stop = std::min(next_sample, horizon);
    const bool ok = integ.step(state, t_stop);
    ++steps;
    const double g2 = discrete::dirichlet_energy(*grid, state.psi.values());
    if (!ok || g2 > o.blowup_growth * first.grad2 || !std::isfinite(g2)) {
      TrajectorySample s = sample(state.psi, state.t, state.dt);
      rec.samples.push_back(s);
      check_sample(s);
      if (rec.max_mass_drift > o.mass_tolerance) {
        rec.verdict = Verdict::inconclusive;
        rec.reason = "mass drift exceeded tolerance at the blow-up signal";
      } else {
        rec.verdict = Verdict::blow_up;
        rec.reason = ok ? "grad2 exceeded growth threshold" : "time step reached the floor";
      }
      break;
    }
    if (state.t >= t_stop) {
      TrajectorySample s = sample(state.psi, state.t, state.dt);
      rec.samples.push_back(s);
      check_sample(s);
      if (rec.max_mass_drift > o.mass_tolerance) {
        rec.verdict = Verdict::inconclusive;
        rec.reason = "conservation breach";
        break;
      }
      if (rec.max_boundary_mass > o.boundary_tolerance) {
        rec.verdict = Verdict::inconclusive;
        rec.reason = "boundary contamination";
        break;
      }
      if (state.t >= horizon) {
        rec.verdict = Verdict::global_horizon;
        rec.reason = "horizon reached";
        break;
      }
      next_sample = std::min(horizon, next_sample + o.sample_interval);
    }
    if (steps >= o.max_steps) {
      rec.verdict = Verdict::inconclusive;
      rec.reason = "step budget exhausted";
      break;
    }
    if (o.wall_limit_seconds > 0.0 &&
        std::chrono::duration<double>(clock::now() - start).count() > o.wall_limit_seconds) {
      rec.verdict = Verdict::inconclusive;
      rec.reason = "wall-clock limit";
      break;
    }
  }

  rec.t_end = state.t;
  rec.accepted_steps = state.accepted;
  rec.rejected_steps = state.rejected;
  double sup_k = -std::numeric_limits<double>::infinity();
  for (const auto& s : rec.samples) sup_k = std::max(sup_k, s.K);
  rec.epsilon0 = sup_k < 0.0 ? -sup_k : 0.0;

  if (rec.verdict == Verdict::blow_up) {
    // 1/grad2 is close to linear in t for a self-similar collapse.
    std::vector<double> ts, ys;
    for (const auto& s : rec.samples)
      if (s.grad2 > 10.0 * first.grad2) {
        ts.push_back(s.t);
        ys.push_back(1.0 / s.grad2);
      }
    rec.t_blowup_estimate = rec.t_end;
    if (ts.size() >= 3) {
      const double n = static_cast<double>(ts.size());
      double st = 0, sy = 0, stt = 0, sty = 0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i]; sy += ys[i]; stt += ts[i] * ts[i]; sty += ts[i] * ys[i];
      }
      const double b = (n * sty - st * sy) / (n * stt - st * st);
      const double a = (sy - b * st) / n;
      if (b < 0.0) rec.t_blowup_estimate = std::max(rec.t_end, -a / b);
    }
  }
  if (o.keep_final_state) rec.final_state = state.psi;
  rec.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return rec;
}

KBoundDiagnostic k_bound_monitor(const TrajectoryRecord& traj, double m_omega) {
  KBoundDiagnostic d;
  d.applicable = traj.membership && traj.membership->kind == Membership::A_minus && !traj.samples.empty();
  if (!d.applicable) return d;
  const double level = traj.samples.front().S_omega - m_omega;
  d.max_excess = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) d.max_excess = std::max(d.max_excess, s.K - level);
  d.epsilon0 = traj.epsilon0;
  return d;
}

}  // namespace critnls
