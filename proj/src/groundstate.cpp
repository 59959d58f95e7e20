#include "critnls/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "critnls/band.hpp"
#include "critnls/discrete.hpp"
#include "groundstate_detail.hpp"

namespace critnls {

namespace {

// Discrete elliptic problem on the interior unknowns.
struct EllipticSystem {
  GridPtr grid;
  Parameters q;
  BandMatrix<double> A;
  std::vector<double> M;

  EllipticSystem(GridPtr g, const Parameters& params)
      : grid(std::move(g)), q(params), A(discrete::stiffness(*grid)), M(discrete::interior_mass(*grid)) {}

  double nonlinearity(double v) const {
    const double a = std::abs(v);
    return q.mu * std::pow(a, q.p - 1.0) * v + std::pow(a, q.two_star() - 2.0) * v;
  }

  // F(v) = M^{-1} A v + w v - mu |v|^{p-1} v - |v|^{2*-2} v
  std::vector<double> residual(const std::vector<double>& v) const {
    auto f = discrete::apply_stiffness<double>(A, v);
    for (std::size_t i = 0; i < v.size(); ++i) f[i] = f[i] / M[i] + q.omega * v[i] - nonlinearity(v[i]);
    return f;
  }

  double m_norm(const std::vector<double>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += M[i] * f[i] * f[i];
    return std::sqrt(s);
  }

  RealRadialField field(const std::vector<double>& v) const {
    auto u = discrete::expand<double>(v);
    return RealRadialField(grid, std::move(u));
  }

  static std::vector<double> interior(const RealRadialField& u) {
    return discrete::restrict_to_interior<double>(u.values());
  }
};

// Amplitude t > 0 with K(t v) = 0.
double nehari_amplitude(const NormSet& n, const Parameters& q) {
  const double alpha = q.mu * q.d * (q.p - 1.0) / (q.p + 1.0);
  const double ts = q.two_star();
  auto f = [&](double t) {
    return 2.0 * n.grad2 - alpha * std::pow(t, q.p - 1.0) * n.lp1 - 2.0 * std::pow(t, ts - 2.0) * n.lcrit;
  };
  double lo = 1.0, hi = 1.0;
  while (f(lo) <= 0.0) {
    lo *= 0.5;
    if (lo < 1e-12) throw Error(ErrorKind::degenerate, "no Nehari amplitude");
  }
  while (f(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorKind::degenerate, "no Nehari amplitude");
  }
  for (int k = 0; k < 200 && (hi - lo) > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Dilation onto the Nehari manifold followed by an exact amplitude correction.
std::vector<double> project(const EllipticSystem& sys, const std::vector<double>& v) {
  RealRadialField u = sys.field(v);
  const double lam = lambda_star(u, sys.q);
  if (std::abs(lam - 1.0) > 1e-14) u = l2_scale(u, lam);
  std::vector<double> w = EllipticSystem::interior(u);
  const double t = nehari_amplitude(norms(sys.field(w), sys.q), sys.q);
  for (double& x : w) x *= t;
  return w;
}

double h1_inner(const EllipticSystem& sys, const std::vector<double>& a, const std::vector<double>& b) {
  const auto Ab = discrete::apply_stiffness<double>(sys.A, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * (Ab[i] + sys.q.omega * sys.M[i] * b[i]);
  return s;
}

void newton_polish(const EllipticSystem& sys, std::vector<double>& v, std::size_t& iterations) {
  const double ts = sys.q.two_star();
  for (int k = 0; k < 60; ++k) {
    const auto f = sys.residual(v);
    const double res = sys.m_norm(f);
    if (res < 1e-13 * sys.m_norm(v)) break;
    BandMatrix<double> J = sys.A;
    std::vector<double> rhs(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double a = std::abs(v[i]);
      J.at(i, i) += sys.M[i] * (sys.q.omega - sys.q.mu * sys.q.p * std::pow(a, sys.q.p - 1.0) -
                                (ts - 1.0) * std::pow(a, ts - 2.0));
      rhs[i] = -sys.M[i] * f[i];
    }
    const auto dv = BandLU<double>(J).solve(rhs);
    double t = 1.0;
    std::vector<double> trial(v.size());
    bool improved = false;
    while (t > 1e-4) {
      for (std::size_t i = 0; i < v.size(); ++i) trial[i] = v[i] + t * dv[i];
      if (sys.m_norm(sys.residual(trial)) < res) {
        improved = true;
        break;
      }
      t *= 0.5;
    }
    ++iterations;
    if (!improved) break;
    v = trial;
  }
}

GroundStateResult assemble(const EllipticSystem& sys, const RealRadialField& Q, std::string method,
                           double tol_pde_rel, double tol_K, const NormSet* continuum = nullptr) {
  GroundStateResult r;
  r.Q = Q;
  r.method = std::move(method);
  r.report = continuum ? FunctionalReport::from_norms(*continuum, sys.q) : report(Q, sys.q);
  r.m_omega = r.report.S_omega;
  r.m_tilde = r.report.I_omega;
  r.elliptic_residual = elliptic_residual(Q, sys.q);
  r.elliptic_tolerance = tol_pde_rel * sys.q.omega * std::sqrt(r.report.mass);
  r.nehari_residual = r.report.grad2 > 0.0 ? std::abs(r.report.K) / r.report.grad2 : 0.0;
  r.nehari_tolerance = tol_K;
  const double poh = sys.q.omega * r.report.mass -
                     sys.q.mu * (1.0 - sys.q.d * (sys.q.p - 1.0) / (2.0 * (sys.q.p + 1.0))) * r.report.lp1;
  r.pohozaev_residual = r.report.mass > 0.0 ? std::abs(poh) / (sys.q.omega * r.report.mass) : 0.0;
  r.amplitude = Q[0];
  return r;
}

bool residuals_pass(const GroundStateResult& r) {
  return r.elliptic_residual < r.elliptic_tolerance && r.nehari_residual < r.nehari_tolerance &&
         r.pohozaev_residual < r.pohozaev_tolerance &&
         std::abs(r.m_omega - r.m_tilde) <= 1e-6 * std::abs(r.m_omega);
}

}  // namespace

double elliptic_residual(const RealRadialField& Q, const Parameters& q) {
  const EllipticSystem sys(Q.grid_ptr(), q);
  return sys.m_norm(sys.residual(EllipticSystem::interior(Q)));
}

double pohozaev_residual(const RealRadialField& Q, const Parameters& q) {
  const NormSet n = norms(Q, q);
  return q.omega * n.mass - q.mu * (1.0 - q.d * (q.p - 1.0) / (2.0 * (q.p + 1.0))) * n.lp1;
}

GroundStateResult minimize_nehari(const Parameters& q, const GridPtr& grid,
                                  const std::optional<RealRadialField>& initial, const NehariOptions& o) {
  const EllipticSystem sys(grid, q);
  std::vector<double> v;
  if (initial) {
    if (initial->grid_ptr() != grid && initial->size() != grid->size())
      throw Error(ErrorKind::invalid_field, "initial guess lives on a different grid");
    v = EllipticSystem::interior(*initial);
  } else {
    v = EllipticSystem::interior(RealRadialField::sample(grid, [](double r) { return std::exp(-r * r); }));
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
    throw Error(ErrorKind::degenerate, "initial guess is the zero field");

  // Preconditioner: the H1 Riesz map (A + w M)^{-1}.
  BandMatrix<double> P = sys.A;
  for (std::size_t i = 0; i < v.size(); ++i) P.at(i, i) += q.omega * sys.M[i];
  const BandLU<double> precond(P);

  const double ts = q.two_star();
  std::size_t it = 0;
  std::string message = "descent stationary";
  bool collapsed = false;
  double eta = 0.25;
  try {
    v = project(sys, v);
    double S = action(norms(sys.field(v), q), q);
    for (; it < o.max_iterations; ++it) {
      if (o.rearrange_every > 0 && it > 0 && it % o.rearrange_every == 0) {
        v = project(sys, EllipticSystem::interior(schwarz_rearrange(sys.field(v))));
        S = action(norms(sys.field(v), q), q);
      }
      const auto f = sys.residual(v);
      const auto Av = discrete::apply_stiffness<double>(sys.A, v);
      std::vector<double> gS(v.size()), gK(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        gS[i] = 2.0 * sys.M[i] * f[i];
        gK[i] = 4.0 * Av[i] - q.mu * q.d * (q.p - 1.0) * sys.M[i] * std::pow(a, q.p - 1.0) * v[i] -
                2.0 * ts * sys.M[i] * std::pow(a, ts - 2.0) * v[i];
      }
      const auto g = precond.solve(gS);
      const auto k = precond.solve(gK);
      const double gk = std::inner_product(g.begin(), g.end(), gK.begin(), 0.0);
      const double kk = std::inner_product(k.begin(), k.end(), gK.begin(), 0.0);
      std::vector<double> dir(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) dir[i] = g[i] - (gk / kk) * k[i];
      const double slope = std::inner_product(gS.begin(), gS.end(), dir.begin(), 0.0);
      const double dnorm = std::sqrt(std::max(0.0, h1_inner(sys, dir, dir)));
      const double vnorm = std::sqrt(h1_inner(sys, v, v));
      if (dnorm < o.descent_tolerance * vnorm || slope <= 0.0) {
        message = "projected gradient below tolerance";
        break;
      }
      eta = std::min(1.0, 2.0 * eta);
      bool accepted = false;
      while (eta > 1e-14) {
        std::vector<double> trial(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) trial[i] = v[i] - eta * dir[i];
        trial = project(sys, trial);
        const double St = action(norms(sys.field(trial), q), q);
        if (St <= S - o.armijo * eta * slope) {
          v = std::move(trial);
          S = St;
          accepted = true;
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) {
        message = "line search stagnated";
        break;
      }
    }
    if (it >= o.max_iterations) message = "iteration cap reached";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::resolution && e.kind() != ErrorKind::degenerate) throw;
    collapsed = true;
    message = std::string("descent left the resolvable range: ") + e.what();
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
    throw Error(ErrorKind::degenerate, "iterate collapsed to the zero field");

  std::size_t newton_steps = 0;
  if (o.newton_polish && !collapsed) newton_polish(sys, v, newton_steps);

  GroundStateResult r = assemble(sys, sys.field(v), "nehari-descent", o.tol_pde, o.tol_K);
  r.iterations = it + newton_steps;
  r.converged = !collapsed && residuals_pass(r);
  r.message = message + (r.converged ? "" : "; residual tolerances not met");
  return r;
}

GroundStateResult finalize_shooting(const Parameters& q, const RealRadialField& Q, const NormSet& continuum,
                                    const ShootOptions& o, std::size_t iterations, bool bisection_converged) {
  const EllipticSystem sys(Q.grid_ptr(), q);
  GroundStateResult r = assemble(sys, Q, "shooting", o.tol_pde, o.tol_K, &continuum);
  r.iterations = iterations;
  r.converged = bisection_converged && residuals_pass(r);
  r.message = bisection_converged ? "bisection converged" : "bisection budget exhausted";
  return r;
}

}  // namespace critnls
