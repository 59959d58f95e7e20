#include <algorithm>
#include <cmath>

#include "critnls/groundstate.hpp"

namespace critnls {

PohozaevWeight PohozaevWeight::build(const GridPtr& grid) {
  PohozaevWeight w;
  w.grid = grid;
  const auto& r = grid->nodes();
  w.g.resize(r.size());
  w.g1.resize(r.size());
  w.g3.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double e = std::exp(-2.0 * r[i]);
    w.g[i] = -0.5 * std::expm1(-2.0 * r[i]);
    w.g1[i] = e;
    w.g3[i] = 4.0 * e;
  }
  return w;
}

double PohozaevWeight::max_ode_defect() const {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(g3[i] - 4.0 * g1[i]));
  return m;
}

ProbeRow probe_terms(const RealRadialField& u, const Parameters& q) {
  if (q.d != 3) throw Error(ErrorKind::domain, "the probe identity is three-dimensional");
  const GridPtr& grid = u.grid_ptr();
  const PohozaevWeight pw = PohozaevWeight::build(grid);
  // One-dimensional quadrature weights on [0, r_max]: the d = 1 grid weights carry the factor 2.
  const RadialGrid line(1, grid->size(), grid->r_max());
  const auto& r = grid->nodes();
  const double p = q.p;
  const double ca = (p - 1.0) / (p + 1.0), cb = (p + 3.0) / (2.0 * (p + 1.0));
  // With phi = r u the weights r^{-p} |phi|^{p+1} = r |u|^{p+1} and r^{-5} phi^6 = r u^6 are regular at 0.
  double J = 0.0, B = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double tau = 0.5 * line.weight(i);
    const double a = std::abs(u[i]);
    const double rg1 = r[i] * pw.g1[i];
    J += tau * (ca * pw.g[i] - cb * rg1) * r[i] * std::pow(a, p + 1.0);
    B += tau * (pw.g[i] - rg1) * r[i] * std::pow(a, 6.0);
  }
  B *= 2.0 / 3.0;

  ProbeRow row;
  row.mu = q.mu;
  row.J = J;
  row.A = q.mu * J;
  row.B = B;
  const FunctionalReport rep = report(u, q);
  row.h1 = std::sqrt(rep.mass + rep.grad2);
  row.l6 = rep.lcrit;
  row.C_A = row.h1 > 0.0 ? std::abs(J) / std::pow(row.h1, p + 1.0) : 0.0;
  row.B_ratio = rep.lcrit > 0.0 ? B / rep.lcrit : 0.0;
  row.residual_sum = B > 0.0 ? std::abs(row.A + B) / B : 0.0;
  row.m_tilde = rep.I_omega;

  const double umax = *std::max_element(u.values().begin(), u.values().end());
  for (std::size_t i = 1; i < r.size(); ++i)
    if (u[i] <= 0.5 * umax) {
      const double t = (u[i - 1] - 0.5 * umax) / (u[i - 1] - u[i]);
      row.core_width = r[i - 1] + t * (r[i] - r[i - 1]);
      break;
    }

  // Mu-dependent bound for minimisers: I_w(u) <= I_w(T_lambda chi) and I_w >= min(w, c1) ||u||_{H1}^2.
  const RealRadialField chi = RealRadialField::sample(grid, [](double x) { return std::exp(-x * x); });
  const NormSet nc = norms(chi, q);
  const double lam = lambda_star(nc, q);
  const double c1 = (q.d * (p - 1.0) - 4.0) / (q.d * (p - 1.0));
  row.h1_bound = FunctionalReport::from_norms(nc.scaled(lam, q), q).I_omega / std::min(q.omega, c1);
  return row;
}

ProbeTable probe_3d(const Parameters& base, const std::vector<double>& mus, const GridPtr& grid,
                    const NehariOptions& options) {
  if (base.d != 3) throw Error(ErrorKind::domain, "probe_3d requires d = 3");
  ProbeTable table;
  table.base = base;
  for (double mu : mus) {
    Parameters q = base;
    q.mu = mu;
    Parameters::validate(q);
    const GroundStateResult gs = minimize_nehari(q, grid, std::nullopt, options);
    ProbeRow row = probe_terms(gs.Q, q);
    row.converged = gs.converged;
    row.inconclusive = !gs.converged;
    row.message = gs.message;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace critnls
