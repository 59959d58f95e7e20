#include "critnls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <sstream>

#include "critnls/discrete.hpp"
#include "critnls/pchip.hpp"

namespace critnls {

NormSet NormSet::scaled(double lambda, const Parameters& q) const {
  const double a = q.d * (q.p - 1.0) / 2.0;
  return {mass, lambda * lambda * grad2, std::pow(lambda, a) * lp1, std::pow(lambda, q.two_star()) * lcrit};
}

FunctionalReport FunctionalReport::from_norms(const NormSet& n, const Parameters& q) {
  FunctionalReport r;
  r.mass = n.mass;
  r.grad2 = n.grad2;
  r.lp1 = n.lp1;
  r.lcrit = n.lcrit;
  const int d = q.d;
  const double p = q.p;
  r.H = n.grad2 - q.mu * (2.0 / (p + 1.0)) * n.lp1 - ((d - 2.0) / d) * n.lcrit;
  r.S_omega = q.omega * n.mass + r.H;
  r.K = 2.0 * n.grad2 - q.mu * (d * (p - 1.0) / (p + 1.0)) * n.lp1 - 2.0 * n.lcrit;
  r.I_omega = r.S_omega - (2.0 / (d * (p - 1.0))) * r.K;
  return r;
}

double nehari(const NormSet& n, const Parameters& q) { return FunctionalReport::from_norms(n, q).K; }
double action(const NormSet& n, const Parameters& q) { return FunctionalReport::from_norms(n, q).S_omega; }

namespace {

template <class T>
NormSet norms_impl(const RadialField<T>& u, const Parameters& q) {
  const RadialGrid& g = u.grid();
  const auto& w = g.weights();
  NormSet n;
  const double ts = q.two_star();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a == 0.0) continue;
    n.mass += w[i] * a * a;
    n.lp1 += w[i] * std::pow(a, q.p + 1.0);
    n.lcrit += w[i] * std::pow(a, ts);
  }
  n.grad2 = discrete::dirichlet_energy(g, u.values());
  return n;
}

}  // namespace

NormSet norms(const RealRadialField& u, const Parameters& q) { return norms_impl(u, q); }
NormSet norms(const ComplexRadialField& psi, const Parameters& q) { return norms_impl(psi, q); }

FunctionalReport report(const RealRadialField& u, const Parameters& q) {
  return FunctionalReport::from_norms(norms(u, q), q);
}
FunctionalReport report(const ComplexRadialField& psi, const Parameters& q) {
  return FunctionalReport::from_norms(norms(psi, q), q);
}

RealRadialField l2_scale(const RealRadialField& u, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::domain, "dilation factor must be positive");
  const RadialGrid& g = u.grid();
  if (lambda == 1.0) return u;

  // Effective support: radius beyond which the field carries < 1e-12 of its mass.
  const auto& w = g.weights();
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += w[i] * u[i] * u[i];
  double support = g.r_max();
  if (total > 0.0) {
    double tail = 0.0;
    for (std::size_t i = u.size(); i-- > 0;) {
      tail += w[i] * u[i] * u[i];
      if (tail > 1e-12 * total) {
        support = g.r(std::min(i + 1, u.size() - 1));
        break;
      }
    }
  }
  const double scaled_support = support / lambda;
  if (scaled_support > g.r_max()) {
    std::ostringstream os;
    os << "dilation by " << lambda << " pushes the support (" << support << ") beyond r_max";
    throw Error(ErrorKind::resolution, os.str());
  }
  if (scaled_support < 16.0 * g.spacing()) {
    std::ostringstream os;
    os << "dilation by " << lambda << " leaves fewer than 16 nodes across the support";
    throw Error(ErrorKind::resolution, os.str());
  }

  const UniformPchip interp(g.spacing(), u.data());
  const double amp = std::pow(lambda, 0.5 * g.dim());
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = amp * interp(lambda * g.r(i));
  v.back() = 0.0;
  return RealRadialField(u.grid_ptr(), std::move(v));
}

double lambda_star(const NormSet& n, const Parameters& q) {
  if (!(n.grad2 > 0.0) || !(n.lcrit > 0.0))
    throw Error(ErrorKind::degenerate, "field has no gradient or critical mass; no Nehari root");
  const double a = q.d * (q.p - 1.0) / 2.0;
  const double alpha = q.mu * q.d * (q.p - 1.0) / (q.p + 1.0);
  const double ts = q.two_star();
  // K(T_lambda u) / lambda^2; decreasing in lambda for mu >= 0.
  auto f = [&](double lam) {
    return 2.0 * n.grad2 - alpha * std::pow(lam, a - 2.0) * n.lp1 - 2.0 * std::pow(lam, ts - 2.0) * n.lcrit;
  };
  constexpr int scan = 60;
  const double lmin = 1e-6, lmax = 1e6;
  double lo = 0.0, hi = 0.0;
  double prev = lmin;
  double fprev = f(prev);
  bool found = false;
  for (int k = 1; k < scan; ++k) {
    const double lam = lmin * std::pow(lmax / lmin, static_cast<double>(k) / (scan - 1));
    const double fv = f(lam);
    if (fprev > 0.0 && fv <= 0.0) {
      lo = prev;
      hi = lam;
      found = true;
      break;
    }
    prev = lam;
    fprev = fv;
  }
  if (!found) throw Error(ErrorKind::degenerate, "no sign change of K(T_lambda u) on [1e-6, 1e6]");
  while ((hi - lo) > 1e-12 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double lambda_star(const RealRadialField& u, const Parameters& q) { return lambda_star(norms(u, q), q); }

ActionProfileDiagnostic action_profile_check(const NormSet& n, const Parameters& q, std::size_t points) {
  ActionProfileDiagnostic out;
  out.lambda_star = lambda_star(n, q);
  const double ts = q.two_star();
  const double a = q.d * (q.p - 1.0) / 2.0;
  const double alpha = q.mu * q.d * (q.p - 1.0) / (q.p + 1.0);
  const double lambda0 = std::pow(n.grad2 / n.lcrit, 1.0 / (ts - 2.0));
  double lo = lambda0 / 8.0;
  const double hi = 2.0 * lambda0;
  if (out.lambda_star < lo) lo = out.lambda_star / 2.0;

  auto S = [&](double lam) { return action(n.scaled(lam, q), q); };
  out.lambdas.resize(points);
  out.action.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    out.lambdas[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
    out.action[k] = S(out.lambdas[k]);
  }

  for (double lam : out.lambdas) {
    const double delta = 1e-5 * lam;
    const double ds = (S(lam + delta) - S(lam - delta)) / (2.0 * delta);
    const double t1 = 2.0 * lam * n.grad2;
    const double t2 = alpha * std::pow(lam, a - 1.0) * n.lp1;
    const double t3 = 2.0 * std::pow(lam, ts - 1.0) * n.lcrit;
    const double k_over = t1 - t2 - t3;
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
    out.max_identity_residual = std::max(out.max_identity_residual, std::abs(ds - k_over) / scale);
  }

  out.argmax_index = static_cast<std::size_t>(
      std::distance(out.action.begin(), std::max_element(out.action.begin(), out.action.end())));
  out.lambda_star_position = std::log(out.lambda_star / lo) / std::log(hi / lo) * (points - 1);
  out.argmax_matches = std::abs(static_cast<double>(out.argmax_index) - out.lambda_star_position) <= 1.0;

  out.max_second_difference = -std::numeric_limits<double>::infinity();
  const double threshold = out.lambda_star * (1.0 + 1e-3);
  for (std::size_t k = 1; k + 1 < points; ++k) {
    if (out.lambdas[k - 1] <= threshold) continue;
    const double l0 = out.lambdas[k - 1], l1 = out.lambdas[k], l2 = out.lambdas[k + 1];
    const double s01 = (out.action[k] - out.action[k - 1]) / (l1 - l0);
    const double s12 = (out.action[k + 1] - out.action[k]) / (l2 - l1);
    out.max_second_difference = std::max(out.max_second_difference, 2.0 * (s12 - s01) / (l2 - l0));
  }
  out.concave_beyond = out.max_second_difference <= 1e-10;
  return out;
}

ActionProfileDiagnostic action_profile_check(const RealRadialField& u, const Parameters& q, std::size_t points) {
  return action_profile_check(norms(u, q), q, points);
}

RealRadialField schwarz_rearrange(const RealRadialField& u) {
  const RadialGrid& g = u.grid();
  const auto& w = g.weights();
  const std::size_t n = u.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return std::abs(u[i]) > std::abs(u[j]); });

  // Sorted level values at the centres of their cumulative volume cells.
  std::vector<double> x(n), a(n);
  double c = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    x[k] = c + 0.5 * w[i];
    a[k] = std::abs(u[i]);
    c += w[i];
  }
  std::vector<double> v(n);
  double cg = 0.0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = cg + 0.5 * w[j];
    cg += w[j];
    while (k + 1 < n && x[k + 1] <= xj) ++k;
    if (xj <= x[0]) {
      v[j] = a[0];
    } else if (k + 1 >= n) {
      v[j] = a[n - 1];
    } else {
      const double span = x[k + 1] - x[k];
      const double t = span > 0.0 ? (xj - x[k]) / span : 0.0;
      v[j] = (1.0 - t) * a[k] + t * a[k + 1];
    }
  }
  return RealRadialField(u.grid_ptr(), std::move(v));
}

}  // namespace critnls
