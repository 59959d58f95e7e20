#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "critnls/groundstate.hpp"
#include "critnls/quadrature.hpp"

namespace critnls {

double cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double x = r - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

double cutoff_derivative(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  const double x = r - 1.0;
  const double q = 1.0 - x * x;
  return cutoff(r) * (-2.0 * x / (q * q));
}

namespace {

double talenti_constant(int d) { return std::pow(d * (d - 2.0), (d - 2.0) / 4.0); }

double smooth_step(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - s)), b = std::exp(-1.0 / s);
  return a / (a + b);
}

}  // namespace

double TalentiProfile::value(double r) const {
  const double e = epsilon;
  const double w = talenti_constant(d) * std::pow(e, 0.5 * (d - 2)) * std::pow(e * e + r * r, -0.5 * (d - 2));
  return cutoff_applied ? cutoff(r) * w : w;
}

double TalentiProfile::derivative(double r) const {
  const double e = epsilon;
  const double c = talenti_constant(d) * std::pow(e, 0.5 * (d - 2));
  const double w = c * std::pow(e * e + r * r, -0.5 * (d - 2));
  const double dw = -c * (d - 2.0) * r * std::pow(e * e + r * r, -0.5 * d);
  return cutoff_applied ? cutoff(r) * dw + cutoff_derivative(r) * w : dw;
}

RealRadialField TalentiProfile::sample(const GridPtr& grid) const {
  const double R = grid->r_max();
  const bool taper = !(cutoff_applied && R > 2.0);
  const double ra = 0.75 * R;
  return RealRadialField::sample(grid, [&](double r) {
    const double v = value(r);
    return taper ? v * smooth_step((r - ra) / (R - ra)) : v;
  });
}

TalentiProfile talenti(double epsilon, int d) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::domain, "Talenti scale must be positive");
  if (d < 3) throw Error(ErrorKind::domain, "Talenti profile needs d >= 3");
  return {d, epsilon, false};
}

TalentiProfile test_function(double epsilon, int d) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorKind::domain, "test function scale must lie in (0, 1)");
  if (d < 3) throw Error(ErrorKind::domain, "test function needs d >= 3");
  return {d, epsilon, d == 4};
}

NormSet profile_norms(const TalentiProfile& w, double p, double r_max, bool whole_space) {
  static const GaussLegendre gl(20);
  const int d = w.d;
  const double s = unit_sphere_area(d);
  const double ts = 2.0 * d / (d - 2.0);
  const double b = w.cutoff_applied ? std::min(2.0, r_max) : r_max;
  const auto breaks = geometric_breaks(w.epsilon, b, {1.0, 2.0});
  auto radial = [&](auto f) { return s * gl.integrate([&](double r) { return std::pow(r, d - 1) * f(r); }, breaks); };
  NormSet n;
  n.grad2 = radial([&](double r) { const double v = w.derivative(r); return v * v; });
  n.mass = radial([&](double r) { const double v = w.value(r); return v * v; });
  n.lp1 = radial([&](double r) { return std::pow(std::abs(w.value(r)), p + 1.0); });
  n.lcrit = radial([&](double r) { return std::pow(std::abs(w.value(r)), ts); });
  if (whole_space && !w.cutoff_applied) {
    // Substitute r = R / t on (R, inf).
    auto tail = [&](auto f) {
      return s * gl.integrate(
                     [&](double t) {
                       const double r = r_max / t;
                       return std::pow(r, d - 1) * f(r) * r_max / (t * t);
                     },
                     std::vector<double>{0.0, 0.25, 0.5, 1.0});
    };
    n.grad2 += tail([&](double r) { const double v = w.derivative(r); return v * v; });
    n.lcrit += tail([&](double r) { return std::pow(w.value(r), ts); });
  }
  return n;
}

double sobolev_sigma_closed_form(int d) {
  return std::numbers::pi * d * (d - 2.0) * std::pow(std::tgamma(0.5 * d) / std::tgamma(d), 2.0 / d);
}

SobolevConstant sobolev_constant(int d, const SobolevOptions& o) {
  if (d < 3) throw Error(ErrorKind::domain, "Sobolev constant needs d >= 3");
  if (o.levels.size() < 2 || o.epsilons.empty())
    throw Error(ErrorKind::domain, "Sobolev constant needs at least two grid levels and one scale");
  static const GaussLegendre gl(20);
  SobolevConstant sc;
  sc.d = d;
  sc.epsilons = o.epsilons;
  sc.levels = o.levels;
  const double s = unit_sphere_area(d);
  const double ts = 2.0 * d / (d - 2.0);
  for (double eps : o.epsilons) {
    const TalentiProfile w = talenti(eps, d);
    const NormSet tail_only = [&] {
      NormSet whole = profile_norms(w, 2.0, o.r_max, true);
      NormSet inner = profile_norms(w, 2.0, o.r_max, false);
      return NormSet{0.0, whole.grad2 - inner.grad2, 0.0, whole.lcrit - inner.lcrit};
    }();
    std::vector<double> g2, lc;
    for (std::size_t n : o.levels) {
      const double h = o.r_max / static_cast<double>(n - 1);
      double a = 0.0, c = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = h * static_cast<double>(i);
        const double tw = (i == 0 || i + 1 == n) ? 0.5 * h : h;
        const double rd = std::pow(r, d - 1);
        const double dv = w.derivative(r);
        a += tw * rd * dv * dv;
        c += tw * rd * std::pow(w.value(r), ts);
      }
      g2.push_back(s * a + tail_only.grad2);
      lc.push_back(s * c + tail_only.lcrit);
    }
    sc.grad2.push_back(g2);
    sc.lcrit.push_back(lc);
  }
  const double factor = std::pow(2.0, sc.extrapolation_order) - 1.0;
  const auto& g0 = sc.grad2.front();
  for (std::size_t k = 0; k + 1 < g0.size(); ++k) sc.extrapolated.push_back(g0[k + 1] + (g0[k + 1] - g0[k]) / factor);
  sc.sigma_pow = sc.extrapolated.back();
  sc.sigma = std::pow(sc.sigma_pow, 2.0 / d);
  const auto [mn, mx] = std::minmax_element(sc.extrapolated.begin(), sc.extrapolated.end());
  sc.refinement_spread = (*mx - *mn) / sc.sigma_pow;
  for (std::size_t e = 0; e < sc.epsilons.size(); ++e) {
    const double g = sc.grad2[e].back(), c = sc.lcrit[e].back();
    sc.consistency = std::max(sc.consistency, std::abs(g - c) / g);
    sc.epsilon_spread = std::max(sc.epsilon_spread, std::abs(g - sc.grad2.front().back()) / sc.grad2.front().back());
  }
  if (sc.refinement_spread > 0.05) {
    std::ostringstream os;
    os << "Richardson values spread by " << sc.refinement_spread << " across refinement";
    throw Error(ErrorKind::resolution, os.str());
  }
  return sc;
}

std::vector<double> default_bn_epsilons(std::size_t count) {
  std::vector<double> e(count);
  for (std::size_t k = 0; k < count; ++k)
    e[k] = 0.02 * std::pow(0.3 / 0.02, static_cast<double>(k) / static_cast<double>(count - 1));
  return e;
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

BnScan bn_scan(const Parameters& q, const std::vector<double>& epsilons, double r_max, double fit_window) {
  if (q.d < 4) throw Error(ErrorKind::domain, "the test-function scan needs d >= 4");
  BnScan out;
  out.params = q;
  out.fit_window = fit_window;
  out.sigma_pow = sobolev_constant(q.d).sigma_pow;
  out.bound = (2.0 / q.d) * out.sigma_pow;
  out.predicted_exponent = q.d - (q.d - 2.0) * (q.p + 1.0) / 2.0;
  std::vector<double> eps = epsilons;
  std::sort(eps.begin(), eps.end());
  for (double e : eps) {
    BnRow row;
    row.epsilon = e;
    row.norms = profile_norms(test_function(e, q.d), q.p, r_max);
    row.lambda = lambda_star(row.norms, q);
    row.I_omega = FunctionalReport::from_norms(row.norms.scaled(row.lambda, q), q).I_omega;
    out.rows.push_back(row);
  }
  if (out.rows.empty()) return out;
  const auto best = std::min_element(out.rows.begin(), out.rows.end(),
                                     [](const BnRow& a, const BnRow& b) { return a.I_omega < b.I_omega; });
  out.min_I = best->I_omega;
  out.argmin_epsilon = best->epsilon;
  out.inequality = out.min_I < out.bound;
  out.margin = (out.bound - out.min_I) / out.bound;

  std::vector<double> xe, ye, xf, yf;
  out.monotone_full = true;
  out.monotone_asymptotic = true;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& r = out.rows[i];
    if (r.lambda < 1.0) {
      xf.push_back(r.epsilon);
      yf.push_back(1.0 - r.lambda);
      if (r.epsilon <= fit_window * (1.0 + 1e-12)) {
        xe.push_back(r.epsilon);
        ye.push_back(1.0 - r.lambda);
      }
    }
    if (i > 0 && !(out.rows[i].lambda < out.rows[i - 1].lambda)) {
      out.monotone_full = false;
      if (r.epsilon <= fit_window * (1.0 + 1e-12)) out.monotone_asymptotic = false;
    }
  }
  out.fitted_exponent = xe.size() >= 3 ? loglog_slope(xe, ye) : std::nan("");
  out.fitted_exponent_full = xf.size() >= 3 ? loglog_slope(xf, yf) : std::nan("");
  return out;
}

}  // namespace critnls
