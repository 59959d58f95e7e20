#include "critnls/virial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "critnls/discrete.hpp"
#include "critnls/errors.hpp"
#include "critnls/quadrature.hpp"

namespace critnls {

namespace bump {
namespace {

double raw(double x) {
  const double y = x - 2.0;
  if (std::abs(y) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - y * y));
}

const GaussLegendre& rule() {
  static const GaussLegendre gl(20);
  return gl;
}

// Composite Gauss-Legendre on [1, min(x, 3)] with panels of width at most 1/8.
template <class F>
double integrate_from_one(F&& f, double x) {
  const double b = std::min(x, 3.0);
  if (b <= 1.0) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - 1.0) * 8.0)));
  const double h = (b - 1.0) / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) s += rule().integrate(f, 1.0 + k * h, 1.0 + (k + 1) * h);
  return s;
}

}  // namespace

double normalization() {
  static const double c = 1.0 / integrate_from_one(raw, 3.0);
  return c;
}

double rho(double x) { return normalization() * raw(x); }

double rho_prime(double x) {
  const double y = x - 2.0;
  if (std::abs(y) >= 1.0) return 0.0;
  const double q = 1.0 - y * y;
  return rho(x) * (-2.0 * y / (q * q));
}

double rho_second(double x) {
  const double y = x - 2.0;
  if (std::abs(y) >= 1.0) return 0.0;
  const double q = 1.0 - y * y;
  const double g1 = -2.0 * y / (q * q);
  const double g2 = -(2.0 + 6.0 * y * y) / (q * q * q);
  return rho(x) * (g1 * g1 + g2);
}

double cumulative(double x) { return integrate_from_one(rho, x); }

double first_moment(double x) {
  return integrate_from_one([](double t) { return t * rho(t); }, x);
}

double w(double s) { return s - s * cumulative(s) + first_moment(s); }
double w_prime(double s) { return 1.0 - cumulative(s); }

}  // namespace bump

namespace {

struct SupConstants {
  double grad = 0.0;
  double bilap = 0.0;
};

SupConstants sup_constants(int d) {
  SupConstants c;
  c.grad = 2.0;  // 2 sqrt(s) at s = 1, below the bump
  const int n = 8000;
  for (int k = 0; k <= n; ++k) {
    const double s = 1.0 + 2.0 * k / n;
    c.grad = std::max(c.grad, 2.0 * std::sqrt(s) * bump::w_prime(s));
    const double b = 4.0 * d * (d + 2.0) * bump::rho(s) + 16.0 * (d + 2.0) * s * bump::rho_prime(s) +
                     16.0 * s * s * bump::rho_second(s);
    c.bilap = std::max(c.bilap, std::abs(b));
  }
  return c;
}

[[noreturn]] void invariant_failed(const std::string& what) {
  throw Error(ErrorKind::domain, "virial weight invariant violated: " + what);
}

void check_bump_invariants() {
  // Unit integral by an independent trapezoid rule (spectrally accurate for a flat bump).
  const int n = 4000;
  double integral = 0.0;
  for (int k = 1; k < n; ++k) integral += bump::rho(1.0 + 2.0 * k / n);
  integral *= 2.0 / n;
  if (std::abs(integral - 1.0) > 1e-8) invariant_failed("rho integrates to " + std::to_string(integral));
  double peak = bump::rho(2.0);
  for (int k = 0; k <= n; ++k) {
    const double x = 1.0 + 2.0 * k / n;
    if (std::abs(bump::rho(x) - bump::rho(4.0 - x)) > 1e-13 * peak) invariant_failed("rho symmetry about 2");
    if (x < 2.0 && bump::rho_prime(x) < 0.0) invariant_failed("rho nondecreasing left of 2");
  }
  if (bump::rho(1.0) != 0.0 || bump::rho(3.0) != 0.0) invariant_failed("rho support inside (1,3)");
}

}  // namespace

RadialProfile VirialWeight::kappa1_profile() const {
  const double R2 = R * R;
  return {[R2](double r) {
            const double s = r * r / R2;
            return 2.0 * bump::cumulative(s) + 4.0 * s * bump::rho(s);
          },
          [R2](double r) {
            const double s = r * r / R2;
            return (2.0 * r / R2) * (6.0 * bump::rho(s) + 4.0 * s * bump::rho_prime(s));
          }};
}

RadialProfile VirialWeight::kappa2_profile() const {
  const double R2 = R * R;
  const double dd = d;
  return {[R2, dd](double r) {
            const double s = r * r / R2;
            return dd * bump::cumulative(s) + 2.0 * s * bump::rho(s);
          },
          [R2, dd](double r) {
            const double s = r * r / R2;
            return (2.0 * r / R2) * ((dd + 2.0) * bump::rho(s) + 2.0 * s * bump::rho_prime(s));
          }};
}

VirialWeight build_weight(double R, const GridPtr& grid, int d) {
  if (!grid) throw Error(ErrorKind::domain, "virial weight needs a grid");
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorKind::domain, "virial radius must be positive");
  if (!(std::sqrt(3.0) * R < grid->r_max()))
    throw Error(ErrorKind::domain, "virial radius too large for the grid: sqrt(3) R must be below r_max");
  if (d != grid->dim()) throw Error(ErrorKind::domain, "virial weight dimension differs from the grid");
  check_bump_invariants();

  VirialWeight vw;
  vw.R = R;
  vw.d = d;
  vw.grid = grid;
  const double R2 = R * R;
  const std::size_t n = grid->size();
  vw.s.resize(n);
  vw.w.resize(n);
  vw.W.resize(n);
  vw.grad.resize(n);
  vw.lap.resize(n);
  vw.bilap.resize(n);
  vw.kappa1.resize(n);
  vw.kappa2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid->r(i);
    const double s = r * r / R2;
    const double P = bump::cumulative(s);
    const double rho = bump::rho(s), rho1 = bump::rho_prime(s), rho2 = bump::rho_second(s);
    vw.s[i] = s;
    vw.w[i] = s - s * P + bump::first_moment(s);
    vw.W[i] = R2 * vw.w[i];
    vw.grad[i] = 2.0 * r * (1.0 - P);
    vw.lap[i] = 2.0 * d * (1.0 - P) - 4.0 * s * rho;
    vw.bilap[i] = -(4.0 * d * (d + 2.0) * rho + 16.0 * (d + 2.0) * s * rho1 + 16.0 * s * s * rho2) / R2;
    vw.kappa1[i] = 2.0 * P + 4.0 * s * rho;
    vw.kappa2[i] = d * P + 2.0 * s * rho;
  }
  const auto& rm = grid->midpoints();
  vw.kappa1_mid.resize(rm.size());
  vw.grad_mid.resize(rm.size());
  for (std::size_t j = 0; j < rm.size(); ++j) {
    const double s = rm[j] * rm[j] / R2;
    const double P = bump::cumulative(s);
    vw.kappa1_mid[j] = 2.0 * P + 4.0 * s * bump::rho(s);
    vw.grad_mid[j] = 2.0 * rm[j] * (1.0 - P);
  }

  const SupConstants c = sup_constants(d);
  vw.W_constant = 2.0;
  vw.grad_constant = c.grad;
  vw.bilap_constant = c.bilap;

  for (std::size_t i = 0; i < n; ++i) {
    const double s = vw.s[i];
    if (s <= 1.0 && std::abs(vw.w[i] - s) > 1e-14 * std::max(1.0, s)) invariant_failed("w(s) = s below the bump");
    if (s >= 3.0 && std::abs(vw.w[i] - 2.0) > 1e-12) invariant_failed("w(s) = 2 beyond the bump");
    if (vw.grad[i] * vw.grad[i] > 4.0 * vw.W[i] * (1.0 + 1e-12)) invariant_failed("|grad W|^2 <= 4 W");
    if (vw.W[i] > vw.W_constant * R2 * (1.0 + 1e-12)) invariant_failed("W_R <= 2 R^2");
    if (vw.grad[i] > vw.grad_sup() * (1.0 + 1e-6)) invariant_failed("|grad W_R| <= C R");
    if (std::abs(vw.bilap[i]) > vw.bilap_sup() * (1.0 + 1e-3)) invariant_failed("|Delta^2 W_R| <= C R^-2");
    if (s <= 1.0 && (vw.kappa1[i] != 0.0 || vw.kappa2[i] != 0.0)) invariant_failed("kappa vanishes for r <= R");
    if (s >= 3.0 && (std::abs(vw.kappa1[i] - 2.0) > 1e-12 || std::abs(vw.kappa2[i] - d) > 1e-12))
      invariant_failed("kappa1 = 2 and kappa2 = d for r >= sqrt(3) R");
  }
  return vw;
}

namespace {

template <class T>
void require_grid(const RadialField<T>& v, const VirialWeight& weight) {
  if (v.grid_ptr() != weight.grid && v.size() != weight.W.size())
    throw Error(ErrorKind::invalid_field, "field and virial weight live on different grids");
}

template <class T>
double gradient_part(const RadialField<T>& v, const VirialWeight& weight) {
  const auto du = discrete::midpoint_derivative(v.grid(), v.values());
  const auto& wm = v.grid().midpoint_weights();
  double s = 0.0;
  for (std::size_t j = 0; j < du.size(); ++j) s += wm[j] * weight.kappa1_mid[j] * std::norm(du[j]);
  return s;
}

template <class T>
double potential_part(const RadialField<T>& v, const VirialWeight& weight, const Parameters& q) {
  const auto& w = v.grid().weights();
  const double ts = q.two_star();
  const double csub = q.mu * (q.p - 1.0) / (q.p + 1.0), ccrit = 2.0 / q.d;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a == 0.0 || weight.kappa2[i] == 0.0) continue;
    s += w[i] * weight.kappa2[i] * (csub * std::pow(a, q.p + 1.0) + ccrit * std::pow(a, ts));
  }
  return s;
}

template <class T>
double localized_k_impl(const RadialField<T>& v, const VirialWeight& weight, const Parameters& q) {
  require_grid(v, weight);
  return gradient_part(v, weight) - potential_part(v, weight, q);
}

}  // namespace

double localized_k(const RealRadialField& v, const VirialWeight& weight, const Parameters& q) {
  return localized_k_impl(v, weight, q);
}

double localized_k(const ComplexRadialField& v, const VirialWeight& weight, const Parameters& q) {
  return localized_k_impl(v, weight, q);
}

double localized_k_linear(const ComplexRadialField& v, const VirialWeight& weight) {
  require_grid(v, weight);
  return gradient_part(v, weight);
}

VirialMoments virial_moments(const ComplexRadialField& psi, const VirialWeight& weight, const Parameters& q,
                             bool linear_only) {
  require_grid(psi, weight);
  const RadialGrid& g = psi.grid();
  const auto& w = g.weights();
  VirialMoments m;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a2 = std::norm(psi[i]);
    m.M_R += w[i] * weight.W[i] * a2;
    m.bilap += w[i] * weight.bilap[i] * a2;
    if (g.r(i) >= weight.R) m.tail_mass += w[i] * a2;
  }
  // Momentum term on the midpoints, with the field interpolated to fourth order using
  // the same ghost values as the staggered derivative.
  const auto& u = psi.values();
  const std::size_t n = u.size();
  auto at = [&](std::ptrdiff_t k) -> cplx {
    if (k < 0) return u[static_cast<std::size_t>(-k)];
    if (k >= static_cast<std::ptrdiff_t>(n)) return 2.0 * u[n - 1] - u[n - 2];
    return u[static_cast<std::size_t>(k)];
  };
  const auto du = discrete::midpoint_derivative(g, u);
  const auto& wm = g.midpoint_weights();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const auto k = static_cast<std::ptrdiff_t>(j);
    const cplx mid = (-at(k - 1) + 9.0 * at(k) + 9.0 * at(k + 1) - at(k + 2)) / 16.0;
    m.P_R += wm[j] * weight.grad_mid[j] * std::imag(du[j] * std::conj(mid));
  }
  m.K_R = linear_only ? gradient_part(psi, weight) : gradient_part(psi, weight) - potential_part(psi, weight, q);
  return m;
}

const std::vector<std::string>& virial_columns() {
  static const std::vector<std::string> cols{"M_R", "P_R", "K_R", "bilap", "tail_mass"};
  return cols;
}

Observer virial_observer(const VirialWeight& weight, const Parameters& q, bool linear_only) {
  return [weight, q, linear_only](const ComplexRadialField& psi) {
    const VirialMoments m = virial_moments(psi, weight, q, linear_only);
    return std::vector<double>{m.M_R, m.P_R, m.K_R, m.bilap, m.tail_mass};
  };
}

namespace {

std::size_t column(const TrajectoryRecord& traj, const std::string& name) {
  const auto& c = traj.observer_columns;
  const auto it = std::find(c.begin(), c.end(), name);
  if (it == c.end()) throw Error(ErrorKind::invalid_field, "trajectory lacks the observer column " + name);
  return static_cast<std::size_t>(it - c.begin());
}

}  // namespace

VirialResidual virial_residual(const TrajectoryRecord& traj, const VirialWeight&, const Parameters&,
                               double window_end, double max_growth, double max_change) {
  const std::size_t iM = column(traj, "M_R"), iK = column(traj, "K_R"), iB = column(traj, "bilap");
  const auto& smp = traj.samples;
  std::size_t count = 0;
  if (!smp.empty()) {
    const double g0 = smp.front().grad2;
    while (count < smp.size() && smp[count].t <= window_end && smp[count].grad2 <= max_growth * g0) ++count;
    // The window closes at the first triple the sampling no longer resolves.
    for (std::size_t i = 1; i + 1 < count; ++i)
      if (std::abs(smp[i + 1].grad2 - smp[i - 1].grad2) > max_change * smp[i].grad2) {
        count = i;
        break;
      }
  }
  VirialResidual out;
  out.window_end = count ? smp[count - 1].t : 0.0;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double h1 = smp[i].t - smp[i - 1].t, h2 = smp[i + 1].t - smp[i].t;
    if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-9 * h1) continue;
    const auto f = [&](std::size_t k) { return smp[k].K - smp[k].extras[iK] - 0.25 * smp[k].extras[iB]; };
    const double lhs = (smp[i + 1].extras[iM] - 2.0 * smp[i].extras[iM] + smp[i - 1].extras[iM]) / (h1 * h2);
    // (f_- + 10 f + f_+) / 12 matches the central second difference to fourth order.
    const double rhs = (f(i - 1) + 10.0 * f(i) + f(i + 1)) / 12.0;
    const double rel = std::abs(lhs - rhs) / (2.0 * smp[i].grad2);
    out.t.push_back(smp[i].t);
    out.lhs.push_back(lhs);
    out.rhs.push_back(rhs);
    out.relative.push_back(rel);
    if (rel > out.max_relative) {
      out.max_relative = rel;
      out.t_at_max = smp[i].t;
    }
  }
  if (out.t.empty())
    throw Error(ErrorKind::resolution, "virial window holds fewer than three equally spaced samples");
  return out;
}

StraussDiagnostic strauss_check(const RealRadialField& u, const RadialProfile& kappa) {
  const RadialGrid& g = u.grid();
  const int d = g.dim();
  StraussDiagnostic out;
  out.analytic_C = std::sqrt(2.0 / g.sphere_area());
  const auto& w = g.weights();
  double mass = 0.0, Y = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = g.r(i);
    const double k = kappa.value(r);
    if (k < 0.0) throw Error(ErrorKind::domain, "Strauss weight is negative at r = " + std::to_string(r));
    out.lhs = std::max(out.lhs, std::sqrt(k) * std::abs(u[i]));
    mass += w[i] * u[i] * u[i];
    if (r > 0.0) Y = std::max(Y, std::max(-kappa.derivative(r), 0.0) / std::pow(r, d - 1));
  }
  const auto du = discrete::midpoint_derivative(g, u.values());
  const auto& rm = g.midpoints();
  const auto& wm = g.midpoint_weights();
  double X2 = 0.0;
  for (std::size_t j = 0; j < du.size(); ++j) {
    const double f = kappa.value(rm[j]) * du[j] / std::pow(rm[j], d - 1);
    X2 += wm[j] * f * f;
  }
  const double norm = std::sqrt(mass);
  out.rhs = std::sqrt(norm) * (std::pow(X2, 0.25) + std::sqrt(Y) * std::sqrt(norm));
  out.fitted_C = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

StraussFamily strauss_family(const GridPtr& grid, const RadialProfile& kappa, std::size_t count,
                             std::uint64_t seed, double scale) {
  StraussFamily fam;
  fam.analytic_C = std::sqrt(2.0 / grid->sphere_area());
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double top = std::min(2.0 * scale, 0.8 * grid->r_max());
  for (std::size_t k = 0; k < count; ++k) {
    const int shells = 1 + static_cast<int>(unit(gen) * 3.0);
    std::vector<double> c(shells), sig(shells), a(shells);
    for (int j = 0; j < shells; ++j) {
      c[j] = top * unit(gen);
      sig[j] = scale * std::exp(std::log(0.05) * unit(gen));
      a[j] = 2.0 * unit(gen) - 1.0;
    }
    auto u = RealRadialField::sample(grid, [&](double r) {
      double v = 0.0;
      for (int j = 0; j < shells; ++j) {
        const double z = (r - c[j]) / sig[j];
        v += a[j] * std::exp(-z * z);
      }
      return v;
    });
    const double C = strauss_check(u, kappa).fitted_C;
    fam.fitted_C.push_back(C);
    fam.max_C = std::max(fam.max_C, C);
    (k < count / 2 ? fam.max_first_half : fam.max_second_half) =
        std::max(k < count / 2 ? fam.max_first_half : fam.max_second_half, C);
  }
  return fam;
}

BlowupCertificate make_certificate(const ComplexRadialField& psi0, double epsilon0, const VirialWeight& weight,
                                   const Parameters& q, const MStarOptions& opt) {
  if (!(epsilon0 > 0.0)) throw Error(ErrorKind::domain, "no blow-up certificate: epsilon0 is not positive");
  require_grid(psi0, weight);
  const RadialGrid& g = psi0.grid();
  BlowupCertificate c;
  c.R = weight.R;
  c.epsilon0 = epsilon0;
  const VirialMoments m = virial_moments(psi0, weight, q);
  c.P0 = m.P_R;
  c.M0 = m.M_R;
  c.tail_mass0 = m.tail_mass;
  for (std::size_t i = 0; i < psi0.size(); ++i) c.mass0 += g.weight(i) * std::norm(psi0[i]);
  c.delta2_bound = weight.bilap_sup() * c.mass0;
  const double gs = weight.grad_sup();
  c.weighted_term = (1.0 + gs * gs / epsilon0) * c.M0 / (weight.R * weight.R);

  // Randomized search over Gaussian shells. For a fixed shape v of unit mass,
  // K^R(a v) = a^2 G - a^{p+1} L - a^{2*} C is negative and decreasing beyond its first
  // root, so the smallest admissible amplitude follows by bisection.
  c.m_star_budget = opt.budget;
  c.m_star_seed = opt.seed;
  c.m_star = std::numeric_limits<double>::infinity();
  c.m_star_min_KR = std::numeric_limits<double>::infinity();
  std::mt19937_64 gen(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double R = weight.R;
  const double a_max = std::sqrt(c.mass0);
  const double target = -0.25 * epsilon0;
  const double csub = q.mu * (q.p - 1.0) / (q.p + 1.0), ccrit = 2.0 / q.d, ts = q.two_star();
  for (std::size_t k = 0; k < opt.budget; ++k) {
    const double sigma = R * std::exp(std::log(0.01) + (std::log(0.5) - std::log(0.01)) * unit(gen));
    const double r0 = std::min(R * (0.8 + 1.7 * unit(gen)), g.r_max() - 4.0 * sigma);
    auto v = RealRadialField::sample(psi0.grid_ptr(), [&](double r) {
      const double z = (r - r0) / sigma;
      return std::exp(-z * z);
    });
    double mass = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double e = g.weight(i) * v[i] * v[i];
      mass += e;
      if (g.r(i) >= R) tail += e;
    }
    if (!(mass > 0.0)) continue;
    const double inv = 1.0 / std::sqrt(mass);
    const double G = gradient_part(v, weight) * inv * inv;
    double L = 0.0, Cc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double a = std::abs(v[i]) * inv;
      if (a == 0.0 || weight.kappa2[i] == 0.0) continue;
      L += g.weight(i) * weight.kappa2[i] * csub * std::pow(a, q.p + 1.0);
      Cc += g.weight(i) * weight.kappa2[i] * ccrit * std::pow(a, ts);
    }
    auto kr = [&](double a) { return a * a * G - std::pow(a, q.p + 1.0) * L - std::pow(a, ts) * Cc; };
    c.m_star_min_KR = std::min(c.m_star_min_KR, kr(a_max));
    if (!(kr(a_max) <= target)) continue;
    double lo = 0.0, hi = a_max;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * a_max; ++it) {
      const double mid = 0.5 * (lo + hi);
      (kr(mid) <= target ? hi : lo) = mid;
    }
    ++c.m_star_admissible;
    c.m_star = std::min(c.m_star, hi * hi * tail / mass);
  }
  // Without an admissible sample every field of mass <= ||psi0||^2 is a candidate bound;
  // the tail mass of such a field never exceeds ||psi0||^2.
  c.m_star_search_empty = c.m_star_admissible == 0;
  if (c.m_star_search_empty) c.m_star = c.mass0;

  c.delta2_ok = c.delta2_bound <= epsilon0;
  c.tail_ok = c.tail_mass0 < c.m_star;
  c.weighted_ok = c.weighted_term < c.m_star;
  c.t_star = (c.P0 + std::sqrt(c.P0 * c.P0 + 2.0 * epsilon0 * c.M0)) / epsilon0;
  return c;
}

BlowupBound blowup_bound(const BlowupCertificate& cert, const TrajectoryRecord& traj) {
  BlowupBound b;
  b.t_star = cert.t_star;
  if (traj.verdict == Verdict::blow_up) {
    b.t_obs = traj.t_end;
    b.t_obs_within = b.t_obs <= b.t_star;
  }
  b.asserted = cert.valid();
  const std::size_t iM = column(traj, "M_R"), iK = column(traj, "K_R"), iT = column(traj, "tail_mass");
  b.parabola_holds = true;
  b.kr_bound_holds = true;
  b.max_excess = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    const double excess = s.extras[iM] - cert.parabola(s.t);
    b.max_excess = std::max(b.max_excess, excess);
    if (excess > 1e-12 * std::max(1.0, std::abs(cert.M0))) b.parabola_holds = false;
    if (s.extras[iK] < -0.25 * cert.epsilon0) b.kr_bound_holds = false;
    if (std::isnan(b.T_R) && s.extras[iT] > cert.m_star) b.T_R = s.t;
  }
  if (!b.asserted) b.parabola_holds = false;
  return b;
}

}  // namespace critnls
