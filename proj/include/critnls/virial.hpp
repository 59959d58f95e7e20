#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "critnls/dynamics.hpp"
#include "critnls/field.hpp"
#include "critnls/parameters.hpp"

namespace critnls {

// The bump rho(x) = c exp(-1/(1-(x-2)^2)) on (1,3), normalised to unit integral,
// and the primitives of w(s) = s - int_0^s (s-t) rho(t) dt.
namespace bump {
double normalization();          // c
double rho(double x);
double rho_prime(double x);
double rho_second(double x);
double cumulative(double x);     // int_0^x rho
double first_moment(double x);   // int_0^x t rho(t) dt
double w(double s);
double w_prime(double s);        // 1 - cumulative(s)
}  // namespace bump

// A radial weight known analytically together with its radial derivative.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

// Localized virial weight W_R(r) = R^2 w(r^2/R^2) sampled on a grid. Derivatives are
// chain-rule expressions in rho, rho', rho''.
struct VirialWeight {
  double R = 0.0;
  int d = 0;
  GridPtr grid;
  std::vector<double> s;       // r^2 / R^2 at the nodes
  std::vector<double> w;       // w(s)
  std::vector<double> W;       // W_R
  std::vector<double> grad;    // |grad W_R| = 2 r w'(s)
  std::vector<double> lap;     // Delta W_R
  std::vector<double> bilap;   // Delta^2 W_R
  std::vector<double> kappa1, kappa2;
  std::vector<double> kappa1_mid, grad_mid;  // at the midpoints

  // Sup norms of W_R, |grad W_R| and Delta^2 W_R, normalised by R^2, R and R^-2. The
  // constants are maxima of the analytic expressions in s, independent of the grid.
  double W_constant = 0.0;
  double grad_constant = 0.0;
  double bilap_constant = 0.0;
  double grad_sup() const { return grad_constant * R; }
  double bilap_sup() const { return bilap_constant / (R * R); }

  RadialProfile kappa1_profile() const;
  RadialProfile kappa2_profile() const;
};

// Requires R > 0 and sqrt(3) R < r_max; every invariant of the weight is verified
// on the samples and a violation raises a domain error naming it.
VirialWeight build_weight(double R, const GridPtr& grid, int d);

// K^R(v) = int kappa1 |grad v|^2 - int kappa2 (mu (p-1)/(p+1) |v|^{p+1} + (2/d) |v|^{2*}).
double localized_k(const RealRadialField& v, const VirialWeight& weight, const Parameters& params);
double localized_k(const ComplexRadialField& v, const VirialWeight& weight, const Parameters& params);

// Gradient part of K^R only (the value used for linear evolution).
double localized_k_linear(const ComplexRadialField& v, const VirialWeight& weight);

struct VirialMoments {
  double M_R = 0.0;        // int W_R |psi|^2
  double P_R = 0.0;        // Im int grad W_R . grad psi conj(psi)
  double K_R = 0.0;
  double bilap = 0.0;      // int Delta^2 W_R |psi|^2
  double tail_mass = 0.0;  // mass in r >= R
};

VirialMoments virial_moments(const ComplexRadialField& psi, const VirialWeight& weight, const Parameters& params,
                             bool linear_only = false);

// Observer for evolve(); columns are virial_columns().
Observer virial_observer(const VirialWeight& weight, const Parameters& params, bool linear_only = false);
const std::vector<std::string>& virial_columns();

struct VirialResidual {
  std::vector<double> t;         // centre of each second-difference triple
  std::vector<double> lhs;       // second difference of M_R
  std::vector<double> rhs;       // K - K^R - (1/4) int Delta^2 W_R |psi|^2, weights (1, 10, 1) / 12 over the triple
  std::vector<double> relative;  // |lhs - rhs| / (2 grad2)
  double max_relative = 0.0;
  double t_at_max = 0.0;
  double window_end = 0.0;
};

// Second differences are taken over consecutive, equally spaced samples with
// t <= window_end and grad2 <= max_growth * grad2(0). The window also ends before the
// first sample whose neighbours differ in grad2 by more than max_change * grad2: past
// that point the sample spacing no longer resolves the flow. Fewer than three usable
// samples raises a resolution error.
VirialResidual virial_residual(const TrajectoryRecord& traj, const VirialWeight& weight, const Parameters& params,
                               double window_end = std::numeric_limits<double>::infinity(),
                               double max_growth = 10.0, double max_change = 0.05);

struct StraussDiagnostic {
  double lhs = 0.0;         // sup kappa^{1/2} |u|
  double rhs = 0.0;         // bound without the constant
  double fitted_C = 0.0;    // lhs / rhs (0 when both vanish)
  double analytic_C = 0.0;  // sqrt(2 / s_{d-1})
};

StraussDiagnostic strauss_check(const RealRadialField& u, const RadialProfile& kappa);

struct StraussFamily {
  std::vector<double> fitted_C;
  double max_C = 0.0;
  double analytic_C = 0.0;
  double max_first_half = 0.0, max_second_half = 0.0;
};

// Randomized radial bumps (sums of Gaussian shells) tested against kappa.
StraussFamily strauss_family(const GridPtr& grid, const RadialProfile& kappa, std::size_t count,
                             std::uint64_t seed, double scale);

struct MStarOptions {
  std::size_t budget = 400;
  std::uint64_t seed = 1;
};

struct BlowupCertificate {
  double R = 0.0;
  double epsilon0 = 0.0;
  double P0 = 0.0;
  double M0 = 0.0;
  double mass0 = 0.0;
  double delta2_bound = 0.0;      // ||Delta^2 W_R||_inf ||psi0||^2
  double tail_mass0 = 0.0;        // mass of psi0 in r >= R
  double weighted_term = 0.0;     // R^-2 (1 + ||grad W_R||_inf^2 / eps0) M0
  // Surrogate for the tail-mass threshold: the smallest tail mass found among sampled
  // admissible fields (K^R <= -eps0/4, ||v|| <= ||psi0||). It bounds the infimum from
  // above only. When no sample is admissible the threshold is the mass bound ||psi0||^2
  // and m_star_search_empty is set; m_star_min_KR is then the closest miss.
  double m_star = 0.0;
  std::size_t m_star_budget = 0;
  std::size_t m_star_admissible = 0;
  bool m_star_search_empty = false;
  double m_star_min_KR = 0.0;   // smallest K^R over the sampled shapes at full mass
  std::uint64_t m_star_seed = 0;
  bool delta2_ok = false;
  bool tail_ok = false;
  bool weighted_ok = false;
  bool valid() const { return delta2_ok && tail_ok && weighted_ok; }
  double t_star = 0.0;  // positive root of M0 + t P0 - (eps0/2) t^2

  double parabola(double t) const { return M0 + t * P0 - 0.5 * epsilon0 * t * t; }
};

// epsilon0 <= 0 raises a domain error: no certificate exists for such data.
BlowupCertificate make_certificate(const ComplexRadialField& psi0, double epsilon0, const VirialWeight& weight,
                                   const Parameters& params, const MStarOptions& options = {});

struct BlowupBound {
  bool asserted = false;              // false when the certificate is invalid
  bool parabola_holds = false;        // M_R(t) <= parabola(t) at every pre-verdict sample
  double max_excess = 0.0;            // max (M_R - parabola)
  bool kr_bound_holds = false;        // K^R(psi(t)) >= -eps0/4 at every sample
  double t_star = 0.0;
  double t_obs = std::nan("");        // verdict time of a blow-up run
  bool t_obs_within = false;          // t_obs <= t_star
  double T_R = std::nan("");          // first sample with tail mass above m_star
};

BlowupBound blowup_bound(const BlowupCertificate& cert, const TrajectoryRecord& traj);

}  // namespace critnls
