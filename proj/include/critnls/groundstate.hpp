#pragma once

#include <optional>
#include <string>
#include <vector>

#include "critnls/field.hpp"
#include "critnls/functionals.hpp"
#include "critnls/parameters.hpp"

namespace critnls {

// ---------------------------------------------------------------- Talenti profiles

double cutoff(double r);             // 1 on [0,1], 0 on [2, inf)
double cutoff_derivative(double r);

struct TalentiProfile {
  int d = 4;
  double epsilon = 1.0;
  bool cutoff_applied = false;

  double value(double r) const;
  double derivative(double r) const;

  // Samples on the grid. Profiles that do not vanish at r_max get a smooth outer taper
  // on [0.75 r_max, r_max] so that the decay clamp does not create a jump.
  RealRadialField sample(const GridPtr& grid) const;
};

TalentiProfile talenti(double epsilon, int d);
TalentiProfile test_function(double epsilon, int d);  // epsilon in (0, 1)

// Norms over the ball of radius r_max by composite Gauss-Legendre quadrature of the
// analytic profile; with `whole_space` the asymptotic tail beyond r_max is added
// (only meaningful without cutoff).
NormSet profile_norms(const TalentiProfile& w, double p, double r_max, bool whole_space = false);

// ---------------------------------------------------------------- Sobolev constant

double sobolev_sigma_closed_form(int d);

struct SobolevOptions {
  std::vector<double> epsilons{1.0};
  std::vector<std::size_t> levels{4096, 8192, 16384};
  double r_max = 40.0;
};

struct SobolevConstant {
  int d = 0;
  double sigma = 0.0;
  double sigma_pow = 0.0;  // sigma^{d/2}, Richardson value on the finest pair, epsilon = first entry
  std::vector<double> epsilons;
  std::vector<std::size_t> levels;
  std::vector<std::vector<double>> grad2;   // [epsilon][level]
  std::vector<std::vector<double>> lcrit;   // [epsilon][level]
  std::vector<double> extrapolated;         // Richardson values for consecutive level pairs (first epsilon)
  double refinement_spread = 0.0;           // relative spread of the extrapolated values
  double consistency = 0.0;                 // max relative |grad2 - lcrit| over epsilons, finest level
  double epsilon_spread = 0.0;              // max relative deviation of grad2 across epsilons
  int extrapolation_order = 2;
};

SobolevConstant sobolev_constant(int d, const SobolevOptions& options = {});

// ---------------------------------------------------------------- Brezis-Nirenberg scan

struct BnRow {
  double epsilon = 0.0;
  double lambda = 0.0;
  double I_omega = 0.0;
  NormSet norms;
};

struct BnScan {
  Parameters params;
  std::vector<BnRow> rows;
  double sigma_pow = 0.0;
  double bound = 0.0;         // (2/d) sigma^{d/2}
  double min_I = 0.0;
  double argmin_epsilon = 0.0;
  bool inequality = false;
  double margin = 0.0;        // (bound - min_I) / bound
  double predicted_exponent = 0.0;
  double fit_window = 0.1;    // exponent fitted on epsilon <= fit_window
  double fitted_exponent = 0.0;
  double fitted_exponent_full = 0.0;
  bool monotone_asymptotic = false;  // lambda increases as epsilon decreases on the fit window
  bool monotone_full = false;
};

std::vector<double> default_bn_epsilons(std::size_t count = 15);
BnScan bn_scan(const Parameters& params, const std::vector<double>& epsilons, double r_max = 40.0,
               double fit_window = 0.1);

// ---------------------------------------------------------------- ground states

struct GroundStateResult {
  RealRadialField Q;
  FunctionalReport report;
  double m_omega = 0.0;
  double m_tilde = 0.0;
  double elliptic_residual = 0.0;    // ||-Delta Q + w Q - mu Q^p - Q^{2*-1}||_{L2}
  double elliptic_tolerance = 0.0;
  double nehari_residual = 0.0;      // |K(Q)| / grad2(Q)
  double nehari_tolerance = 0.0;
  double pohozaev_residual = 0.0;    // relative to w ||Q||^2
  double pohozaev_tolerance = 1e-4;
  std::size_t iterations = 0;
  bool converged = false;
  std::string method;
  std::string message;
  double amplitude = 0.0;            // Q(0)
};

double elliptic_residual(const RealRadialField& Q, const Parameters& params);
double pohozaev_residual(const RealRadialField& Q, const Parameters& params);

struct NehariOptions {
  double tol_pde = 1e-6;         // relative to w ||Q||_{L2}
  double tol_K = 1e-6;           // relative to grad2
  std::size_t max_iterations = 50000;
  std::size_t rearrange_every = 10;
  double armijo = 1e-4;
  double descent_tolerance = 1e-7;  // projected-gradient H1 norm relative to ||v||_{H1}
  bool newton_polish = true;
};

// Constrained descent on the Nehari manifold followed by a Newton polish of the
// discrete elliptic equation. A default Gaussian start is used when `initial` is empty.
GroundStateResult minimize_nehari(const Parameters& params, const GridPtr& grid,
                                  const std::optional<RealRadialField>& initial = std::nullopt,
                                  const NehariOptions& options = {});

enum class ShotOutcome { overshoot, undershoot, undecided };

struct Shot {
  ShotOutcome outcome = ShotOutcome::undecided;
  double r_event = 0.0;
};

struct ShootOptions {
  double r0 = 1e-6;
  double r_end = 40.0;
  double rtol = 1e-12;
  double atol = 1e-15;
  double tol_K = 1e-6;
  // The discrete operator applied to the continuum profile only measures grid truncation
  // (about 7% of w ||Q|| for the d = 4 ground state at N = 4096).
  double tol_pde = 0.25;
  std::size_t max_bisections = 200;
};

Shot shoot_once(const Parameters& params, double amplitude, const ShootOptions& options = {});

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

// Scans amplitudes geometrically on [a_min, a_max]; throws Error(bracket) when no two
// consecutive amplitudes separate overshoot from undershoot.
Bracket find_bracket(const Parameters& params, double a_min = 0.1, double a_max = 1e3, std::size_t count = 61,
                     const ShootOptions& options = {});

GroundStateResult shoot_radial(const Parameters& params, const GridPtr& grid, const Bracket& bracket,
                               const ShootOptions& options = {});

// ---------------------------------------------------------------- 3D probe

struct PohozaevWeight {
  GridPtr grid;
  std::vector<double> g, g1, g3;

  static PohozaevWeight build(const GridPtr& grid);
  double max_ode_defect() const;  // max |g''' - 4 g'|
};

struct ProbeRow {
  double mu = 0.0;
  bool converged = false;
  bool inconclusive = true;
  std::string message;
  double A = 0.0;              // includes the factor mu
  double J = 0.0;              // A / mu
  double B = 0.0;
  double h1 = 0.0;             // ||u||_{H1}
  double l6 = 0.0;             // ||u||_{L6}^6
  double C_A = 0.0;            // |J| / ||u||_{H1}^{p+1}
  double B_ratio = 0.0;        // B / ||u||_{L6}^6
  double residual_sum = 0.0;   // |A + B| / B
  double h1_bound = 0.0;       // I_w(T_lambda chi) / min(w, c1) for a fixed Gaussian chi
  double m_tilde = 0.0;
  double core_width = 0.0;     // radius where u drops to half its maximum
};

struct ProbeTable {
  Parameters base;
  std::vector<ProbeRow> rows;
};

ProbeRow probe_terms(const RealRadialField& u, const Parameters& params);
ProbeTable probe_3d(const Parameters& base, const std::vector<double>& mus, const GridPtr& grid,
                    const NehariOptions& options = {});

}  // namespace critnls
