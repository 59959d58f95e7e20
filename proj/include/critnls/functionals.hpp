#pragma once

#include <vector>

#include "critnls/field.hpp"
#include "critnls/parameters.hpp"

namespace critnls {

// The four integrals every functional is built from.
struct NormSet {
  double mass = 0.0;
  double grad2 = 0.0;
  double lp1 = 0.0;
  double lcrit = 0.0;

  // Exact effect of the L2-invariant dilation u -> lambda^{d/2} u(lambda r).
  NormSet scaled(double lambda, const Parameters& params) const;
};

struct FunctionalReport {
  double mass = 0.0;
  double grad2 = 0.0;
  double lp1 = 0.0;
  double lcrit = 0.0;
  double H = 0.0;
  double S_omega = 0.0;
  double K = 0.0;
  double I_omega = 0.0;

  static FunctionalReport from_norms(const NormSet& n, const Parameters& params);
  NormSet norms() const { return {mass, grad2, lp1, lcrit}; }
};

NormSet norms(const RealRadialField& u, const Parameters& params);
NormSet norms(const ComplexRadialField& psi, const Parameters& params);

FunctionalReport report(const RealRadialField& u, const Parameters& params);
FunctionalReport report(const ComplexRadialField& psi, const Parameters& params);

double nehari(const NormSet& n, const Parameters& params);
double action(const NormSet& n, const Parameters& params);

// T_lambda u resampled by monotone cubic interpolation; zero beyond r_max.
RealRadialField l2_scale(const RealRadialField& u, double lambda);

// Unique root of lambda -> K(T_lambda u), computed from the scaling laws of the norms.
double lambda_star(const NormSet& n, const Parameters& params);
double lambda_star(const RealRadialField& u, const Parameters& params);

struct ActionProfileDiagnostic {
  double lambda_star = 0.0;
  std::vector<double> lambdas;           // the scan grid
  std::vector<double> action;            // S_omega(T_lambda u)
  double max_identity_residual = 0.0;    // relative, see action_profile_check
  std::size_t argmax_index = 0;
  double lambda_star_position = 0.0;     // fractional grid index of lambda_star
  bool argmax_matches = false;           // |argmax_index - position| <= 1
  double max_second_difference = 0.0;    // over lambda > lambda_star (1 + 1e-3)
  bool concave_beyond = false;           // max_second_difference <= 1e-10
  bool ok() const { return argmax_matches && concave_beyond; }
};

// Scan grid: geometric points on [lambda_0 / 8, 2 lambda_0], lambda_0 the root of
// the mu = 0 part of K, widened downwards if lambda_star lies below it.
// Identity residual |dS/dlambda - K/lambda| is normalised by the sum of the absolute
// values of the three terms of K/lambda.
ActionProfileDiagnostic action_profile_check(const NormSet& n, const Parameters& params,
                                             std::size_t points = 50);
ActionProfileDiagnostic action_profile_check(const RealRadialField& u, const Parameters& params,
                                             std::size_t points = 50);

RealRadialField schwarz_rearrange(const RealRadialField& u);

}  // namespace critnls
