#pragma once

namespace critnls {

// Opt-in relaxations of the admissibility rules, used only by negative probes.
struct Admissibility {
  bool allow_nonpositive_mu = false;
  bool allow_boundary_p = false;
};

struct Parameters {
  int d = 4;
  double p = 2.5;
  double mu = 1.0;
  double omega = 1.0;

  double two_star() const { return 2.0 * d / (d - 2.0); }
  double critical_power() const { return 4.0 / (d - 2.0); }

  // Throws Error(domain) naming the violated rule.
  static Parameters make(int d, double p, double mu, double omega, Admissibility rules = {});
  static void validate(const Parameters& params, Admissibility rules = {});

  // Midpoint of the open interval (1 + 4/d, 2* - 1).
  static double default_p(int d);
};

}  // namespace critnls
