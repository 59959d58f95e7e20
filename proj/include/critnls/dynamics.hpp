#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "critnls/band.hpp"
#include "critnls/field.hpp"
#include "critnls/functionals.hpp"
#include "critnls/groundstate.hpp"
#include "critnls/parameters.hpp"

namespace critnls {

using cplx = std::complex<double>;

// ---------------------------------------------------------------- set membership

enum class Membership { A_minus, A_plus, boundary_or_outside };
const char* to_string(Membership m);

struct SetMembership {
  Membership kind = Membership::boundary_or_outside;
  double S_omega = 0.0;
  double K = 0.0;
  double m_omega = 0.0;
};

// Strict inequalities with a relative tolerance band: |S - m| <= tol |m| or
// |K| <= tol grad2 count as the boundary. Refuses a non-converged ground state.
SetMembership classify(const RealRadialField& u, const GroundStateResult& ground, const Parameters& params,
                       double tol = 1e-6);
SetMembership classify(const ComplexRadialField& psi, const GroundStateResult& ground, const Parameters& params,
                       double tol = 1e-6);

// ---------------------------------------------------------------- time stepping

struct StepControl {
  double tolerance = 1e-8;  // relative local error per step (step doubling)
  double dt_min = 1e-10;
  double dt_max = 1e-2;
  double dt_initial = 1e-4;
  double safety = 0.9;
  bool quantize = true;     // snap dt to a geometric ladder so factorizations are reused
};

struct SimulationState {
  ComplexRadialField psi;
  double t = 0.0;
  double dt = 1e-4;
  double last_error = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  bool dt_floor_hit = false;
};

class SplitStepIntegrator {
 public:
  // `linear_only` masks both nonlinear terms (test hook for the free flow).
  SplitStepIntegrator(GridPtr grid, Parameters params, StepControl control = {}, bool linear_only = false);

  // One Strang step of fixed size on the interior unknowns (dt may be negative).
  std::vector<cplx> strang(const std::vector<cplx>& v, double dt) const;
  ComplexRadialField strang(const ComplexRadialField& psi, double dt) const;

  // One accepted adaptive step, never stepping past t_stop. Returns false (and sets
  // dt_floor_hit) when the controller would need dt below dt_min.
  bool step(SimulationState& state, double t_stop) const;

  const StepControl& control() const { return control_; }
  const GridPtr& grid() const { return grid_; }
  const Parameters& params() const { return params_; }

 private:
  const BandLU<cplx>& factor(double dt) const;
  double rate(double modulus_squared) const;
  void phase(std::vector<cplx>& v, double dt) const;
  void linear(std::vector<cplx>& v, double dt) const;
  // One step of size dt and two of size dt/2 from the same state.
  void trial(const std::vector<cplx>& v, double dt, std::vector<cplx>& big, std::vector<cplx>& half) const;
  double m_norm(const std::vector<cplx>& v) const;
  double snap(double dt) const;

  GridPtr grid_;
  Parameters params_;
  StepControl control_;
  bool linear_only_;
  BandMatrix<double> A_;
  std::vector<double> M_;
  mutable std::map<double, BandLU<cplx>> cache_;
};

// ---------------------------------------------------------------- trajectories

enum class Verdict { global_horizon, blow_up, inconclusive };
const char* to_string(Verdict v);

struct TrajectorySample {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double H = 0.0;
  double S_omega = 0.0;
  double K = 0.0;
  double grad2 = 0.0;
  double boundary_mass = 0.0;   // mass in r > 0.9 r_max
  double M_R = std::nan("");    // first observer value, if any
  std::vector<double> extras;   // observer outputs
};

using Observer = std::function<std::vector<double>(const ComplexRadialField&)>;

struct EvolveOptions {
  StepControl control;
  double sample_interval = 0.01;
  double blowup_growth = 100.0;
  double mass_tolerance = 1e-6;
  double boundary_fraction = 0.9;
  double boundary_tolerance = 1e-6;
  bool linear_only = false;
  std::size_t max_steps = 50000000;
  double wall_limit_seconds = 0.0;  // 0 = none
  Observer observer;                // e.g. localized virial quantities
  std::vector<std::string> observer_columns;
  bool keep_final_state = true;
};

struct TrajectoryRecord {
  Parameters params;
  std::vector<TrajectorySample> samples;
  std::vector<std::string> observer_columns;
  Verdict verdict = Verdict::inconclusive;
  std::string reason;
  double horizon = 0.0;
  double t_end = 0.0;
  double t_blowup_estimate = std::nan("");
  double epsilon0 = 0.0;         // -sup K when positive, else 0
  double max_mass_drift = 0.0;   // relative
  double max_H_drift = 0.0;      // relative to |H(0)| + grad2(0)
  double max_S_drift = 0.0;      // relative to |S(0)|
  double max_boundary_mass = 0.0;
  std::optional<SetMembership> membership;
  // Flow-invariance checks against the reference level m_omega.
  bool K_negative_throughout = true;
  bool K_positive_throughout = true;
  bool K_bound_throughout = true;  // K(psi(t)) < S(psi0) - m_omega
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double wall_seconds = 0.0;
  std::optional<ComplexRadialField> final_state;
};

TrajectoryRecord evolve(const ComplexRadialField& psi0, const Parameters& params, double horizon,
                        const GroundStateResult* ground = nullptr, const EvolveOptions& options = {});

struct KBoundDiagnostic {
  bool applicable = false;
  double max_excess = 0.0;  // max_t K(psi(t)) - (S(psi0) - m_omega)
  double epsilon0 = 0.0;
};

KBoundDiagnostic k_bound_monitor(const TrajectoryRecord& traj, double m_omega);

}  // namespace critnls
