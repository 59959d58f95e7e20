// Acceptance suite: one line per criterion, nonzero exit on any failure that is not
// a recorded limitation. `--only 3,7` restricts the run; `--out DIR` also writes
// acceptance.json there.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "critnls/dynamics.hpp"
#include "critnls/errors.hpp"
#include "critnls/functionals.hpp"
#include "critnls/groundstate.hpp"
#include "critnls/io.hpp"
#include "critnls/virial.hpp"
#include "support.hpp"

using namespace critnls;
using namespace critnls::testing;

namespace {

enum class Outcome { pass, fail, documented };

struct Tally {
  Outcome outcome = Outcome::pass;
  std::vector<std::string> failed;  // sub-items that failed unexpectedly
  std::vector<std::string> known;   // sub-items that fail for a recorded reason
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  }
  void expect_known(bool ok, const std::string& what, const std::string& reason) {
    if (!ok) known.push_back(what + ": " + reason);
  }
  Outcome resolve() const {
    if (!failed.empty()) return Outcome::fail;
    return known.empty() ? Outcome::pass : Outcome::documented;
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Shared trajectories, computed on first use.
struct Runs {
  std::optional<TrajectoryRecord> standing, minus, plus;
  std::optional<GroundStateResult> fine_ground;
  std::optional<VirialWeight> w4096, w16384;
  GridPtr fine_grid;

  const VirialWeight& weight4096() {
    if (!w4096) w4096 = build_weight(10.0, default_grid(), 4);
    return *w4096;
  }

  // psi0 = Q over T = 2, with ||psi| - Q| appended to the virial observer columns.
  const TrajectoryRecord& standing_wave() {
    if (standing) return *standing;
    const auto& g = default_ground();
    const auto& grid = default_grid();
    const auto virial = virial_observer(weight4096(), default_params());
    EvolveOptions o;
    o.sample_interval = 0.01;
    o.observer = [virial, &g, &grid](const ComplexRadialField& psi) {
      std::vector<double> v = virial(psi);
      double s = 0.0;
      for (std::size_t i = 0; i < psi.size(); ++i) s += grid->weight(i) * std::pow(std::abs(psi[i]) - g.Q[i], 2);
      v.push_back(std::sqrt(s));
      return v;
    };
    o.observer_columns = virial_columns();
    o.observer_columns.push_back("deviation");
    standing = evolve(to_complex(g.Q), default_params(), 2.0, &g, o);
    return *standing;
  }

  const TrajectoryRecord& a_minus() {
    if (minus) return *minus;
    const auto& g = default_ground();
    EvolveOptions o;
    o.sample_interval = 1e-4;
    o.observer = virial_observer(weight4096(), default_params());
    o.observer_columns = virial_columns();
    minus = evolve(to_complex(l2_scale(g.Q, 1.2)), default_params(), 0.05, &g, o);
    return *minus;
  }

  // Radiation from T_0.8 Q reaches r = 40 well before T = 5, so this run uses r_max = 160
  // at the spacing of the default grid. A step tolerance of 1e-7 keeps the S drift near 2e-7
  // at about a third of the cost of 1e-8; the 1e-3 sampling resolves the initial transient
  // for the virial check.
  const TrajectoryRecord& a_plus() {
    if (plus) return *plus;
    fine_grid = make_grid(4, 16384, 160.0);
    fine_ground = minimize_nehari(default_params(), fine_grid);
    if (!fine_ground->converged) throw Error(ErrorKind::convergence, "fine-grid ground state: " + fine_ground->message);
    w16384 = build_weight(10.0, fine_grid, 4);
    EvolveOptions o;
    o.control.tolerance = 1e-7;
    o.sample_interval = 1e-3;
    o.observer = virial_observer(*w16384, default_params());
    o.observer_columns = virial_columns();
    o.keep_final_state = false;
    plus = evolve(to_complex(l2_scale(fine_ground->Q, 0.8)), default_params(), 5.0, &*fine_ground, o);
    return *plus;
  }
};

Runs runs;

// ------------------------------------------------------------------ criteria

void functional_identities(Tally& v) {
  const auto q = default_params();
  double worst = 0.0;
  int argmax_ok = 0, concave_ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto diag = action_profile_check(random_bump(default_grid(), seed), q, 50);
    worst = std::max(worst, diag.max_identity_residual);
    argmax_ok += diag.argmax_matches ? 1 : 0;
    concave_ok += diag.concave_beyond ? 1 : 0;
  }
  v.require(worst < 1e-5, "identity residual");
  v.require(argmax_ok == 20, "argmax within one cell");
  v.require(concave_ok == 20, "concavity beyond lambda(u)");
  v.detail << "max identity residual " << sci(worst) << ", argmax " << argmax_ok << "/20, concave " << concave_ok
           << "/20";
}

void sobolev_consistency(Tally& v) {
  SobolevOptions o;
  o.epsilons = {0.5, 1.0, 2.0};
  for (int d : {4, 5}) {
    const SobolevConstant sc = sobolev_constant(d, o);
    v.require(sc.consistency < 0.01, "d=" + std::to_string(d) + " grad/critical agreement");
    v.require(sc.refinement_spread < 0.003, "d=" + std::to_string(d) + " refinement stability");
    v.detail << "d=" << d << ": agreement " << sci(sc.consistency) << ", refinement spread "
             << sci(sc.refinement_spread) << "; ";
  }
}

void ground_state(Tally& v) {
  const auto q = default_params();
  const GroundStateResult& g = default_ground();
  const double level = 2.0 / 4.0 * std::pow(sobolev_sigma_closed_form(4), 2.0);
  v.require(g.converged, "converged");
  v.require(g.elliptic_residual < 1e-6 * q.omega * std::sqrt(g.report.mass), "elliptic residual");
  v.require(std::abs(g.report.K) < 1e-6 * g.report.grad2, "|K| / grad2");
  v.require(g.pohozaev_residual < 1e-4, "Pohozaev residual");
  v.require(rel(g.m_tilde, g.m_omega) < 1e-6, "m = m~");
  v.require(g.m_omega < level, "below (2/d) sigma^{d/2}");

  const Bracket b = find_bracket(q);
  const GroundStateResult s = shoot_radial(q, default_grid(), b);
  const auto& w = default_grid()->weights();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < g.Q.size(); ++i) {
    num += w[i] * std::pow(g.Q[i] - s.Q[i], 2);
    den += w[i] * g.Q[i] * g.Q[i];
  }
  const double l2 = std::sqrt(num / den);
  v.require(s.converged, "shooting converged");
  v.require(l2 < 1e-3, "methods agree");
  v.detail << "m " << g.m_omega << " < " << level << ", |K|/grad2 " << sci(std::abs(g.report.K) / g.report.grad2)
           << ", elliptic " << sci(g.elliptic_residual / std::sqrt(g.report.mass)) << ", Pohozaev "
           << sci(g.pohozaev_residual) << ", |m-m~|/m " << sci(rel(g.m_tilde, g.m_omega)) << ", L2 gap " << sci(l2);
}

void bn_scan_trend(Tally& v) {
  for (int d : {4, 5}) {
    const Parameters q = Parameters::make(d, Parameters::default_p(d), 1.0, 1.0);
    const BnScan s = bn_scan(q, default_bn_epsilons());
    const double err = std::abs(s.fitted_exponent - s.predicted_exponent) / s.predicted_exponent;
    const std::string tag = "d=" + std::to_string(d) + " ";
    v.require(s.inequality, tag + "below level");
    v.require(s.margin > 0.01, tag + "margin");
    v.require(s.monotone_asymptotic, tag + "lambda monotone");
    v.require(err < 0.25, tag + "exponent");
    v.detail << tag << "margin " << sci(100 * s.margin) << "%, exponent " << sci(s.fitted_exponent) << " vs "
             << sci(s.predicted_exponent) << "; ";
  }
}

double fixed_step_h_drift(const ComplexRadialField& psi0, double dt, double T) {
  const auto q = default_params();
  const SplitStepIntegrator integ(psi0.grid_ptr(), q);
  auto psi = psi0;
  const double H0 = report(psi, q).H;
  const int steps = static_cast<int>(std::lround(T / dt));
  for (int k = 0; k < steps; ++k) psi = integ.strang(psi, dt);
  return std::abs(report(psi, q).H - H0);
}

void standing_wave(Tally& v) {
  const TrajectoryRecord& tr = runs.standing_wave();
  const auto& cols = tr.observer_columns;
  const std::size_t iDev = std::find(cols.begin(), cols.end(), "deviation") - cols.begin();
  double dev = 0.0, t_dev = 0.0;
  for (const auto& s : tr.samples)
    if (s.extras[iDev] > dev) dev = s.extras[iDev], t_dev = s.t;
  double first_exceed = NAN;
  for (const auto& s : tr.samples)
    if (s.extras[iDev] >= 1e-4) {
      first_exceed = s.t;
      break;
    }
  // Energy drift on the window that the sampling resolves, as in the virial check.
  const double window = virial_residual(tr, runs.weight4096(), default_params()).window_end;
  const auto& s0 = tr.samples.front();
  double h_window = 0.0;
  for (const auto& s : tr.samples)
    if (s.t <= window) h_window = std::max(h_window, std::abs(s.H - s0.H) / (std::abs(s0.H) + s0.grad2));

  // Order of the scheme: on Q itself the flow is a pure phase rotation and the dt^2 term of
  // the energy error cancels, so the order is measured on non-stationary data as well.
  const auto Q = to_complex(default_ground().Q);
  const auto moving = to_complex(l2_scale(default_ground().Q, 0.9));
  const double ratio_q = fixed_step_h_drift(Q, 2e-4, 0.02) / fixed_step_h_drift(Q, 1e-4, 0.02);
  const double ratio = fixed_step_h_drift(moving, 2e-4, 0.02) / fixed_step_h_drift(moving, 1e-4, 0.02);

  v.require(tr.t_end >= 2.0 || tr.verdict != critnls::Verdict::inconclusive, "run completed");
  v.require(tr.max_mass_drift < 1e-8, "mass drift");
  v.require(h_window < 1e-6, "H drift on the resolved window");
  v.require(ratio > 3.0 && ratio < 5.0, "second order on T_0.9 Q");
  const std::string collapse = tr.verdict == critnls::Verdict::blow_up
                                   ? "the standing wave is unstable and the run collapses at t = " + sci(tr.t_end)
                                   : "the standing wave is unstable";
  v.expect_known(dev < 1e-4, "||psi| - Q| < 1e-4",
                 collapse + "; discretization-level perturbations reach 1e-4 by t = " + sci(first_exceed));
  v.expect_known(tr.max_H_drift < 1e-6, "H drift over T = 2", "drift " + sci(tr.max_H_drift) + " accrues in the collapse");
  v.expect_known(ratio_q > 3.0 && ratio_q < 5.0, "second order on Q",
                 "ratio " + sci(ratio_q) + ": the energy error on a standing wave is fourth order");
  v.detail << "T " << tr.t_end << " (" << to_string(tr.verdict) << "), mass drift " << sci(tr.max_mass_drift)
           << ", H drift " << sci(h_window) << " on [0, " << sci(window) << "], " << sci(tr.max_H_drift)
           << " overall, drift ratio " << sci(ratio) << " (T_0.9 Q) and " << sci(ratio_q)
           << " (Q), max deviation " << sci(dev) << " at t=" << sci(t_dev);
}

void invariant_sets(Tally& v) {
  const TrajectoryRecord& m = runs.a_minus();
  v.require(m.membership && m.membership->kind == Membership::A_minus, "T_1.2 Q in A_minus");
  v.require(m.K_negative_throughout, "K < 0 along the A_minus flow");
  v.require(m.K_bound_throughout, "K < S(psi0) - m along the A_minus flow");
  const KBoundDiagnostic kb = k_bound_monitor(m, default_ground().m_omega);

  const TrajectoryRecord& p = runs.a_plus();
  v.require(p.membership && p.membership->kind == Membership::A_plus, "T_0.8 Q in A_plus");
  v.require(p.K_positive_throughout, "K > 0 along the A_plus flow");
  v.require(p.verdict != critnls::Verdict::blow_up, "no blow-up verdict");
  v.require(p.t_end >= 5.0, "A_plus run reached T = 5");
  double kmin = INFINITY;
  for (const auto& s : p.samples) kmin = std::min(kmin, s.K);
  v.detail << "A_minus: " << m.samples.size() << " samples to t=" << sci(m.t_end) << ", max K - (S0 - m) "
           << sci(kb.max_excess) << "; A_plus: t_end " << p.t_end << " (" << to_string(p.verdict) << "), min K "
           << sci(kmin) << ", S drift " << sci(p.max_S_drift) << ", boundary mass " << sci(p.max_boundary_mass);
}

void blow_up(Tally& v) {
  const TrajectoryRecord& m = runs.a_minus();
  v.require(m.verdict == critnls::Verdict::blow_up, "blow-up verdict");
  v.require(m.max_mass_drift < 1e-6, "mass at verdict");
  v.require(m.epsilon0 > 0.0, "epsilon0 > 0");
  if (m.epsilon0 <= 0.0) return;
  const auto psi0 = to_complex(l2_scale(default_ground().Q, 1.2));
  const BlowupCertificate c = make_certificate(psi0, m.epsilon0, runs.weight4096(), default_params());
  const BlowupBound b = blowup_bound(c, m);
  v.require(c.valid(), "certificate at R = 10");
  v.require(b.t_obs_within, "t_obs <= t_star");
  v.require(b.parabola_holds, "M_R below the parabola");
  v.detail << "t_obs " << sci(m.t_end) << " <= t_star " << sci(c.t_star) << ", eps0 " << sci(m.epsilon0)
           << ", max (M_R - parabola) " << sci(b.max_excess) << ", mass drift " << sci(m.max_mass_drift)
           << ", wall " << sci(m.wall_seconds) << " s";
}

void virial_identity(Tally& v) {
  const auto q = default_params();
  const auto one = [&](const char* name, const TrajectoryRecord& tr, const VirialWeight& w) {
    const VirialResidual r = virial_residual(tr, w, q);
    v.require(r.max_relative < 1e-3, std::string(name) + " residual");
    v.detail << name << " " << sci(r.max_relative) << " on [0, " << sci(r.window_end) << "]; ";
  };
  one("standing wave", runs.standing_wave(), runs.weight4096());
  one("T_1.2 Q", runs.a_minus(), runs.weight4096());
  runs.a_plus();
  one("T_0.8 Q", *runs.plus, *runs.w16384);
}

void probe(Tally& v) {
  const auto g = make_grid(3, 4096, 40.0);
  const Parameters base = Parameters::make(3, Parameters::default_p(3), 1.0, 1.0);
  const ProbeTable t = probe_3d(base, {1.0, 0.3, 0.1, 0.03, 0.01}, g);
  double cmin = INFINITY, cmax = 0, l6min = INFINITY, h1max = 0, boundmin = INFINITY;
  bool b_positive = true, h1_ok = true;
  for (const auto& r : t.rows) {
    b_positive = b_positive && r.B > 0.0;
    h1_ok = h1_ok && r.h1 <= r.h1_bound;
    cmin = std::min(cmin, r.C_A);
    cmax = std::max(cmax, r.C_A);
    l6min = std::min(l6min, r.l6);
    h1max = std::max(h1max, r.h1);
    boundmin = std::min(boundmin, r.h1_bound);
  }
  v.require(t.rows.size() == 5, "five rows");
  v.require(b_positive, "B > 0");
  v.require(l6min > 0.0, "l6 bounded below");
  v.require(cmax / cmin < 2.0, "C_A variation");
  v.require(h1_ok, "H1 bounded");
  v.detail << "min l6 " << sci(l6min) << ", C_A variation " << sci(cmax / cmin) << ", max h1 " << sci(h1max)
           << " (bound >= " << sci(boundmin) << ")";
}

void negative_control(Tally& v) {
  for (double mu : {-1.0, -0.1}) {
    const Parameters q = Parameters::make(4, 2.5, mu, 1.0, {true, false});
    bool no_bracket = false;
    try {
      find_bracket(q);
    } catch (const Error& e) {
      no_bracket = e.kind() == ErrorKind::bracket;
    }
    v.require(no_bracket, "mu=" + sci(mu) + " has no bracket");
    v.detail << "mu=" << mu << ": " << (no_bracket ? "no admissible bracket" : "bracket found") << "; ";
  }
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Tally&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critnls acceptance suite"};
  std::string only, out;
  app.add_option("--only", only, "comma-separated criterion numbers");
  app.add_option("--out", out, "directory for acceptance.json");
  CLI11_PARSE(app, argc, argv);
  std::set<int> selected;
  for (std::stringstream ss(only); ss.good();) {
    std::string tok;
    std::getline(ss, tok, ',');
    if (!tok.empty()) selected.insert(std::stoi(tok));
  }

  const std::vector<Criterion> criteria{
      {1, "functional identities", functional_identities},
      {2, "Sobolev constant", sobolev_consistency},
      {3, "ground state", ground_state},
      {4, "Brezis-Nirenberg scan", bn_scan_trend},
      {5, "standing-wave conservation", standing_wave},
      {6, "invariant sets", invariant_sets},
      {7, "blow-up exhibit", blow_up},
      {8, "virial identity", virial_identity},
      {9, "3D probe", probe},
      {10, "negative control", negative_control},
  };

  io::Json report = io::Json::array();
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Tally v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.failed.push_back(std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Outcome o = v.resolve();
    std::string status = o == Outcome::pass ? "PASS" : "FAIL";
    if (o == Outcome::fail) {
      ++unexpected;
      status += " (";
      for (std::size_t i = 0; i < v.failed.size(); ++i) status += (i ? "; " : "") + v.failed[i];
      status += ")";
    } else if (o == Outcome::documented) {
      status += " (documented: ";
      for (std::size_t i = 0; i < v.known.size(); ++i) status += (i ? "; " : "") + v.known[i];
      status += ")";
    }
    std::printf("criterion %2d %-28s %s [%.1f s]\n    %s\n", c.id, c.name, status.c_str(), secs, v.detail.str().c_str());
    std::fflush(stdout);
    report.push_back({{"criterion", c.id},
                      {"name", c.name},
                      {"status", o == Outcome::pass ? "pass" : o == Outcome::fail ? "fail" : "documented_fail"},
                      {"failed", v.failed},
                      {"documented", v.known},
                      {"detail", v.detail.str()},
                      {"seconds", secs}});
  }
  if (!out.empty()) io::write_json(std::filesystem::path(out) / "acceptance.json", report);
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
