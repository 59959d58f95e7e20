#include "critnls/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <future>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "critnls/dynamics.hpp"
#include "critnls/errors.hpp"
#include "critnls/groundstate.hpp"
#include "critnls/virial.hpp"

#ifndef CRITNLS_VERSION
#define CRITNLS_VERSION "0.1.0"
#endif

namespace critnls {

ExitStatus exit_status_for(ErrorKind kind) {
  return kind == ErrorKind::usage ? ExitStatus::usage : ExitStatus::numerical;
}

namespace {

using io::Json;

const char* status_name(ExitStatus s) {
  switch (s) {
    case ExitStatus::pass: return "pass";
    case ExitStatus::assertion: return "assertion_failed";
    case ExitStatus::usage: return "usage_error";
    case ExitStatus::numerical: return "numerical_breakdown";
  }
  return "unknown";
}

std::string tag(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

// Shares ground states between the rows of a sweep. Each key is computed once; other
// rows needing it wait on the same future.
class GroundCache {
 public:
  using Key = std::tuple<int, double, double, double, std::size_t, double>;

  std::shared_ptr<const GroundStateResult> get(const Parameters& q, std::size_t n, double r_max) {
    const Key key{q.d, q.p, q.mu, q.omega, n, r_max};
    std::promise<std::shared_ptr<const GroundStateResult>> mine;
    std::shared_future<std::shared_ptr<const GroundStateResult>> fut;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        fut = mine.get_future().share();
        entries_.emplace(key, fut);
        owner = true;
      } else {
        fut = it->second;
      }
    }
    if (owner) {
      try {
        mine.set_value(std::make_shared<const GroundStateResult>(minimize_nehari(q, make_grid(q.d, n, r_max))));
      } catch (...) {
        mine.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

 private:
  std::mutex mutex_;
  std::map<Key, std::shared_future<std::shared_ptr<const GroundStateResult>>> entries_;
};

struct Task {
  const ExperimentConfig& c;
  Parameters q;
  bool write;
  GroundCache* cache;
  RunResult& res;

  void check(Json& into, const std::string& name, bool ok) {
    into[name] = ok;
    if (!ok) res.failures.push_back(name);
  }

  void artifact(const std::string& name, const io::CsvTable& t) {
    if (!write) return;
    t.write(c.out / name);
    res.artifacts.push_back(name);
  }

  void artifact(const std::string& name, const Json& j) {
    if (!write) return;
    io::write_json(c.out / name, j);
    res.artifacts.push_back(name);
  }

  std::shared_ptr<const GroundStateResult> ground(const GridPtr& grid) {
    if (cache) return cache->get(q, c.N, c.r_max);
    return std::make_shared<const GroundStateResult>(minimize_nehari(q, grid));
  }
};

Json report_json(const FunctionalReport& r) {
  return {{"mass", r.mass}, {"grad2", r.grad2}, {"lp1", r.lp1},         {"lcrit", r.lcrit},
          {"H", r.H},       {"S_omega", r.S_omega}, {"K", r.K},       {"I_omega", r.I_omega}};
}

Json ground_json(const GroundStateResult& g) {
  return {{"method", g.method},
          {"converged", g.converged},
          {"message", g.message},
          {"iterations", g.iterations},
          {"amplitude", g.amplitude},
          {"m_omega", g.m_omega},
          {"m_tilde", g.m_tilde},
          {"elliptic_residual", g.elliptic_residual},
          {"elliptic_tolerance", g.elliptic_tolerance},
          {"nehari_residual", g.nehari_residual},
          {"nehari_tolerance", g.nehari_tolerance},
          {"pohozaev_residual", g.pohozaev_residual},
          {"pohozaev_tolerance", g.pohozaev_tolerance},
          {"functionals", report_json(g.report)}};
}

io::CsvTable profile_table(const RealRadialField& u) {
  io::CsvTable t({"r", "Q"});
  for (std::size_t i = 0; i < u.size(); ++i) t.add_row(std::vector<double>{u.grid().r(i), u[i]});
  return t;
}

double relative_l2(const RealRadialField& a, const RealRadialField& b) {
  const auto& w = a.grid().weights();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
    den += w[i] * a[i] * a[i];
  }
  return std::sqrt(num / den);
}

double sobolev_level(int d) { return (2.0 / d) * std::pow(sobolev_sigma_closed_form(d), 0.5 * d); }

// ---------------------------------------------------------------- groundstate

Json run_groundstate(Task& t) {
  const GridPtr grid = make_grid(t.q.d, t.c.N, t.c.r_max);
  Json s;
  Json checks;
  ShootOptions so;
  so.r_end = t.c.r_max;

  if (t.q.mu <= 0.0) {
    // Negative control: a decaying positive solution must not be found.
    if (t.c.method == "nehari") throw Error(ErrorKind::usage, "mu <= 0 is only run with groundstate.method = shooting");
    std::string message;
    bool bracket_found = true;
    try {
      const Bracket b = find_bracket(t.q, 0.1, 1e3, 61, so);
      message = "bracket [" + io::format_double(b.lo) + ", " + io::format_double(b.hi) + "]";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::bracket) throw;
      bracket_found = false;
      message = e.what();
    }
    s["negative_control"] = {{"bracket_found", bracket_found}, {"message", message}};
    t.check(checks, "no_admissible_bracket", !bracket_found);
    s["checks"] = checks;
    return s;
  }

  const double level = sobolev_level(t.q.d);
  s["sobolev_level"] = level;
  std::shared_ptr<const GroundStateResult> nehari, shooting;
  if (t.c.method != "shooting") nehari = t.ground(grid);
  if (t.c.method != "nehari") shooting = std::make_shared<const GroundStateResult>(
                                  shoot_radial(t.q, grid, find_bracket(t.q, 0.1, 1e3, 61, so), so));

  const auto record = [&](const GroundStateResult& g, const std::string& name) {
    Json j = ground_json(g);
    j["N"] = t.c.N;
    j["rmax"] = t.c.r_max;
    j["below_sobolev_level"] = g.m_omega < level;
    s[name] = j;
    t.artifact(name + ".csv", profile_table(g.Q));
    t.artifact(name + ".json", j);
    t.check(checks, name + ".converged", g.converged);
    t.check(checks, name + ".below_sobolev_level", g.m_omega < level);
  };
  if (nehari) record(*nehari, "ground_state");
  if (shooting) record(*shooting, "ground_state_shooting");
  if (nehari && shooting) {
    const double diff = relative_l2(nehari->Q, shooting->Q);
    s["method_l2_difference"] = diff;
    t.check(checks, "methods_agree", diff < 1e-3);
  }
  s["checks"] = checks;
  return s;
}

// ---------------------------------------------------------------- bnscan

Json run_bnscan(Task& t) {
  const std::vector<double> eps = t.c.epsilons.empty() ? default_bn_epsilons() : t.c.epsilons;
  const BnScan scan = bn_scan(t.q, eps, t.c.r_max);
  io::CsvTable table({"epsilon", "lambda", "I_omega", "mass", "grad2", "lp1", "lcrit"});
  for (const auto& r : scan.rows)
    table.add_row(std::vector<double>{r.epsilon, r.lambda, r.I_omega, r.norms.mass, r.norms.grad2, r.norms.lp1,
                                      r.norms.lcrit});
  t.artifact("bnscan.csv", table);

  const double exponent_error = std::abs(scan.fitted_exponent - scan.predicted_exponent) / scan.predicted_exponent;
  Json s = {{"sigma_pow", scan.sigma_pow},
            {"bound", scan.bound},
            {"min_I", scan.min_I},
            {"argmin_epsilon", scan.argmin_epsilon},
            {"inequality", scan.inequality},
            {"margin", scan.margin},
            {"predicted_exponent", scan.predicted_exponent},
            {"fit_window", scan.fit_window},
            {"fitted_exponent", scan.fitted_exponent},
            {"fitted_exponent_full", scan.fitted_exponent_full},
            {"exponent_relative_error", exponent_error},
            {"monotone_asymptotic", scan.monotone_asymptotic},
            {"monotone_full", scan.monotone_full}};
  Json checks;
  t.check(checks, "inequality", scan.inequality);
  t.check(checks, "margin_above_1_percent", scan.margin > 0.01);
  t.check(checks, "lambda_monotone", scan.monotone_asymptotic);
  t.check(checks, "exponent_within_25_percent", exponent_error < 0.25);
  s["checks"] = checks;
  return s;
}

// ---------------------------------------------------------------- probe3d

Json probe_row_json(const ProbeRow& r) {
  return {{"mu", r.mu},         {"converged", r.converged}, {"inconclusive", r.inconclusive},
          {"message", r.message}, {"A", r.A},               {"J", r.J},
          {"B", r.B},           {"h1", r.h1},               {"l6", r.l6},
          {"C_A", r.C_A},       {"B_ratio", r.B_ratio},     {"residual_sum", r.residual_sum},
          {"h1_bound", r.h1_bound}, {"m_tilde", r.m_tilde}, {"core_width", r.core_width}};
}

const std::vector<std::string>& probe_columns() {
  static const std::vector<std::string> cols{"mu",  "converged", "A",       "J",            "B",
                                             "h1",  "l6",        "C_A",     "B_ratio",      "residual_sum",
                                             "h1_bound", "m_tilde", "core_width"};
  return cols;
}

std::vector<std::string> probe_cells(const ProbeRow& r) {
  return {io::format_double(r.mu), r.converged ? "true" : "false", io::format_double(r.A),
          io::format_double(r.J),  io::format_double(r.B),         io::format_double(r.h1),
          io::format_double(r.l6), io::format_double(r.C_A),       io::format_double(r.B_ratio),
          io::format_double(r.residual_sum), io::format_double(r.h1_bound), io::format_double(r.m_tilde),
          io::format_double(r.core_width)};
}

Json run_probe3d(Task& t) {
  const GridPtr grid = make_grid(t.q.d, t.c.N, t.c.r_max);
  const ProbeTable table = probe_3d(t.q, t.c.mus, grid);
  io::CsvTable csv(probe_columns());
  Json rows = Json::array();
  double c_min = INFINITY, c_max = 0.0, l6_min = INFINITY, h1_max = 0.0, bound_max = 0.0;
  bool b_positive = true, h1_within = true;
  std::size_t converged = 0;
  for (const auto& r : table.rows) {
    csv.add_row(probe_cells(r));
    rows.push_back(probe_row_json(r));
    converged += r.converged ? 1 : 0;
    h1_within = h1_within && r.h1 <= r.h1_bound;
    b_positive = b_positive && r.B > 0.0;
    c_min = std::min(c_min, r.C_A);
    c_max = std::max(c_max, r.C_A);
    l6_min = std::min(l6_min, r.l6);
    h1_max = std::max(h1_max, r.h1);
    bound_max = std::max(bound_max, r.h1_bound);
  }
  t.artifact("probe3d.csv", csv);
  const double c_variation = table.rows.empty() ? 1.0 : c_max / c_min;
  Json s = {{"rows", rows},
            {"C_A_variation", c_variation},
            {"min_l6", table.rows.empty() ? 0.0 : l6_min},
            {"max_h1", h1_max},
            {"max_h1_bound", bound_max},
            {"converged_rows", converged}};
  // Candidates are minimizing sequences that need not converge; the checks concern
  // their terms only.
  Json checks;
  t.check(checks, "B_positive", b_positive);
  t.check(checks, "l6_bounded_below", table.rows.empty() || l6_min > 0.0);
  t.check(checks, "C_A_variation_below_2", c_variation < 2.0);
  t.check(checks, "h1_below_bound", h1_within);
  s["checks"] = checks;
  return s;
}

// ---------------------------------------------------------------- evolve

io::CsvTable trajectory_table(const TrajectoryRecord& traj) {
  std::vector<std::string> header{"t", "mass", "H", "S_omega", "K", "grad2", "M_R", "dt", "boundary_mass"};
  for (std::size_t k = 1; k < traj.observer_columns.size(); ++k) header.push_back(traj.observer_columns[k]);
  io::CsvTable t(header);
  for (const auto& s : traj.samples) {
    std::vector<double> row{s.t, s.mass, s.H, s.S_omega, s.K, s.grad2, s.M_R, s.dt, s.boundary_mass};
    for (std::size_t k = 1; k < s.extras.size(); ++k) row.push_back(s.extras[k]);
    t.add_row(row);
  }
  return t;
}

io::CsvTable weight_table(const VirialWeight& w) {
  io::CsvTable t({"r", "s", "W", "grad_W", "lap_W", "bilap_W", "kappa1", "kappa2"});
  for (std::size_t i = 0; i < w.W.size(); ++i)
    t.add_row(std::vector<double>{w.grid->r(i), w.s[i], w.W[i], w.grad[i], w.lap[i], w.bilap[i], w.kappa1[i],
                                  w.kappa2[i]});
  return t;
}

Json certificate_json(const BlowupCertificate& c) {
  return {{"R", c.R},
          {"epsilon0", c.epsilon0},
          {"P0", c.P0},
          {"M0", c.M0},
          {"mass0", c.mass0},
          {"delta2_bound", c.delta2_bound},
          {"tail_mass0", c.tail_mass0},
          {"weighted_term", c.weighted_term},
          {"m_star",
           {{"value", c.m_star},
            {"kind", "upper bound from randomized search, not the infimum"},
            {"budget", c.m_star_budget},
            {"admissible", c.m_star_admissible},
            {"search_empty", c.m_star_search_empty},
            {"min_KR", c.m_star_min_KR},
            {"seed", c.m_star_seed}}},
          {"delta2_ok", c.delta2_ok},
          {"tail_ok", c.tail_ok},
          {"weighted_ok", c.weighted_ok},
          {"valid", c.valid()},
          {"t_star", c.t_star}};
}

Json run_evolve(Task& t) {
  const GridPtr grid = make_grid(t.q.d, t.c.N, t.c.r_max);
  const auto g = t.ground(grid);
  if (!g->converged) throw Error(ErrorKind::convergence, "ground state did not converge: " + g->message);
  const ComplexRadialField psi0 = to_complex(t.c.lambda == 1.0 ? g->Q : l2_scale(g->Q, t.c.lambda));

  std::vector<VirialWeight> weights;
  for (double R : t.c.radii) weights.push_back(build_weight(R, grid, t.q.d));

  EvolveOptions o;
  o.control.tolerance = t.c.tolerance;
  o.sample_interval = t.c.sample_interval > 0.0 ? t.c.sample_interval : t.c.horizon / 200.0;
  o.wall_limit_seconds = t.c.wall_limit;
  o.linear_only = t.c.linear;
  o.keep_final_state = false;
  if (!weights.empty()) {
    o.observer = virial_observer(weights.front(), t.q, t.c.linear);
    o.observer_columns = virial_columns();
  }
  if (o.sample_interval <= 0.0) o.sample_interval = 1.0;
  const TrajectoryRecord traj = evolve(psi0, t.q, t.c.horizon, g.get(), o);
  t.res.wall_seconds += traj.wall_seconds;

  const SetMembership mem = traj.membership.value_or(SetMembership{});
  Json verdict = {{"lambda", t.c.lambda},
                  {"membership", to_string(mem.kind)},
                  {"S_omega0", mem.S_omega},
                  {"K0", mem.K},
                  {"m_omega", g->m_omega},
                  {"verdict", to_string(traj.verdict)},
                  {"reason", traj.reason},
                  {"horizon", traj.horizon},
                  {"t_end", traj.t_end},
                  {"t_blowup_estimate", traj.t_blowup_estimate},
                  {"epsilon0", traj.epsilon0},
                  {"max_mass_drift", traj.max_mass_drift},
                  {"max_H_drift", traj.max_H_drift},
                  {"max_S_drift", traj.max_S_drift},
                  {"max_boundary_mass", traj.max_boundary_mass},
                  {"K_negative_throughout", traj.K_negative_throughout},
                  {"K_positive_throughout", traj.K_positive_throughout},
                  {"K_bound_throughout", traj.K_bound_throughout},
                  {"samples", traj.samples.size()},
                  {"accepted_steps", traj.accepted_steps},
                  {"rejected_steps", traj.rejected_steps}};
  t.artifact("trajectory.csv", trajectory_table(traj));

  Json checks;
  t.check(checks, "mass_conserved", traj.max_mass_drift < o.mass_tolerance);
  if (!t.c.linear) {
    if (mem.kind == Membership::A_minus) {
      t.check(checks, "K_negative_along_flow", traj.K_negative_throughout);
      t.check(checks, "K_below_action_gap", traj.K_bound_throughout);
    } else if (mem.kind == Membership::A_plus) {
      t.check(checks, "K_positive_along_flow", traj.K_positive_throughout);
      t.check(checks, "no_blowup_verdict", traj.verdict != Verdict::blow_up);
    }
  }

  Json virial = Json::array();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const VirialWeight& w = weights[k];
    const std::string suffix = "_R" + tag(w.R);
    t.artifact("weights" + suffix + ".csv", weight_table(w));
    Json v = {{"R", w.R},
              {"W_constant", w.W_constant},
              {"grad_constant", w.grad_constant},
              {"bilap_constant", w.bilap_constant}};
    if (k == 0) {
      try {
        const VirialResidual vr = virial_residual(traj, w, t.q);
        io::CsvTable rt({"t", "lhs", "rhs", "relative"});
        for (std::size_t i = 0; i < vr.t.size(); ++i)
          rt.add_row(std::vector<double>{vr.t[i], vr.lhs[i], vr.rhs[i], vr.relative[i]});
        t.artifact("virial_residual" + suffix + ".csv", rt);
        v["residual"] = {{"max_relative", vr.max_relative}, {"t_at_max", vr.t_at_max},
                         {"window_end", vr.window_end}, {"triples", vr.t.size()}};
        t.check(checks, "virial_residual" + suffix, vr.max_relative < 1e-3);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::resolution) throw;
        v["residual"] = {{"refused", e.what()}};
      }
    }
    if (!t.c.linear && traj.epsilon0 > 0.0) {
      MStarOptions mo;
      mo.budget = t.c.m_star_budget;
      mo.seed = t.c.seed;
      const BlowupCertificate cert = make_certificate(psi0, traj.epsilon0, w, t.q, mo);
      Json cj = certificate_json(cert);
      if (k == 0) {
        const BlowupBound b = blowup_bound(cert, traj);
        cj["bound"] = {{"asserted", b.asserted},         {"parabola_holds", b.parabola_holds},
                       {"max_excess", b.max_excess},     {"kr_bound_holds", b.kr_bound_holds},
                       {"t_star", b.t_star},             {"t_obs", b.t_obs},
                       {"t_obs_within", b.t_obs_within}, {"T_R", b.T_R}};
        if (b.asserted) {
          t.check(checks, "parabola" + suffix, b.parabola_holds);
          if (traj.verdict == Verdict::blow_up) t.check(checks, "t_obs_within_t_star" + suffix, b.t_obs_within);
        }
      }
      t.artifact("certificate" + suffix + ".json", cj);
      v["certificate_valid"] = cert.valid();
      v["t_star"] = cert.t_star;
    }
    virial.push_back(v);
  }
  verdict["virial"] = virial;
  verdict["checks"] = checks;
  t.artifact("verdict.json", verdict);
  return verdict;
}

Json dispatch(Task& t) {
  if (t.c.task == "groundstate") return run_groundstate(t);
  if (t.c.task == "bnscan") return run_bnscan(t);
  if (t.c.task == "probe3d") return run_probe3d(t);
  if (t.c.task == "evolve") return run_evolve(t);
  throw Error(ErrorKind::usage, "task '" + t.c.task + "' cannot be dispatched directly");
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunResult execute(const ExperimentConfig& c, bool write, GroundCache* cache) {
  RunResult res;
  const auto start = std::chrono::steady_clock::now();
  try {
    validate_config(c);
    Task t{c, c.params(), write, cache, res};
    res.summary["task"] = c.task;
    res.summary["config_hash"] = config_hash(c);
    res.summary["params"] = {{"d", t.q.d}, {"p", t.q.p}, {"mu", t.q.mu}, {"omega", t.q.omega}};
    res.summary["grid"] = {{"N", c.N}, {"rmax", c.r_max}};
    if (c.task == "sweep") {
      const std::vector<SweepRow> rows = sweep(c);
      std::vector<std::string> header{"index", "lambda", "mu", "p", "ok", "error"};
      const auto columns = [&]() -> std::vector<std::string> {
        if (c.sweep_task == "groundstate") return {"m_omega", "amplitude", "nehari_residual", "elliptic_residual"};
        if (c.sweep_task == "probe3d") return {"A", "B", "h1", "l6", "C_A", "h1_bound"};
        return {"membership", "verdict", "S_omega0", "K0", "m_omega", "t_end"};
      }();
      header.insert(header.end(), columns.begin(), columns.end());
      io::CsvTable table(header);
      Json jrows = Json::array();
      std::size_t failed = 0;
      for (const auto& r : rows) {
        std::vector<std::string> cells{std::to_string(r.index), io::format_double(r.lambda), io::format_double(r.mu),
                                       io::format_double(r.p), r.ok ? "true" : "false", r.error};
        for (const auto& col : columns) {
          const Json* v = nullptr;
          if (r.summary.contains(col)) v = &r.summary[col];
          else if (r.summary.contains("ground_state") && r.summary["ground_state"].contains(col))
            v = &r.summary["ground_state"][col];
          else if (r.summary.contains("rows") && !r.summary["rows"].empty() && r.summary["rows"][0].contains(col))
            v = &r.summary["rows"][0][col];
          if (!v) cells.emplace_back();
          else if (v->is_number_float()) cells.push_back(io::format_double(v->get<double>()));
          else if (v->is_string()) cells.push_back(v->get<std::string>());
          else cells.push_back(v->dump());
        }
        table.add_row(cells);
        jrows.push_back({{"index", r.index}, {"lambda", r.lambda}, {"mu", r.mu}, {"p", r.p},
                         {"ok", r.ok},       {"error", r.error},   {"summary", r.summary}});
        if (!r.ok) ++failed;
      }
      t.artifact("sweep.csv", table);
      res.summary["rows"] = jrows;
      res.summary["failed_rows"] = failed;
      if (failed) res.failures.push_back(std::to_string(failed) + " sweep rows failed");
    } else {
      res.summary["result"] = dispatch(t);
    }
    res.status = res.failures.empty() ? ExitStatus::pass : ExitStatus::assertion;
  } catch (const Error& e) {
    res.status = exit_status_for(e.kind());
    res.summary["error"] = e.what();
  } catch (const std::exception& e) {
    res.status = ExitStatus::numerical;
    res.summary["error"] = e.what();
  }
  res.summary["status"] = status_name(res.status);
  res.summary["exit_code"] = static_cast<int>(res.status);
  res.summary["failures"] = res.failures;
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (write && res.status != ExitStatus::usage) {
    io::write_json(c.out / "result.json", res.summary);
    Json manifest = {{"tool", "critnls"},
                     {"version", CRITNLS_VERSION},
                     {"compiler", __VERSION__},
                     {"created_utc", utc_now()},
                     {"wall_seconds", res.wall_seconds},
                     {"config_hash", config_hash(c)},
                     {"config", config_to_json(c)},
                     {"status", status_name(res.status)},
                     {"artifacts", res.artifacts}};
    io::write_json(c.out / "manifest.json", manifest);
  }
  return res;
}

}  // namespace

RunResult run(const ExperimentConfig& config, bool write) { return execute(config, write, nullptr); }

std::vector<SweepRow> sweep(const ExperimentConfig& c) {
  validate_config(c);
  const auto axis = [](const std::vector<double>& v, bool any, double fallback) {
    if (!v.empty()) return v;
    return any ? std::vector<double>{fallback} : std::vector<double>{};
  };
  const bool any = !c.sweep_lambda.empty() || !c.sweep_mu.empty() || !c.sweep_p.empty();
  const Parameters base = c.params();
  const auto lambdas = axis(c.sweep_lambda, any, c.lambda);
  const auto mus = axis(c.sweep_mu, any, c.mu);
  const auto ps = axis(c.sweep_p, any, base.p);

  std::vector<SweepRow> rows;
  for (double p : ps)
    for (double mu : mus)
      for (double lambda : lambdas) {
        SweepRow r;
        r.index = rows.size();
        r.lambda = lambda;
        r.mu = mu;
        r.p = p;
        rows.push_back(r);
      }
  if (rows.empty()) return rows;

  GroundCache cache;
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& r = rows[i];
      ExperimentConfig rc = c;
      rc.task = c.sweep_task;
      rc.lambda = r.lambda;
      rc.mu = r.mu;
      rc.p = r.p;
      if (rc.task == "probe3d") rc.mus = {r.mu};
      const RunResult rr = execute(rc, false, &cache);
      r.ok = rr.status == ExitStatus::pass;
      r.summary = rr.summary.contains("result") ? rr.summary["result"] : Json::object();
      if (rr.summary.contains("error")) r.error = rr.summary["error"].get<std::string>();
      else if (!rr.failures.empty()) {
        for (const auto& f : rr.failures) r.error += (r.error.empty() ? "" : "; ") + f;
      }
    }
  };
  std::size_t threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, rows.size());
  std::vector<std::future<void>> pool;
  for (std::size_t k = 0; k < threads; ++k) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
  return rows;
}

}  // namespace critnls
