// Command-line front end: critnls <task> --config FILE [overrides]

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "critnls/errors.hpp"
#include "critnls/harness.hpp"

namespace {

template <class T>
void override_with(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

}  // namespace

int main(int argc, char** argv) {
  using critnls::ExitStatus;
  CLI::App app{"Radial NLS experiments: ground states, scans, probes and evolutions"};
  app.set_version_flag("--version", std::string("critnls ") + "0.1.0");

  std::string task;
  std::string config_path;
  std::optional<int> d;
  std::optional<double> p, mu, omega, rmax, horizon, lambda, tolerance, sample_interval, wall_limit;
  std::optional<std::size_t> n, threads, budget;
  std::optional<std::string> out, method, sweep_task;
  std::optional<std::uint64_t> seed;
  std::vector<double> eps, mus, radii, sweep_lambda, sweep_mu, sweep_p;
  bool linear = false, allow_nonpositive_mu = false, allow_boundary_p = false;

  app.add_option("task", task, "groundstate | bnscan | probe3d | evolve | sweep")->required();
  app.add_option("--config", config_path, "TOML configuration file");
  app.add_option("--d", d, "spatial dimension");
  app.add_option("--p", p, "subcritical power");
  app.add_option("--mu", mu, "coefficient of the subcritical term");
  app.add_option("--omega", omega, "frequency");
  app.add_option("--N", n, "number of grid nodes");
  app.add_option("--rmax", rmax, "outer radius of the grid");
  app.add_option("--method", method, "ground-state method: nehari | shooting | both");
  app.add_option("--eps", eps, "bnscan scales");
  app.add_option("--mus", mus, "probe3d mu values");
  app.add_option("--lambda", lambda, "dilation of the ground state used as initial data");
  app.add_option("--horizon", horizon, "final time of an evolution");
  app.add_option("--sample-interval", sample_interval, "time between trajectory samples");
  app.add_option("--tolerance", tolerance, "local error tolerance of the time stepper");
  app.add_option("--wall-limit", wall_limit, "wall-clock limit of an evolution in seconds");
  app.add_flag("--linear", linear, "evolve without the nonlinear terms");
  app.add_option("--R", radii, "virial radii");
  app.add_option("--m-star-budget", budget, "number of shapes in the tail-mass search");
  app.add_option("--sweep-task", sweep_task, "task run by each sweep row");
  app.add_option("--sweep-lambda", sweep_lambda, "lambda axis of a sweep");
  app.add_option("--sweep-mu", sweep_mu, "mu axis of a sweep");
  app.add_option("--sweep-p", sweep_p, "p axis of a sweep");
  app.add_option("--threads", threads, "sweep worker threads (0: all cores)");
  app.add_flag("--allow-nonpositive-mu", allow_nonpositive_mu, "admit mu <= 0 (negative controls)");
  app.add_flag("--allow-boundary-p", allow_boundary_p, "admit p on the boundary of the admissible range");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "seed of randomized families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitStatus::usage);
  }

  critnls::ExperimentConfig c;
  try {
    if (!config_path.empty()) c = critnls::load_config(config_path);
  } catch (const critnls::Error& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(critnls::exit_status_for(e.kind()));
  }
  c.task = task;
  override_with(d, c.d);
  if (p) c.p = *p;
  override_with(mu, c.mu);
  override_with(omega, c.omega);
  override_with(n, c.N);
  override_with(rmax, c.r_max);
  override_with(method, c.method);
  if (!eps.empty()) c.epsilons = eps;
  if (!mus.empty()) c.mus = mus;
  override_with(lambda, c.lambda);
  override_with(horizon, c.horizon);
  override_with(sample_interval, c.sample_interval);
  override_with(tolerance, c.tolerance);
  override_with(wall_limit, c.wall_limit);
  if (linear) c.linear = true;
  if (!radii.empty()) c.radii = radii;
  override_with(budget, c.m_star_budget);
  override_with(sweep_task, c.sweep_task);
  if (!sweep_lambda.empty()) c.sweep_lambda = sweep_lambda;
  if (!sweep_mu.empty()) c.sweep_mu = sweep_mu;
  if (!sweep_p.empty()) c.sweep_p = sweep_p;
  override_with(threads, c.threads);
  if (allow_nonpositive_mu) c.rules.allow_nonpositive_mu = true;
  if (allow_boundary_p) c.rules.allow_boundary_p = true;
  if (out) c.out = *out;
  override_with(seed, c.seed);

  const critnls::RunResult r = critnls::run(c);
  std::cout << "task " << c.task << ": " << r.summary.value("status", std::string("unknown"));
  if (r.summary.contains("error")) std::cout << " (" << r.summary["error"].get<std::string>() << ")";
  std::cout << "\n";
  for (const auto& f : r.failures) std::cout << "  failed: " << f << "\n";
  if (r.status != ExitStatus::usage) std::cout << "  results in " << c.out.string() << "\n";
  return static_cast<int>(r.status);
}
