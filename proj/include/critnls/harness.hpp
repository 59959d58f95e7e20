#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "critnls/errors.hpp"
#include "critnls/io.hpp"
#include "critnls/parameters.hpp"

namespace critnls {

// Process exit statuses of the command-line tool.
enum class ExitStatus : int { pass = 0, assertion = 1, usage = 2, numerical = 3 };

ExitStatus exit_status_for(ErrorKind kind);

struct ExperimentConfig {
  std::string task;  // groundstate | bnscan | probe3d | evolve | sweep

  int d = 4;
  std::optional<double> p;  // defaults to Parameters::default_p(d)
  double mu = 1.0;
  double omega = 1.0;
  Admissibility rules;

  std::size_t N = 4096;
  double r_max = 40.0;

  std::filesystem::path out = "critnls-out";
  std::uint64_t seed = 1;

  // groundstate
  std::string method = "nehari";  // nehari | shooting | both

  // bnscan: empty means the default list
  std::vector<double> epsilons;

  // probe3d
  std::vector<double> mus{1.0, 0.3, 0.1, 0.03, 0.01};

  // evolve
  double lambda = 1.2;
  double horizon = 0.05;
  double sample_interval = 0.0;  // 0: horizon / 200
  double tolerance = 1e-8;
  double wall_limit = 0.0;       // seconds, 0 = none
  bool linear = false;
  std::vector<double> radii;     // virial radii; the first one drives the observer
  std::size_t m_star_budget = 400;

  // sweep: the rows are the cartesian product of the non-empty axes
  std::string sweep_task = "evolve";  // groundstate | evolve | probe3d
  std::vector<double> sweep_lambda, sweep_mu, sweep_p;
  std::size_t threads = 0;  // 0: hardware concurrency

  Parameters params() const;  // validated; throws Error(usage) naming the rule
};

// Reads a TOML file. Unknown keys and wrong types are usage errors naming the key.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& toml_text, const std::string& source = "config");

// Checks task names, grid sizes and parameter admissibility.
void validate_config(const ExperimentConfig& config);

io::Json config_to_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct RunResult {
  ExitStatus status = ExitStatus::pass;
  io::Json summary;                     // contents of result.json
  std::vector<std::string> failures;    // failed built-in assertions
  std::vector<std::string> artifacts;   // files written besides the manifest and summary
  double wall_seconds = 0.0;
};

// Runs the configured task. With `write` the manifest, result.json and artifacts go to
// config.out. Errors from the numerical modules are caught and mapped to a status.
RunResult run(const ExperimentConfig& config, bool write = true);

struct SweepRow {
  std::size_t index = 0;
  double lambda = 0.0, mu = 0.0, p = 0.0;
  bool ok = false;
  std::string error;
  io::Json summary;
};

// Independent rows run concurrently; the result is in row order whatever the schedule.
std::vector<SweepRow> sweep(const ExperimentConfig& config);

}  // namespace critnls
