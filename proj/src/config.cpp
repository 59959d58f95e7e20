#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

#include "critnls/errors.hpp"
#include "critnls/harness.hpp"

namespace critnls {

namespace {

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::usage, msg); }

double number(const toml::node& n, const std::string& key) {
  if (auto v = n.value<double>()) return *v;
  usage("config key " + key + " must be a number");
}

std::int64_t integer(const toml::node& n, const std::string& key) {
  if (n.is_integer()) return n.as_integer()->get();
  if (n.is_floating_point()) {
    const double x = n.as_floating_point()->get();
    if (std::floor(x) == x) return static_cast<std::int64_t>(x);
  }
  usage("config key " + key + " must be an integer");
}

bool boolean(const toml::node& n, const std::string& key) {
  if (n.is_boolean()) return n.as_boolean()->get();
  usage("config key " + key + " must be true or false");
}

std::string text(const toml::node& n, const std::string& key) {
  if (n.is_string()) return n.as_string()->get();
  usage("config key " + key + " must be a string");
}

std::vector<double> numbers(const toml::node& n, const std::string& key) {
  std::vector<double> out;
  if (auto v = n.value<double>()) return {*v};
  const toml::array* arr = n.as_array();
  if (!arr) usage("config key " + key + " must be a number or an array of numbers");
  for (const auto& e : *arr) out.push_back(number(e, key));
  return out;
}

std::size_t count(const toml::node& n, const std::string& key) {
  const auto v = integer(n, key);
  if (v < 0) usage("config key " + key + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

using Setter = void (*)(ExperimentConfig&, const toml::node&, const std::string&);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s{
      {"task", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.task = text(n, k); }},
      {"seed", [](ExperimentConfig& c, const toml::node& n, const std::string& k) {
         const auto v = integer(n, k);
         if (v < 0) usage("config key seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(v);
       }},
      {"out", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.out = text(n, k); }},
      {"params.d", [](ExperimentConfig& c, const toml::node& n, const std::string& k) {
         c.d = static_cast<int>(integer(n, k));
       }},
      {"params.p", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.p = number(n, k); }},
      {"params.mu", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.mu = number(n, k); }},
      {"params.omega",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.omega = number(n, k); }},
      {"params.allow_nonpositive_mu",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) {
         c.rules.allow_nonpositive_mu = boolean(n, k);
       }},
      {"params.allow_boundary_p",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) {
         c.rules.allow_boundary_p = boolean(n, k);
       }},
      {"grid.N", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.N = count(n, k); }},
      {"grid.rmax", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.r_max = number(n, k); }},
      {"groundstate.method",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.method = text(n, k); }},
      {"bnscan.eps",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.epsilons = numbers(n, k); }},
      {"probe3d.mus", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.mus = numbers(n, k); }},
      {"evolve.lambda",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.lambda = number(n, k); }},
      {"evolve.horizon",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.horizon = number(n, k); }},
      {"evolve.sample_interval",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.sample_interval = number(n, k); }},
      {"evolve.tolerance",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.tolerance = number(n, k); }},
      {"evolve.wall_limit",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.wall_limit = number(n, k); }},
      {"evolve.linear",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.linear = boolean(n, k); }},
      {"evolve.R", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.radii = numbers(n, k); }},
      {"evolve.m_star_budget",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.m_star_budget = count(n, k); }},
      {"sweep.task",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.sweep_task = text(n, k); }},
      {"sweep.lambda",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.sweep_lambda = numbers(n, k); }},
      {"sweep.mu", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.sweep_mu = numbers(n, k); }},
      {"sweep.p", [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.sweep_p = numbers(n, k); }},
      {"sweep.threads",
       [](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.threads = count(n, k); }},
  };
  return s;
}

void apply_table(ExperimentConfig& c, const toml::table& t, const std::string& prefix) {
  for (const auto& [key, node] : t) {
    const std::string name = prefix.empty() ? std::string(key.str()) : prefix + "." + std::string(key.str());
    if (const toml::table* sub = node.as_table()) {
      if (!prefix.empty()) usage("unknown config table " + name);
      apply_table(c, *sub, name);
      continue;
    }
    const auto it = setters().find(name);
    if (it == setters().end()) usage("unknown config key " + name);
    it->second(c, node, name);
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& toml_text, const std::string& source) {
  toml::table t;
  try {
    t = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ": " << e.description();
    usage(msg.str());
  }
  ExperimentConfig c;
  apply_table(c, t, "");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) usage("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.string());
}

Parameters ExperimentConfig::params() const {
  if (d < 3) usage("params.d must be at least 3");
  try {
    return Parameters::make(d, p.value_or(Parameters::default_p(d)), mu, omega, rules);
  } catch (const Error& e) {
    usage(std::string("inadmissible parameters: ") + e.what());
  }
}

void validate_config(const ExperimentConfig& c) {
  static const std::set<std::string> tasks{"groundstate", "bnscan", "probe3d", "evolve", "sweep"};
  static const std::set<std::string> sweep_tasks{"groundstate", "evolve", "probe3d"};
  if (!tasks.count(c.task)) usage("unknown task '" + c.task + "' (expected groundstate, bnscan, probe3d, evolve or sweep)");
  c.params();
  if (c.N < 16) usage("grid.N must be at least 16");
  if (!(c.r_max > 0.0) || !std::isfinite(c.r_max)) usage("grid.rmax must be positive");
  if (c.method != "nehari" && c.method != "shooting" && c.method != "both")
    usage("groundstate.method must be nehari, shooting or both");
  for (double e : c.epsilons)
    if (!(e > 0.0 && e < 1.0)) usage("bnscan.eps entries must lie in (0, 1)");
  if (c.task == "bnscan" && c.d < 4) usage("bnscan needs params.d >= 4");
  if (c.task == "probe3d" && c.d != 3) usage("probe3d needs params.d = 3");
  if (!(c.lambda > 0.0)) usage("evolve.lambda must be positive");
  if (!(c.horizon >= 0.0) || !std::isfinite(c.horizon)) usage("evolve.horizon must be nonnegative");
  if (!(c.sample_interval >= 0.0)) usage("evolve.sample_interval must be nonnegative");
  if (!(c.tolerance > 0.0)) usage("evolve.tolerance must be positive");
  if (!(c.wall_limit >= 0.0)) usage("evolve.wall_limit must be nonnegative");
  for (double R : c.radii)
    if (!(R > 0.0) || !(std::sqrt(3.0) * R < c.r_max)) usage("evolve.R entries need 0 < sqrt(3) R < grid.rmax");
  if (c.task == "sweep") {
    if (!sweep_tasks.count(c.sweep_task)) usage("sweep.task must be groundstate, evolve or probe3d");
    if (c.sweep_task == "probe3d" && c.d != 3) usage("a probe3d sweep needs params.d = 3");
  }
}

io::Json config_to_json(const ExperimentConfig& c) {
  io::Json j;
  j["task"] = c.task;
  j["seed"] = c.seed;
  j["out"] = c.out.generic_string();
  j["params"] = {{"d", c.d},
                 {"p", c.p.value_or(Parameters::default_p(c.d))},
                 {"mu", c.mu},
                 {"omega", c.omega},
                 {"allow_nonpositive_mu", c.rules.allow_nonpositive_mu},
                 {"allow_boundary_p", c.rules.allow_boundary_p}};
  j["grid"] = {{"N", c.N}, {"rmax", c.r_max}};
  j["groundstate"] = {{"method", c.method}};
  j["bnscan"] = {{"eps", c.epsilons}};
  j["probe3d"] = {{"mus", c.mus}};
  j["evolve"] = {{"lambda", c.lambda},       {"horizon", c.horizon},
                 {"sample_interval", c.sample_interval}, {"tolerance", c.tolerance},
                 {"wall_limit", c.wall_limit}, {"linear", c.linear},
                 {"R", c.radii},             {"m_star_budget", c.m_star_budget}};
  j["sweep"] = {{"task", c.sweep_task}, {"lambda", c.sweep_lambda}, {"mu", c.sweep_mu},
                {"p", c.sweep_p},       {"threads", c.threads}};
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  io::Json j = config_to_json(c);
  j.erase("out");  // where results go does not change what they are
  return io::hex64(io::fnv1a64(io::dump_json(j, -1)));
}

}  // namespace critnls
