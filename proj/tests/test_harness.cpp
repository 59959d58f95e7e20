#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "critnls/groundstate.hpp"
#include "critnls/harness.hpp"
#include "critnls/io.hpp"

using namespace critnls;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("critnls-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(CRITNLS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("io: doubles survive a text round trip") {
  for (double x : {0.1, 1.0 / 3.0, 17.189088481143497, -2.5e-300, 6.02214076e23, 0.0}) {
    const std::string s = io::format_double(x);
    CHECK(std::stod(s) == x);
  }
  const io::Json j = {{"a", std::numeric_limits<double>::quiet_NaN()},
                      {"b", std::numeric_limits<double>::infinity()},
                      {"c", 0.1}};
  const io::Json back = io::Json::parse(io::dump_json(j));
  CHECK(back["a"].is_null());
  CHECK(back["b"].is_null());
  CHECK(back["c"].get<double>() == 0.1);
}

TEST_CASE("io: CSV cells are quoted only when needed") {
  io::CsvTable t({"name", "value"});
  t.add_row(std::vector<std::string>{"plain", "1"});
  t.add_row(std::vector<std::string>{"a,b", "say \"hi\""});
  t.add_row(std::vector<double>{0.5, 0.25});
  CHECK(t.size() == 3);
  CHECK(t.str() == "name,value\nplain,1\n\"a,b\",\"say \"\"hi\"\"\"\n0.5,0.25\n");
}

TEST_CASE("config: TOML parsing, defaults and errors") {
  const ExperimentConfig c = parse_config(R"(
task = "evolve"
seed = 9
[params]
d = 4
mu = 0.5
[grid]
N = 2048
rmax = 30.0
[evolve]
lambda = 0.9
horizon = 0.1
R = [5.0, 10.0]
)");
  CHECK(c.task == "evolve");
  CHECK(c.seed == 9);
  CHECK(c.mu == 0.5);
  CHECK_FALSE(c.p.has_value());
  CHECK(c.params().p == 2.5);
  CHECK(c.N == 2048);
  CHECK(c.r_max == 30.0);
  CHECK(c.lambda == 0.9);
  CHECK(c.radii == std::vector<double>{5.0, 10.0});
  CHECK(c.omega == 1.0);

  const auto usage_message = [](const std::string& text) {
    try {
      validate_config(parse_config(text));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::usage);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(usage_message("task = \"groundstate\"\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(usage_message("task = \"groundstate\"\n[grid]\nN = \"many\"\n").find("grid.N") != std::string::npos);
  CHECK(usage_message("task = \"nothing\"\n").find("nothing") != std::string::npos);
  CHECK(usage_message("task = \"groundstate\"\n[params]\nd = 3\np = 5.0\n").find("p < 2* - 1") != std::string::npos);
  CHECK(usage_message("task = \"groundstate\"\n[params]\nmu = -1.0\n").find("mu > 0") != std::string::npos);
  CHECK(usage_message("task = \"groundstate\"\n[params]\nmu = -1.0\nallow_nonpositive_mu = true\n").empty());
  CHECK(usage_message("task = \"groundstate\"\n[grid]\nN = 4\n").find("N") != std::string::npos);
  CHECK(usage_message("task = \"groundstate\"\n").empty());
}

TEST_CASE("config: the hash ignores the output directory") {
  ExperimentConfig a;
  a.task = "groundstate";
  ExperimentConfig b = a;
  b.out = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.mu = 0.5;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("run: groundstate writes its artifacts and a pass summary") {
  ExperimentConfig c;
  c.task = "groundstate";
  c.out = scratch("gs");
  const RunResult r = run(c);
  CHECK(r.status == ExitStatus::pass);
  for (const char* f : {"manifest.json", "result.json", "ground_state.csv", "ground_state.json"})
    CHECK(fs::exists(c.out / f));
  const auto summary = io::Json::parse(slurp(c.out / "result.json"));
  CHECK(summary["status"] == "pass");
  CHECK(summary["exit_code"] == 0);
  CHECK(summary["result"]["checks"]["ground_state.converged"] == true);
  const auto manifest = io::Json::parse(slurp(c.out / "manifest.json"));
  CHECK(manifest["config_hash"] == config_hash(c));
  CHECK(manifest["artifacts"].size() == r.artifacts.size());
}

TEST_CASE("run: a negative mu is a passing negative control") {
  ExperimentConfig c;
  c.task = "groundstate";
  c.mu = -1.0;
  c.rules.allow_nonpositive_mu = true;
  c.method = "shooting";
  const RunResult r = run(c, false);
  CHECK(r.status == ExitStatus::pass);
  CHECK(r.summary["result"]["checks"]["no_admissible_bracket"] == true);
  c.method = "nehari";
  CHECK(run(c, false).status == ExitStatus::usage);
}

TEST_CASE("run: usage errors write nothing") {
  ExperimentConfig c;
  c.task = "groundstate";
  c.d = 3;
  c.p = 5.0;
  c.out = scratch("usage");
  const RunResult r = run(c);
  CHECK(r.status == ExitStatus::usage);
  CHECK_FALSE(fs::exists(c.out / "result.json"));
}

TEST_CASE("run: result.json is byte-identical across repeated runs") {
  ExperimentConfig c;
  c.task = "probe3d";
  c.d = 3;
  c.mus = {1.0, 0.1};
  c.out = scratch("det-a");
  REQUIRE(run(c).status == ExitStatus::pass);
  const std::string first = slurp(c.out / "result.json");
  const std::string first_csv = slurp(c.out / "probe3d.csv");
  c.out = scratch("det-b");
  REQUIRE(run(c).status == ExitStatus::pass);
  CHECK(slurp(c.out / "result.json") == first);
  CHECK(slurp(c.out / "probe3d.csv") == first_csv);
  CHECK(first.find("created") == std::string::npos);
}

TEST_CASE("sweep: rows come back in order and match direct runs") {
  SUBCASE("no axes gives no rows") {
    ExperimentConfig c;
    c.task = "sweep";
    CHECK(sweep(c).empty());
    CHECK(run(c, false).status == ExitStatus::pass);
  }
  SUBCASE("mu sweep reproduces the probe table") {
    ExperimentConfig c;
    c.task = "sweep";
    c.sweep_task = "probe3d";
    c.d = 3;
    c.sweep_mu = {1.0, 0.3, 0.1};
    c.threads = 3;
    const auto rows = sweep(c);
    REQUIRE(rows.size() == 3);
    const Parameters base = Parameters::make(3, Parameters::default_p(3), 1.0, 1.0);
    const ProbeTable direct = probe_3d(base, {1.0, 0.3, 0.1}, make_grid(3, c.N, c.r_max));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CAPTURE(i);
      CHECK(rows[i].index == i);
      CHECK(rows[i].mu == c.sweep_mu[i]);
      CHECK(rows[i].ok);
      CHECK(rows[i].summary["rows"][0]["A"].get<double>() == direct.rows[i].A);
      CHECK(rows[i].summary["rows"][0]["B"].get<double>() == direct.rows[i].B);
    }
  }
  SUBCASE("lambda sweep classifies both sides of the ground state") {
    ExperimentConfig c;
    c.task = "sweep";
    c.sweep_task = "evolve";
    c.horizon = 0.0;
    c.sweep_lambda = {0.8, 0.95, 1.05, 1.2};
    c.out = scratch("sweep");
    const RunResult r = run(c);
    CHECK(r.status == ExitStatus::pass);
    const auto& rows = r.summary["rows"];
    REQUIRE(rows.size() == 4);
    CHECK(rows[0]["summary"]["membership"] == "A_plus");
    CHECK(rows[1]["summary"]["membership"] == "A_plus");
    CHECK(rows[2]["summary"]["membership"] == "A_minus");
    CHECK(rows[3]["summary"]["membership"] == "A_minus");
    CHECK(fs::exists(c.out / "sweep.csv"));
  }
}

TEST_CASE("cli: exit codes for usage errors") {
  CHECK(cli("") == 2);
  CHECK(cli("no-such-task") == 2);
  CHECK(cli("groundstate --d 3 --p 5 --out " + scratch("cli").string()) == 2);
  CHECK(cli("groundstate --config /nonexistent/file.toml") == 2);
  CHECK(cli("evolve --N abc") == 2);
}
