#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vortexlab/cli.hpp"

#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace vortexlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vortexlab_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Copies a shipped config into `dir` with its output redirected there.
fs::path stage(const std::string& name, const fs::path& dir) {
  std::string text = slurp(fs::path(VORTEXLAB_DOCS) / name);
  text = std::regex_replace(text, std::regex("output = [^\n]*"), "output = " + (dir / "out").string());
  const fs::path cfg = dir / name;
  std::ofstream(cfg) << text;
  return cfg;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "[run]\noutput = " << (dir / "out").string() << "\n" << text;
  return cfg;
}

int exe(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(VORTEXLAB_EXE) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

cli::RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return cli::parse_config(in);
}

}  // namespace

TEST_CASE("config parsing") {
  const cli::RunConfig cfg = parse(
      "[run]\ntask = periodic\nseed = 3\n[domain]\nkind = disc\n"
      "[stationary]\nstrengths = -2, 2   ; trailing comment\npositions = 0.5 0 -0.5 0\n"
      "[cluster.1]\ncatalog = pair\nstrengths = -1, -1\n"
      "[cluster.2]\ncatalog = pair\nstrengths = 1, 1\n"
      "[periodic]\nr = 0.05\nphases = 0.1, 0\n");
  CHECK(cfg.task == cli::Task::Periodic);
  CHECK(cfg.seed == 3);
  CHECK(cfg.anchor_strengths == std::vector<double>{-2.0, 2.0});
  CHECK(cfg.anchor_positions.size() == 4);
  CHECK(cfg.clusters.size() == 2);
  CHECK(cfg.r == 0.05);
  CHECK(cfg.phases == std::vector<double>{0.1, 0.0});
  // Defaults are echoed.
  CHECK(cfg.resolved["integrator"]["rtol"] == 1e-12);
  CHECK(cfg.resolved["periodic"]["grid"] == 8);
  // Full double precision.
  CHECK(parse("[run]\ntask = periodic\n[periodic]\nr = 0.30000000000000004\n").r == 0.30000000000000004);
}

TEST_CASE("malformed configs are parse errors") {
  const char* bad[] = {
      "[run]\ntask = fly\n",
      "[run]\ntask = periodic\nspeed = 3\n",
      "[run]\ntask = periodic\n[periodic]\nr = fast\n",
      "[run]\ntask = periodic\n[periodic]\nr = -1\n",
      "[run]\ntask = periodic\n[nowhere]\nx = 1\n",
      "[run]\ntask = periodic\n[cluster.2]\ncatalog = pair\nstrengths = 1, 1\n",
      "[run]\ntask = periodic\n[cluster.1]\ncatalog = blob\n",
      "[run]\ntask = periodic\n[cluster.1]\ncatalog = pair\nstrengths = 1\n",
      "[run]\ntask = periodic\n[cluster.1]\ncatalog = custom\nstrengths = 1, 1\npositions = 1, 0\n",
      "[run]\ntask = periodic\n[domain]\nkind = square\n",
      "[run]\n",
      "task = periodic\n",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse(text), cli::ConfigError);
  }
  CHECK_THROWS_AS(cli::load_config("/nonexistent/vortexlab.cfg"), cli::ConfigError);
}

TEST_CASE("exit statuses") {
  CHECK(cli::exit_status(cli::ConfigError("x")) == cli::kParseError);
  CHECK(cli::exit_status(PreconditionError("x")) == cli::kPrecondition);
  CHECK(cli::exit_status(ScaleTooLargeError("x", 0.3)) == cli::kPrecondition);
  CHECK(cli::exit_status(ConvergenceError("x")) == cli::kNoConvergence);
  CHECK(cli::exit_status(CollisionError("x", 0, 1, 0.5)) == cli::kGeometry);
  CHECK(cli::exit_status(DomainError("x", 0, 0.5)) == cli::kGeometry);
  CHECK(cli::exit_status(std::runtime_error("x")) == cli::kFailure);
}

TEST_CASE("dipole run recovers mu") {
  const fs::path dir = scratch("dipole");
  std::ostringstream log;
  CHECK(cli::run(stage("dipole.cfg", dir).string(), log) == cli::kSuccess);
  const auto j = nlohmann::json::parse(slurp(dir / "out" / "stationary.json"));
  const auto& p = j["stationary"]["positions"];
  const double mu = std::hypot(p[0].get<double>(), p[1].get<double>());
  CHECK(std::abs(mu - std::sqrt(std::sqrt(5.0) - 2.0)) <= 1e-9);
  CHECK(j["stationary"]["classification"] == "rotational");
  CHECK(j["version"] == cli::kVersion);
  CHECK(j["task"] == "stationary");
  CHECK(j["config"]["stationary"]["perturbation"] == 0.02);
}

TEST_CASE("two-pair run through the executable") {
  const fs::path dir = scratch("two_pairs");
  const fs::path cfg = stage("two_pairs.cfg", dir);
  CHECK(exe("run " + cfg.string(), dir / "log.txt") == 0);
  const fs::path out = dir / "out";
  REQUIRE(fs::exists(out / "orbit_r0.1.json"));
  CHECK(fs::exists(out / "traj_r0.1.csv"));
  CHECK(fs::exists(out / "traj_r0.1_rescaled.csv"));
  const auto j = nlohmann::json::parse(slurp(out / "orbit_r0.1.json"));
  CHECK(j["orbit"]["residual"].get<double>() <= 1e-10);
  CHECK(j["config"]["periodic"]["r"] == 0.1);
  std::ifstream csv(out / "traj_r0.1.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,x1,y1,x2,y2,x3,y3,x4,y4,H");
  // Structured log lines.
  std::ifstream log(dir / "log.txt");
  std::string line;
  const std::regex format(R"(level=(info|warn|error) task=\w+ msg=".*")");
  int lines = 0;
  while (std::getline(log, line)) {
    CHECK(std::regex_match(line, format));
    ++lines;
  }
  CHECK(lines > 0);
}

TEST_CASE("determinism") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const std::string body = slurp(fs::path(VORTEXLAB_DOCS) / "dipole.cfg");
  for (const fs::path& dir : {a, b}) {
    std::string text = std::regex_replace(body, std::regex("output = [^\n]*"), "output = out");
    std::ofstream(dir / "dipole.cfg") << text;
    const std::string cmd = "cd " + dir.string() + " && " + VORTEXLAB_EXE + " run dipole.cfg >/dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
  }
  CHECK(slurp(a / "out" / "stationary.json") == slurp(b / "out" / "stationary.json"));
  CHECK(!slurp(a / "out" / "stationary.json").empty());
}

TEST_CASE("seed changes the perturbed guess") {
  const fs::path a = scratch("seed_a");
  const fs::path b = scratch("seed_b");
  const std::string task =
      "task = stationary\n[domain]\nkind = disc\n[stationary]\nstrengths = 1, -1\n"
      "positions = 0.5, 0, -0.5, 0\nperturbation = 0.05\n";
  std::ostringstream log;
  CHECK(cli::run(write_config(a, "seed = 1\n" + task).string(), log) == 0);
  CHECK(cli::run(write_config(b, "seed = 2\n" + task).string(), log) == 0);
  const auto ja = nlohmann::json::parse(slurp(a / "out" / "stationary.json"));
  const auto jb = nlohmann::json::parse(slurp(b / "out" / "stationary.json"));
  CHECK(ja["stationary"]["gradient_history"][0] != jb["stationary"]["gradient_history"][0]);
}

TEST_CASE("coded failures") {
  SUBCASE("zero-sum cluster is a precondition violation") {
    const fs::path dir = scratch("zero_sum");
    const fs::path cfg = write_config(dir,
                                      "task = periodic\n[domain]\nkind = disc\n"
                                      "[stationary]\nstrengths = -2, 2\npositions = 0.5, 0, -0.5, 0\n"
                                      "[cluster.1]\ncatalog = pair\nstrengths = 1, -1\n"
                                      "[cluster.2]\ncatalog = pair\nstrengths = 1, 1\n");
    CHECK(exe("run " + cfg.string(), dir / "log.txt") == 3);
    CHECK(slurp(dir / "log.txt").find("level=error task=periodic") != std::string::npos);
  }
  SUBCASE("unknown key") {
    const fs::path dir = scratch("unknown");
    const fs::path cfg = write_config(dir, "task = stationary\ncolour = blue\n");
    CHECK(exe("run " + cfg.string(), dir / "log.txt") == 2);
  }
  SUBCASE("missing file and bad command line") {
    const fs::path dir = scratch("missing");
    CHECK(exe("run " + (dir / "none.cfg").string(), dir / "log.txt") == 2);
    CHECK(exe("frobnicate", dir / "log.txt") == 2);
  }
  SUBCASE("no critical point") {
    const fs::path dir = scratch("plane_pair");
    const fs::path cfg = write_config(dir,
                                      "task = stationary\n[domain]\nkind = plane\n"
                                      "[stationary]\nstrengths = 1, 1\npositions = 0.5, 0, -0.5, 0\n");
    CHECK(exe("run " + cfg.string(), dir / "log.txt") == 4);
  }
  SUBCASE("boundary event") {
    const fs::path dir = scratch("wall");
    const fs::path cfg = write_config(dir,
                                      "task = simulate\n[domain]\nkind = disc\n"
                                      "[integrator]\nboundary_margin = 0.06\n"
                                      "[simulate]\nstrengths = 1, -1\npositions = 0.05, -0.5, -0.05, -0.5\n"
                                      "t_end = 5\n");
    CHECK(exe("run " + cfg.string(), dir / "log.txt") == 5);
  }
  SUBCASE("scale too large") {
    const fs::path dir = scratch("big_r");
    const fs::path cfg = write_config(dir,
                                      "task = periodic\n[domain]\nkind = disc\n"
                                      "[stationary]\nstrengths = -2, 2\npositions = 0.5, 0, -0.5, 0\n"
                                      "[cluster.1]\ncatalog = pair\nstrengths = -1, -1\n"
                                      "[cluster.2]\ncatalog = pair\nstrengths = 1, 1\n"
                                      "[periodic]\nr = 3\n");
    CHECK(exe("run " + cfg.string(), dir / "log.txt") == 3);
  }
}

TEST_CASE("certify command") {
  std::ostringstream out, log;
  CHECK(cli::certify("equilateral", {"2", "1", "1"}, out, log) == 0);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["certification"]["periodic_solution_count"] == 3);
  std::ostringstream out2;
  CHECK(cli::certify("thomson", {"4", "0.25"}, out2, log) == 0);
  CHECK(nlohmann::json::parse(out2.str())["certification"]["symmetric_count"] == 3);
  std::ostringstream sink;
  CHECK(cli::certify("pair", {"1"}, sink, log) == cli::kParseError);
  CHECK(cli::certify("pair", {"1", "-1"}, sink, log) == cli::kPrecondition);
  CHECK(cli::certify("dodecagon", {}, sink, log) == cli::kParseError);
  const fs::path dir = scratch("certify_cmd");
  CHECK(exe("certify hermite 3 1", dir / "log.txt") == 0);
  CHECK(exe("version", dir / "log.txt") == 0);
  CHECK(slurp(dir / "log.txt").find(cli::kVersion) != std::string::npos);
}

TEST_CASE("catalog equilibria from parameters") {
  CHECK(cli::catalog_equilibrium("pair", {"0.5", "0.5"}).size() == 2);
  CHECK(cli::catalog_equilibrium("thomson", {"5", "0.2"}).order() == 5);
  CHECK(cli::catalog_equilibrium("hermite", {"4", "1"}).size() == 4);
  const double d = 1.0 / std::sqrt(kPi);
  const auto custom = cli::catalog_equilibrium(
      "custom", {"2", "0.5", "0.5", std::to_string(d / 2), "0", std::to_string(-d / 2), "0"});
  CHECK(custom.omega == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK_THROWS_AS(cli::catalog_equilibrium("thomson", {"x", "1"}), cli::ConfigError);
}

TEST_CASE("shipped configs all run") {
  for (const char* name : {"certify.cfg", "simulate.cfg", "thomson.cfg", "sweep.cfg"}) {
    CAPTURE(name);
    const fs::path dir = scratch(std::string("shipped_") + name);
    std::ostringstream log;
    CHECK(cli::run(stage(name, dir).string(), log) == 0);
  }
}
