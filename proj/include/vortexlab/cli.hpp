#pragma once

// Configuration files and task runner behind the `vortexlab` executable.
// The file format is documented in docs/config.md.

#include "vortexlab/dynamics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/periodic.hpp"
#include "vortexlab/stationary.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vortexlab::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Malformed or inconsistent configuration (exit status 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Task { Simulate, Stationary, Certify, Periodic, Sweep, Scan };

std::string to_string(Task task);

struct ClusterConfig {
  std::string catalog;  // pair, equilateral, thomson, hermite, custom, single
  std::vector<double> strengths;
  int n = 0;
  double gamma = 0.0;
  std::vector<double> positions;
  std::optional<double> omega;
  std::vector<int> sigma;  // zero-based images; empty for the identity
  bool normalize = true;
};

struct RunConfig {
  Task task = Task::Periodic;
  std::string output = ".";
  std::uint64_t seed = 0;

  std::string domain = "disc";
  double epsilon = 1e-2;

  std::vector<double> anchor_strengths;
  std::vector<double> anchor_positions;
  bool solve_stationary = true;
  double perturbation = 0.0;
  NewtonOptions newton{};

  std::vector<ClusterConfig> clusters;

  double r = 0.1;
  std::vector<double> r_list;
  std::vector<double> phases;
  int grid = 8;
  ShootingOptions shooting{};

  std::vector<double> simulate_strengths;
  std::vector<double> simulate_positions;
  std::optional<double> t_end;
  int samples = 256;

  CertifyOptions certify_options{};
  IntegratorSettings integrator{};

  /// Every setting with its effective value, by section.
  nlohmann::json resolved;
};

/// Exit statuses of `run`.
enum ExitStatus : int {
  kSuccess = 0,
  kFailure = 1,
  kParseError = 2,
  kPrecondition = 3,
  kNoConvergence = 4,
  kGeometry = 5,
};

/// Throws ConfigError with a line-level diagnostic.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Maps an exception to its exit status.
int exit_status(const std::exception& e);

/// Runs the task, writing artifacts under config.output and structured
/// `level=... task=... msg=...` lines to `log`. Returns the exit status.
int run(const RunConfig& config, std::ostream& log);
int run(const std::string& config_path, std::ostream& log);

/// Builds a catalog relative equilibrium from command-line parameters:
///   pair g1 g2 | equilateral g1 g2 g3 | thomson n gamma | hermite n gamma |
///   custom n g1..gn x1 y1..xn yn
RelativeEquilibrium catalog_equilibrium(const std::string& name,
                                        const std::vector<std::string>& params);

/// `certify` command: prints the certification JSON to `out`.
int certify(const std::string& name, const std::vector<std::string>& params, std::ostream& out,
            std::ostream& log);

/// Same line format as the task log.
void log_line(std::ostream& log, const std::string& level, const std::string& task,
              const std::string& message);

}  // namespace vortexlab::cli
