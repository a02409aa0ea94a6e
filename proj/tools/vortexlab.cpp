// vortexlab: run <config> | certify <catalog> <params...> | version

#include "vortexlab/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

// VORTEXLAB_THREADS caps the OpenMP worker count.
void apply_thread_limit() {
  const char* env = std::getenv("VORTEXLAB_THREADS");
  if (!env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end != env && *end == '\0' && n > 0) {
    omp_set_num_threads(static_cast<int>(n));
  } else {
    vortexlab::cli::log_line(std::cerr, "warn", "main",
                             std::string("ignoring VORTEXLAB_THREADS='") + env + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = vortexlab::cli;
  CLI::App app{"Point-vortex periodic orbits by superposition of rotating clusters"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the task described by a configuration file");
  run->add_option("config", config_path, "Configuration file")->required();

  std::string catalog;
  std::vector<std::string> params;
  auto* certify = app.add_subcommand("certify", "Certify a catalog relative equilibrium");
  certify->add_option("catalog", catalog, "pair, equilateral, thomson, hermite or custom")
      ->required();
  certify->add_option("params", params, "Catalog parameters");
  certify->allow_extras(false);
  certify->positionals_at_end(false);

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kParseError;
  }

  apply_thread_limit();
  if (app.got_subcommand("version")) {
    std::cout << "vortexlab " << cli::kVersion << "\n";
    return cli::kSuccess;
  }
  if (app.got_subcommand("certify")) return cli::certify(catalog, params, std::cout, std::cerr);
  return cli::run(config_path, std::cerr);
}
