#include "vortexlab/cli.hpp"

#include "vortexlab/equilibria.hpp"
#include "vortexlab/serialize.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

namespace vortexlab::cli {
namespace {

namespace fs = std::filesystem;

DomainPtr make_domain(const RunConfig& cfg) {
  if (cfg.domain == "plane") return whole_plane();
  if (cfg.domain == "perturbed_disc") return perturbed_disc(cfg.epsilon);
  return unit_disc();
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Normalized so that sigma * Z(t + 2 pi) = Z(t).
RelativeEquilibrium normalized(const RelativeEquilibrium& eq) {
  if (eq.size() <= 1 || eq.omega == 0.0) return eq;
  const double target = (eq.omega > 0.0 ? 1.0 : -1.0) / eq.order();
  return normalize(eq, target);
}

RelativeEquilibrium build_cluster(const ClusterConfig& c) {
  RelativeEquilibrium eq;
  const auto& s = c.strengths;
  if (c.catalog == "pair") {
    eq = make_pair(s[0], s[1]);
  } else if (c.catalog == "equilateral") {
    eq = make_equilateral(s[0], s[1], s[2]);
  } else if (c.catalog == "thomson") {
    eq = make_thomson(c.n, c.gamma);
  } else if (c.catalog == "hermite") {
    eq = make_collinear_hermite(c.n, c.gamma);
  } else if (c.catalog == "single") {
    eq = make_single(s[0]);
  } else {
    const int n = static_cast<int>(s.size());
    const Permutation sigma = c.sigma.empty() ? Permutation::identity(n) : Permutation(c.sigma);
    eq = c.omega ? make_custom(s, to_vector(c.positions), *c.omega, sigma)
                 : make_custom(s, to_vector(c.positions), sigma);
  }
  return c.normalize ? normalized(eq) : eq;
}

std::vector<RelativeEquilibrium> build_clusters(const RunConfig& cfg) {
  std::vector<RelativeEquilibrium> out;
  for (const auto& c : cfg.clusters) out.push_back(build_cluster(c));
  return out;
}

StationaryPoint resolve_stationary(const RunConfig& cfg, const DomainPtr& domain,
                                   const std::vector<RelativeEquilibrium>& clusters) {
  std::vector<double> strengths = cfg.anchor_strengths;
  if (strengths.empty()) {
    for (const auto& c : clusters) strengths.push_back(c.total_strength());
  }
  if (strengths.empty()) throw ConfigError("[stationary] strengths is required");
  if (cfg.anchor_positions.size() != 2 * strengths.size()) {
    throw ConfigError("[stationary] positions needs two coordinates per anchor");
  }
  Eigen::VectorXd guess = to_vector(cfg.anchor_positions);
  if (cfg.perturbation > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Eigen::Index i = 0; i < guess.size(); ++i) guess[i] += cfg.perturbation * unit(rng);
  }
  if (cfg.solve_stationary) return find_critical_point(strengths, domain, guess, cfg.newton);

  StationaryPoint sp;
  sp.strengths = strengths;
  sp.positions = guess;
  sp.domain = domain;
  sp.gradient_norm = m_hamiltonian_gradient(strengths, *domain, guess).norm();
  classify(sp, *domain);
  return sp;
}

SuperpositionSpec build_spec(const RunConfig& cfg, const DomainPtr& domain, double r) {
  if (cfg.clusters.empty()) throw ConfigError("task needs at least one [cluster.N] section");
  SuperpositionSpec spec;
  spec.clusters = build_clusters(cfg);
  spec.stationary = resolve_stationary(cfg, domain, spec.clusters);
  spec.phases = cfg.phases;
  if (spec.phases.empty()) spec.phases.assign(spec.nontrivial_count(), 0.0);
  spec.r = r;
  validate(spec);
  return spec;
}

nlohmann::json envelope(const RunConfig& cfg) {
  return {{"version", kVersion}, {"task", to_string(cfg.task)}, {"config", cfg.resolved}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::string scale_tag(double r) { return "r" + format_double(r); }

// Rescaled and physical CSVs of one period.
void write_orbit_csv(const fs::path& dir, const std::string& stem, const SuperpositionSpec& spec,
                     const PeriodicOrbit& orbit, int samples_per_2pi) {
  const RescaledSystem rs = rescaled_system(spec, orbit.r);
  const VortexSystem physical = full_system(spec);
  const int n = samples_per_2pi * symmetry_order(spec);
  std::vector<double> ut, zt, uh, zh;
  std::vector<Eigen::VectorXd> us, zs;
  for (int i = 0; i <= n; ++i) {
    const double t = orbit.tau * i / n;
    const Eigen::VectorXd u = orbit.trajectory->at(t);
    const Eigen::VectorXd z = rs.physical(u);
    ut.push_back(t);
    us.push_back(u);
    uh.push_back(rescaled_hamiltonian(rs, u));
    zt.push_back(t * orbit.r * orbit.r);
    zs.push_back(z);
    zh.push_back(hamiltonian(physical, z));
  }
  std::ofstream a(dir / (stem + ".csv"), std::ios::binary);
  write_csv(a, zt, zs, zh);
  std::ofstream b(dir / (stem + "_rescaled.csv"), std::ios::binary);
  write_csv(b, ut, us, uh);
  if (!a || !b) throw Error("cannot write trajectory CSV in '" + dir.string() + "'");
}

void log_orbit(std::ostream& log, const std::string& task, const PeriodicOrbit& o) {
  log_line(log, "info", task,
           "r=" + format_double(o.r) + " T=" + format_double(o.period) +
               " iterations=" + std::to_string(o.iterations) + " residual=" +
               format_double(o.residual) + " closure=" + format_double(o.closure) +
               " distance_to_M=" + format_double(o.distance_to_M));
}

void run_stationary(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  const DomainPtr domain = make_domain(cfg);
  const StationaryPoint sp = resolve_stationary(cfg, domain, build_clusters(cfg));
  nlohmann::json j = envelope(cfg);
  j["stationary"] = to_json(sp);
  write_json(dir / "stationary.json", j);
  log_line(log, "info", "stationary",
           "classification=" + to_string(sp.classification) +
               " gradient_norm=" + format_double(sp.gradient_norm) +
               " iterations=" + std::to_string(sp.iterations));
}

void run_certify(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  if (cfg.clusters.empty()) throw ConfigError("task certify needs at least one [cluster.N] section");
  nlohmann::json j = envelope(cfg);
  j["clusters"] = nlohmann::json::array();
  int k = 1;
  for (const auto& eq : build_clusters(cfg)) {
    const CertificationReport report = vortexlab::certify(eq, cfg.certify_options);
    j["clusters"].push_back({{"equilibrium", to_json(eq)}, {"certification", to_json(report)}});
    log_line(log, "info", "certify",
             "cluster=" + std::to_string(k++) + " catalog=" + eq.catalog +
                 " periodic_solution_count=" + std::to_string(report.periodic_solution_count) +
                 " symmetric_count=" + std::to_string(report.symmetric_count));
  }
  write_json(dir / "certification.json", j);
}

void run_periodic(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  const SuperpositionSpec spec = build_spec(cfg, make_domain(cfg), cfg.r);
  const PeriodicOrbit orbit = shoot(spec, build_initial_guess(spec), cfg.shooting);
  nlohmann::json j = envelope(cfg);
  j["spec"] = to_json(spec);
  j["stationary"] = to_json(spec.stationary);
  j["orbit"] = to_json(orbit);
  write_json(dir / ("orbit_" + scale_tag(orbit.r) + ".json"), j);
  write_orbit_csv(dir, "traj_" + scale_tag(orbit.r), spec, orbit, cfg.shooting.samples_per_2pi);
  log_orbit(log, "periodic", orbit);
}

void run_sweep(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  if (cfg.r_list.empty()) throw ConfigError("task sweep needs [periodic] r_list");
  const SuperpositionSpec spec = build_spec(cfg, make_domain(cfg), cfg.r_list.front());
  const std::vector<PeriodicOrbit> orbits = continue_in_r(spec, cfg.r_list, cfg.shooting);
  nlohmann::json summary = envelope(cfg);
  summary["spec"] = to_json(spec);
  summary["orbits"] = nlohmann::json::array();
  bool decreasing = true;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const PeriodicOrbit& o = orbits[i];
    if (i > 0 && !(o.distance_to_M < orbits[i - 1].distance_to_M)) decreasing = false;
    SuperpositionSpec at_r = spec;
    at_r.r = o.r;
    nlohmann::json j = envelope(cfg);
    j["spec"] = to_json(at_r);
    j["stationary"] = to_json(spec.stationary);
    j["orbit"] = to_json(o);
    write_json(dir / ("orbit_" + scale_tag(o.r) + ".json"), j);
    write_orbit_csv(dir, "traj_" + scale_tag(o.r), at_r, o, cfg.shooting.samples_per_2pi);
    summary["orbits"].push_back(to_json(o));
    log_orbit(log, "sweep", o);
  }
  summary["distance_to_M_strictly_decreasing"] = decreasing;
  write_json(dir / "sweep.json", summary);
  if (!decreasing) log_line(log, "warn", "sweep", "distance_to_M is not strictly decreasing");
}

void run_scan(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  const SuperpositionSpec spec = build_spec(cfg, make_domain(cfg), cfg.r);
  const ScanResult result = scan_phases(spec, cfg.grid, cfg.shooting);
  nlohmann::json j = envelope(cfg);
  j["spec"] = to_json(spec);
  j["attempts"] = nlohmann::json::array();
  for (const auto& a : result.attempts) {
    nlohmann::json phases = nlohmann::json::array();
    for (double p : a.phases) phases.push_back(p);
    j["attempts"].push_back({{"phases", phases},
                             {"converged", a.converged},
                             {"class", a.orbit_class},
                             {"failure", a.failure}});
  }
  j["classes"] = nlohmann::json::array();
  for (std::size_t c = 0; c < result.orbits.size(); ++c) {
    j["classes"].push_back(to_json(result.orbits[c]));
    write_orbit_csv(dir, "traj_" + scale_tag(cfg.r) + "_class" + std::to_string(c + 1), spec,
                    result.orbits[c], cfg.shooting.samples_per_2pi);
  }
  j["conclusive"] = result.conclusive;
  j["status"] = result.conclusive ? "conclusive" : "inconclusive";
  write_json(dir / "scan.json", j);
  const std::string found = "classes=" + std::to_string(result.orbits.size()) +
                            " expected_at_least=" + std::to_string(spec.nontrivial_count());
  if (result.conclusive) {
    log_line(log, "info", "scan", found);
  } else {
    log_line(log, "warn", "scan", "inconclusive: " + found + " (T may exceed T_0)");
  }
}

void run_simulate(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  const DomainPtr domain = make_domain(cfg);
  nlohmann::json j = envelope(cfg);
  if (!cfg.simulate_strengths.empty()) {
    if (cfg.simulate_positions.size() != 2 * cfg.simulate_strengths.size()) {
      throw ConfigError("[simulate] positions needs two coordinates per strength");
    }
    if (!cfg.t_end) throw ConfigError("[simulate] t_end is required for explicit vortices");
    const VortexSystem system(cfg.simulate_strengths, domain);
    const Eigen::VectorXd z0 = to_vector(cfg.simulate_positions);
    const Trajectory tr = integrate(system, z0, 0.0, *cfg.t_end, cfg.integrator);
    std::vector<double> times, energy;
    std::vector<Eigen::VectorXd> states;
    for (int i = 0; i <= cfg.samples; ++i) {
      const double t = *cfg.t_end * i / cfg.samples;
      times.push_back(t);
      states.push_back(tr.at(t));
      energy.push_back(hamiltonian(system, states.back()));
    }
    std::ofstream out(dir / "traj.csv", std::ios::binary);
    write_csv(out, times, states, energy);
    if (!out) throw Error("cannot write traj.csv");
    j["energy_drift"] = tr.energy_drift();
    j["min_separation"] = tr.min_separation;
    j["steps"] = tr.times.size() - 1;
    write_json(dir / "simulate.json", j);
    log_line(log, "info", "simulate", "energy_drift=" + format_double(tr.energy_drift()));
    return;
  }

  // Superposition initial state at r, integrated in both coordinates.
  const SuperpositionSpec spec = build_spec(cfg, domain, cfg.r);
  const Eigen::VectorXd u0 = build_initial_guess(spec);
  const RescaledSystem rs = rescaled_system(spec);
  const VortexSystem physical = full_system(spec);
  const double r2 = cfg.r * cfg.r;
  const double t_end = cfg.t_end.value_or(rescaled_period(spec) * r2);
  const Trajectory tu = integrate(rs, u0, 0.0, t_end / r2, cfg.integrator);
  const Trajectory tz = integrate(physical, rs.physical(u0), 0.0, t_end, cfg.integrator);
  std::vector<double> ut, zt, uh, zh;
  std::vector<Eigen::VectorXd> us, zs;
  double deviation = 0.0;
  for (int i = 0; i <= cfg.samples; ++i) {
    const double t = t_end * i / cfg.samples;
    ut.push_back(t / r2);
    us.push_back(tu.at(t / r2));
    uh.push_back(rescaled_hamiltonian(rs, us.back()));
    zt.push_back(t);
    zs.push_back(tz.at(t));
    zh.push_back(hamiltonian(physical, zs.back()));
    deviation = std::max(deviation, (zs.back() - rs.physical(us.back())).norm());
  }
  const std::string tag = scale_tag(cfg.r);
  std::ofstream a(dir / ("traj_" + tag + ".csv"), std::ios::binary);
  write_csv(a, zt, zs, zh);
  std::ofstream b(dir / ("traj_" + tag + "_rescaled.csv"), std::ios::binary);
  write_csv(b, ut, us, uh);
  if (!a || !b) throw Error("cannot write trajectory CSV");
  j["spec"] = to_json(spec);
  j["rescaling_deviation"] = deviation;
  j["energy_drift"] = tz.energy_drift();
  j["rescaled_energy_drift"] = tu.energy_drift();
  write_json(dir / "simulate.json", j);
  log_line(log, "info", "simulate",
           "rescaling_deviation=" + format_double(deviation) +
               " energy_drift=" + format_double(tz.energy_drift()));
}

double parse_param(const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("parameter '" + s + "' is not a number");
  }
  return x;
}

int parse_count(const std::string& s) {
  const double x = parse_param(s);
  if (x != std::floor(x) || x < 1 || x > 1000) {
    throw ConfigError("parameter '" + s + "' is not a vortex count");
  }
  return static_cast<int>(x);
}

}  // namespace

void log_line(std::ostream& log, const std::string& level, const std::string& task,
              const std::string& message) {
  std::string quoted;
  for (char c : message) {
    if (c == '"' || c == '\\') quoted += '\\';
    quoted += c == '\n' ? ' ' : c;
  }
  log << "level=" << level << " task=" << task << " msg=\"" << quoted << "\"\n";
}

int exit_status(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kParseError;
  if (dynamic_cast<const PreconditionError*>(&e)) return kPrecondition;
  if (dynamic_cast<const ConvergenceError*>(&e)) return kNoConvergence;
  if (dynamic_cast<const GeometryError*>(&e)) return kGeometry;
  return kFailure;
}

int run(const RunConfig& cfg, std::ostream& log) {
  const std::string task = to_string(cfg.task);
  try {
    const fs::path dir(cfg.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + cfg.output + "': " + ec.message());
    switch (cfg.task) {
      case Task::Simulate: run_simulate(cfg, dir, log); break;
      case Task::Stationary: run_stationary(cfg, dir, log); break;
      case Task::Certify: run_certify(cfg, dir, log); break;
      case Task::Periodic: run_periodic(cfg, dir, log); break;
      case Task::Sweep: run_sweep(cfg, dir, log); break;
      case Task::Scan: run_scan(cfg, dir, log); break;
    }
  } catch (const std::exception& e) {
    log_line(log, "error", task, e.what());
    return exit_status(e);
  }
  return kSuccess;
}

int run(const std::string& config_path, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    log_line(log, "error", "config", e.what());
    return exit_status(e);
  }
  return run(cfg, log);
}

RelativeEquilibrium catalog_equilibrium(const std::string& name,
                                        const std::vector<std::string>& params) {
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw ConfigError("catalog '" + name + "' takes " + std::to_string(n) + " parameters, got " +
                        std::to_string(params.size()));
    }
  };
  if (name == "pair") {
    need(2);
    return make_pair(parse_param(params[0]), parse_param(params[1]));
  }
  if (name == "equilateral") {
    need(3);
    return make_equilateral(parse_param(params[0]), parse_param(params[1]),
                            parse_param(params[2]));
  }
  if (name == "thomson") {
    need(2);
    return make_thomson(parse_count(params[0]), parse_param(params[1]));
  }
  if (name == "hermite") {
    need(2);
    return make_collinear_hermite(parse_count(params[0]), parse_param(params[1]));
  }
  if (name == "custom") {
    if (params.empty()) throw ConfigError("catalog 'custom' takes n g1..gn x1 y1..xn yn");
    const int n = parse_count(params[0]);
    need(1 + 3 * static_cast<std::size_t>(n));
    std::vector<double> strengths;
    Eigen::VectorXd z(2 * n);
    for (int i = 0; i < n; ++i) strengths.push_back(parse_param(params[1 + i]));
    for (int i = 0; i < 2 * n; ++i) z[i] = parse_param(params[1 + n + i]);
    return normalized(make_custom(strengths, z, Permutation::identity(n)));
  }
  throw ConfigError("unknown catalog '" + name + "' (pair, equilateral, thomson, hermite, custom)");
}

int certify(const std::string& name, const std::vector<std::string>& params, std::ostream& out,
            std::ostream& log) {
  try {
    const RelativeEquilibrium eq = catalog_equilibrium(name, params);
    const CertificationReport report = vortexlab::certify(eq);
    const nlohmann::json j = {{"version", kVersion},
                              {"equilibrium", to_json(eq)},
                              {"certification", to_json(report)}};
    out << j.dump(2) << "\n";
    log_line(log, "info", "certify",
             "periodic_solution_count=" + std::to_string(report.periodic_solution_count) +
                 " symmetric_count=" + std::to_string(report.symmetric_count));
  } catch (const std::exception& e) {
    log_line(log, "error", "certify", e.what());
    return exit_status(e);
  }
  return kSuccess;
}

}  // namespace vortexlab::cli
