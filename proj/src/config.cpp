#include "vortexlab/cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vortexlab::cli {
namespace {

using boost::property_tree::ptree;

std::string trim(const std::string& s) {
  const auto begin = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  const auto end = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return begin < end ? std::string(begin, end) : std::string();
}

// Values may carry a trailing `; comment` or `# comment`.
std::string strip_comment(const std::string& s) {
  return trim(s.substr(0, s.find_first_of(";#")));
}

double parse_number(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || token.empty()) {
    throw ConfigError(where + ": '" + token + "' is not a number");
  }
  if (!std::isfinite(value)) throw ConfigError(where + ": value must be finite");
  return value;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

// One INI section. Reads record the effective value in `resolved` and mark
// the key as used; finish() rejects keys nobody asked for.
class Section {
 public:
  Section(std::string name, const ptree* tree, nlohmann::json& resolved)
      : name_(std::move(name)), resolved_(resolved[name_]) {
    if (!resolved_.is_object()) resolved_ = nlohmann::json::object();
    if (tree) {
      for (const auto& [key, child] : *tree) {
        if (!child.empty()) throw ConfigError(where(key) + ": nested keys are not allowed");
        values_[key] = strip_comment(child.data());
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const std::string v = raw(key).value_or(fallback);
    resolved_[key] = v;
    return v;
  }

  std::string required_text(const std::string& key) {
    auto v = raw(key);
    if (!v || v->empty()) throw ConfigError(where(key) + " is required");
    resolved_[key] = *v;
    return *v;
  }

  std::optional<double> optional_number(const std::string& key) {
    auto v = raw(key);
    if (!v) return std::nullopt;
    const double x = parse_number(*v, where(key));
    resolved_[key] = x;
    return x;
  }

  double number(const std::string& key, double fallback) {
    const double x = optional_number(key).value_or(fallback);
    resolved_[key] = x;
    return x;
  }

  double positive(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(where(key) + " must be positive");
    return x;
  }

  long integer(const std::string& key, long fallback, long min_value) {
    auto v = raw(key);
    long x = fallback;
    if (v) {
      const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
      if (ec != std::errc() || ptr != v->data() + v->size() || v->empty()) {
        throw ConfigError(where(key) + ": '" + *v + "' is not an integer");
      }
    }
    if (x < min_value) {
      throw ConfigError(where(key) + " must be at least " + std::to_string(min_value));
    }
    resolved_[key] = x;
    return x;
  }

  bool flag(const std::string& key, bool fallback) {
    auto v = raw(key);
    bool x = fallback;
    if (v) {
      std::string s = *v;
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
      if (s == "true" || s == "yes" || s == "on" || s == "1") {
        x = true;
      } else if (s == "false" || s == "no" || s == "off" || s == "0") {
        x = false;
      } else {
        throw ConfigError(where(key) + ": '" + *v + "' is not a boolean");
      }
    }
    resolved_[key] = x;
    return x;
  }

  std::vector<double> list(const std::string& key) {
    auto v = raw(key);
    std::vector<double> out;
    if (v) {
      for (const auto& t : tokens(*v)) out.push_back(parse_number(t, where(key)));
      resolved_[key] = out;
    }
    return out;
  }

  void record(const std::string& key, nlohmann::json value) { resolved_[key] = std::move(value); }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  void finish() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw ConfigError("unknown or unused key " + where(key));
    }
  }

 private:
  std::string name_;
  nlohmann::json& resolved_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

Task parse_task(const std::string& s) {
  static const std::map<std::string, Task> names = {
      {"simulate", Task::Simulate}, {"stationary", Task::Stationary}, {"certify", Task::Certify},
      {"periodic", Task::Periodic}, {"sweep", Task::Sweep},           {"scan", Task::Scan},
  };
  auto it = names.find(s);
  if (it == names.end()) throw ConfigError("[run] task: unknown task '" + s + "'");
  return it->second;
}

ClusterConfig read_cluster(Section& s) {
  ClusterConfig c;
  c.catalog = s.required_text("catalog");
  auto need_strengths = [&](std::size_t count) {
    c.strengths = s.list("strengths");
    if (count && c.strengths.size() != count) {
      throw ConfigError(s.where("strengths") + ": catalog '" + c.catalog + "' needs " +
                        std::to_string(count) + " strengths");
    }
  };
  if (c.catalog == "pair") {
    need_strengths(2);
  } else if (c.catalog == "equilateral") {
    need_strengths(3);
  } else if (c.catalog == "thomson" || c.catalog == "hermite") {
    c.n = static_cast<int>(s.integer("n", 0, c.catalog == "thomson" ? 2 : 1));
    if (!s.has("gamma")) throw ConfigError(s.where("gamma") + " is required");
    c.gamma = s.number("gamma", 0.0);
  } else if (c.catalog == "single") {
    need_strengths(1);
  } else if (c.catalog == "custom") {
    need_strengths(0);
    if (c.strengths.empty()) throw ConfigError(s.where("strengths") + " is required");
    c.positions = s.list("positions");
    if (c.positions.size() != 2 * c.strengths.size()) {
      throw ConfigError(s.where("positions") + " needs two coordinates per strength");
    }
    c.omega = s.optional_number("omega");
    const auto sigma = s.list("sigma");
    for (double x : sigma) {
      if (x != std::floor(x) || x < 1 || x > static_cast<double>(c.strengths.size())) {
        throw ConfigError(s.where("sigma") + ": images are 1-based vortex indices");
      }
      c.sigma.push_back(static_cast<int>(x) - 1);
    }
    if (!c.sigma.empty() && c.sigma.size() != c.strengths.size()) {
      throw ConfigError(s.where("sigma") + " needs one image per vortex");
    }
  } else {
    throw ConfigError(s.where("catalog") + ": unknown catalog '" + c.catalog +
                      "' (pair, equilateral, thomson, hermite, custom, single)");
  }
  c.normalize = s.flag("normalize", true);
  return c;
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::Simulate: return "simulate";
    case Task::Stationary: return "stationary";
    case Task::Certify: return "certify";
    case Task::Periodic: return "periodic";
    case Task::Sweep: return "sweep";
    case Task::Scan: return "scan";
  }
  return "unknown";
}

RunConfig parse_config(std::istream& in) {
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::set<std::string> known = {"run",      "domain",   "stationary", "periodic",
                                              "simulate", "certify",  "integrator"};
  std::map<long, const ptree*> cluster_trees;
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) {
      throw ConfigError("key '" + name + "' appears outside of any section");
    }
    if (known.count(name)) continue;
    if (name.rfind("cluster.", 0) == 0) {
      const std::string index = name.substr(8);
      long k = 0;
      const auto [ptr, ec] = std::from_chars(index.data(), index.data() + index.size(), k);
      if (ec != std::errc() || ptr != index.data() + index.size() || k < 1) {
        throw ConfigError("section [" + name + "]: cluster index must be a positive integer");
      }
      cluster_trees[k] = &child;
      continue;
    }
    throw ConfigError("unknown section [" + name + "]");
  }

  RunConfig cfg;
  cfg.resolved = nlohmann::json::object();
  auto section = [&](const std::string& name) {
    auto child = tree.get_child_optional(ptree::path_type(name, '/'));
    return Section(name, child ? &*child : nullptr, cfg.resolved);
  };

  Section run = section("run");
  cfg.task = parse_task(run.required_text("task"));
  cfg.output = run.text("output", ".");
  cfg.seed = static_cast<std::uint64_t>(run.integer("seed", 0, 0));
  run.finish();

  Section domain = section("domain");
  cfg.domain = domain.text("kind", "disc");
  if (cfg.domain != "plane" && cfg.domain != "disc" && cfg.domain != "perturbed_disc") {
    throw ConfigError("[domain] kind: unknown domain '" + cfg.domain +
                      "' (plane, disc, perturbed_disc)");
  }
  if (cfg.domain == "perturbed_disc") cfg.epsilon = domain.number("epsilon", 1e-2);
  domain.finish();

  Section integ = section("integrator");
  cfg.integrator.rtol = integ.positive("rtol", 1e-12);
  cfg.integrator.atol = integ.positive("atol", 1e-12);
  if (auto h = integ.optional_number("max_step")) {
    if (!(*h > 0.0)) throw ConfigError("[integrator] max_step must be positive");
    cfg.integrator.max_step = *h;
  }
  cfg.integrator.collision_tolerance = integ.positive("collision_tolerance", kCollisionTolerance);
  cfg.integrator.boundary_margin = integ.positive("boundary_margin", kBoundaryMargin);
  cfg.integrator.max_steps = integ.integer("max_steps", 2'000'000, 1);
  cfg.integrator.energy_projection = integ.flag("energy_projection", false);
  integ.finish();

  Section stat = section("stationary");
  cfg.anchor_strengths = stat.list("strengths");
  cfg.anchor_positions = stat.list("positions");
  cfg.solve_stationary = stat.flag("solve", true);
  cfg.perturbation = stat.number("perturbation", 0.0);
  if (cfg.perturbation < 0.0) throw ConfigError("[stationary] perturbation must be >= 0");
  cfg.newton.gradient_tolerance = stat.positive("tolerance", 1e-10);
  cfg.newton.max_iterations = static_cast<int>(stat.integer("max_iterations", 100, 1));
  stat.finish();

  long expected = 1;
  for (const auto& [k, child] : cluster_trees) {
    if (k != expected) {
      throw ConfigError("cluster sections must be numbered 1, 2, ... without gaps; missing [cluster." +
                        std::to_string(expected) + "]");
    }
    ++expected;
    Section s("cluster." + std::to_string(k), child, cfg.resolved);
    cfg.clusters.push_back(read_cluster(s));
    s.finish();
  }

  Section per = section("periodic");
  cfg.r = per.positive("r", 0.1);
  cfg.r_list = per.list("r_list");
  for (double r : cfg.r_list) {
    if (!(r > 0.0)) throw ConfigError("[periodic] r_list entries must be positive");
  }
  cfg.phases = per.list("phases");
  cfg.grid = static_cast<int>(per.integer("grid", 8, 1));
  cfg.shooting.residual_tolerance = per.positive("tolerance", 1e-10);
  cfg.shooting.max_iterations = static_cast<int>(per.integer("max_iterations", 50, 1));
  cfg.shooting.truncation = per.positive("truncation", 1e-6);
  cfg.shooting.samples_per_2pi = static_cast<int>(per.integer("samples_per_2pi", 256, 8));
  per.finish();
  cfg.shooting.integrator = cfg.integrator;

  Section sim = section("simulate");
  cfg.simulate_strengths = sim.list("strengths");
  cfg.simulate_positions = sim.list("positions");
  cfg.t_end = sim.optional_number("t_end");
  if (cfg.t_end && !(*cfg.t_end > 0.0)) throw ConfigError("[simulate] t_end must be positive");
  cfg.samples = static_cast<int>(sim.integer("samples", 256, 1));
  sim.finish();

  Section cert = section("certify");
  cfg.certify_options.tolerance = cert.positive("tolerance", 1e-6);
  cfg.certify_options.residual_tolerance = cert.positive("residual_tolerance", 1e-10);
  cert.finish();

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(in);
}

}  // namespace vortexlab::cli
