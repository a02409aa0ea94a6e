#include "vortexlab/periodic.hpp"

#include "vortexlab/errors.hpp"
#include "vortexlab/linalg.hpp"

#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

namespace vortexlab {
namespace {

bool is_trivial(const RelativeEquilibrium& eq) { return eq.size() <= 1; }

std::vector<int> cluster_sizes(const SuperpositionSpec& spec) {
  std::vector<int> sizes;
  for (const auto& c : spec.clusters) sizes.push_back(c.size());
  return sizes;
}

std::vector<int> cluster_offsets(const SuperpositionSpec& spec) {
  std::vector<int> offsets;
  int offset = 0;
  for (const auto& c : spec.clusters) {
    offsets.push_back(offset);
    offset += c.size();
  }
  return offsets;
}

int total_vortices(const SuperpositionSpec& spec) {
  int n = 0;
  for (const auto& c : spec.clusters) n += c.size();
  return n;
}

// Period of the cluster's own motion, 2 pi / |omega_k|.
double cluster_period(const RelativeEquilibrium& eq) { return 2.0 * kPi / std::abs(eq.omega); }

std::string number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Rethrows the active exception with "at r=..." prepended, keeping its type.
[[noreturn]] void rethrow_with_scale(double r) {
  const std::string prefix = "at r=" + number(r) + ": ";
  try {
    throw;
  } catch (const ScaleTooLargeError& e) {
    throw ScaleTooLargeError(prefix + e.what(), e.max_admissible_r());
  } catch (const NotAnEquilibriumError& e) {
    throw NotAnEquilibriumError(prefix + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(prefix + e.what());
  } catch (const CollisionError& e) {
    throw CollisionError(prefix + e.what(), e.first(), e.second(), e.time());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what(), e.vortex(), e.time());
  } catch (const StepSizeUnderflowError& e) {
    throw StepSizeUnderflowError(prefix + e.what(), e.time());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(prefix + e.what());
  }
}

// Points of a flattened configuration as columns of a 2 x n matrix.
using Points = Eigen::Matrix<double, 2, Eigen::Dynamic>;

// Applies the least-squares best element of the domain's symmetry group to
// y so that it matches x.
Points align(const Points& x, const Points& y, const Symmetry& sym) {
  switch (sym.kind) {
    case Symmetry::Kind::None:
      return y;
    case Symmetry::Kind::Translational: {
      const double c = sym.direction.dot((x - y).rowwise().mean());
      return y.colwise() + c * sym.direction;
    }
    case Symmetry::Kind::Rotational:
    case Symmetry::Kind::PlaneFull: {
      const bool translate = sym.kind == Symmetry::Kind::PlaneFull;
      const Vec2 cx = translate ? Vec2(x.rowwise().mean()) : Vec2::Zero();
      const Vec2 cy = translate ? Vec2(y.rowwise().mean()) : Vec2::Zero();
      double dot = 0.0;
      double cross = 0.0;
      for (Eigen::Index i = 0; i < x.cols(); ++i) {
        const Vec2 a = x.col(i) - cx;
        const Vec2 b = y.col(i) - cy;
        dot += a.dot(b);
        cross += b.x() * a.y() - b.y() * a.x();
      }
      const Mat2 rot = rotation(std::atan2(cross, dot));
      return (rot * (y.colwise() - cy)).colwise() + cx;
    }
  }
  return y;
}

// Strength-preserving relabelings within each cluster, as permutations of
// all N vortices (image[j] = new index of vortex j). Clusters above seven
// vortices contribute their strength-preserving cyclic shifts only.
std::vector<std::vector<int>> relabelings(const SuperpositionSpec& spec) {
  std::vector<std::vector<int>> result{std::vector<int>(total_vortices(spec))};
  std::iota(result[0].begin(), result[0].end(), 0);
  const std::vector<int> offsets = cluster_offsets(spec);
  for (std::size_t k = 0; k < spec.clusters.size(); ++k) {
    const auto& s = spec.clusters[k].strengths;
    const int n = static_cast<int>(s.size());
    std::vector<std::vector<int>> local;
    auto preserves = [&](const std::vector<int>& p) {
      for (int j = 0; j < n; ++j) {
        if (s[p[j]] != s[j]) return false;
      }
      return true;
    };
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    if (n <= 7) {
      do {
        if (preserves(p)) local.push_back(p);
      } while (std::next_permutation(p.begin(), p.end()));
    } else {
      for (int shift = 0; shift < n; ++shift) {
        for (int j = 0; j < n; ++j) p[j] = (j + shift) % n;
        if (preserves(p)) local.push_back(p);
      }
    }
    std::vector<std::vector<int>> next;
    for (const auto& base : result) {
      for (const auto& q : local) {
        std::vector<int> combined = base;
        for (int j = 0; j < n; ++j) combined[offsets[k] + j] = offsets[k] + q[j];
        next.push_back(std::move(combined));
      }
    }
    result = std::move(next);
  }
  return result;
}

std::vector<Eigen::VectorXd> sample_orbit(const PeriodicOrbit& orbit, int n) {
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) samples.push_back(orbit.trajectory->at(orbit.tau * i / n));
  return samples;
}

// Rescaled state at any time, using periodicity over [0, tau).
Eigen::VectorXd orbit_state(const PeriodicOrbit& orbit, double t) {
  double s = std::fmod(t, orbit.tau);
  if (s < 0.0) s += orbit.tau;
  return orbit.trajectory->at(s);
}

}  // namespace

int SuperpositionSpec::nontrivial_count() const {
  return static_cast<int>(std::count_if(clusters.begin(), clusters.end(),
                                        [](const auto& c) { return !is_trivial(c); }));
}

void validate(const SuperpositionSpec& spec) {
  const auto& sp = spec.stationary;
  const int m = static_cast<int>(sp.strengths.size());
  if (!sp.domain) throw PreconditionError("superposition needs a domain");
  if (sp.positions.size() != 2 * m) {
    throw PreconditionError("anchors must have two coordinates per anchor strength");
  }
  if (spec.anchor_count() != m) {
    throw PreconditionError("need one cluster per anchor (" + std::to_string(m) + "), got " +
                            std::to_string(spec.anchor_count()));
  }
  for (int k = 0; k < m; ++k) {
    const auto& c = spec.clusters[k];
    const double sum = c.total_strength();
    if (std::abs(sum - sp.strengths[k]) > 1e-12) {
      throw PreconditionError("cluster " + std::to_string(k + 1) + " strengths sum to " +
                              number(sum) + " but the anchor strength is " +
                              number(sp.strengths[k]));
    }
    if (is_trivial(c)) continue;
    const double turns = std::abs(c.omega) * c.order();
    if (std::abs(turns - 1.0) > 1e-9) {
      throw PreconditionError("cluster " + std::to_string(k + 1) +
                              " is not normalized: |omega| ord(sigma) = " + number(turns) +
                              ", expected 1");
    }
    const CertificationReport report = certify(c);
    if (!report.sigma_nondegenerate) {
      throw PreconditionError("cluster " + std::to_string(k + 1) + " (" + c.catalog +
                              ") is not sigma-nondegenerate: " +
                              std::to_string(report.symmetric_count) +
                              " symmetric periodic solutions of the linearization");
    }
  }
  if (static_cast<int>(spec.phases.size()) != spec.nontrivial_count()) {
    throw PreconditionError("need one phase per nontrivial cluster (" +
                            std::to_string(spec.nontrivial_count()) + "), got " +
                            std::to_string(spec.phases.size()));
  }
  if (!(spec.r >= 0.0) || !std::isfinite(spec.r)) {
    throw PreconditionError("scale r must be finite and nonnegative");
  }
}

Permutation combined_sigma(const SuperpositionSpec& spec) {
  std::vector<int> image;
  int offset = 0;
  for (const auto& c : spec.clusters) {
    for (int j = 0; j < c.size(); ++j) {
      image.push_back(offset + (c.sigma.size() == c.size() ? c.sigma(j) : j));
    }
    offset += c.size();
  }
  return Permutation(std::move(image));
}

int symmetry_order(const SuperpositionSpec& spec) { return combined_sigma(spec).order(); }

double rescaled_period(const SuperpositionSpec& spec) {
  return 2.0 * kPi * symmetry_order(spec);
}

VortexSystem full_system(const SuperpositionSpec& spec) {
  std::vector<double> strengths;
  for (const auto& c : spec.clusters) {
    strengths.insert(strengths.end(), c.strengths.begin(), c.strengths.end());
  }
  return VortexSystem(std::move(strengths), cluster_sizes(spec), spec.stationary.domain);
}

RescaledSystem rescaled_system(const SuperpositionSpec& spec) {
  return rescaled_system(spec, spec.r);
}

RescaledSystem rescaled_system(const SuperpositionSpec& spec, double r) {
  return RescaledSystem(full_system(spec), spec.stationary.positions, r);
}

Eigen::VectorXd phase_torus_point(const SuperpositionSpec& spec,
                                  const std::vector<double>& phases, double t) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * total_vortices(spec));
  int offset = 0;
  std::size_t phase = 0;
  for (const auto& c : spec.clusters) {
    if (!is_trivial(c)) v.segment(2 * offset, 2 * c.size()) = c.at(t + phases.at(phase++));
    offset += c.size();
  }
  return v;
}

Eigen::VectorXd phase_torus_velocity(const SuperpositionSpec& spec,
                                     const std::vector<double>& phases, double t) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * total_vortices(spec));
  int offset = 0;
  std::size_t phase = 0;
  for (const auto& c : spec.clusters) {
    if (!is_trivial(c)) {
      v.segment(2 * offset, 2 * c.size()) = c.omega * apply_J(c.at(t + phases.at(phase++)));
    }
    offset += c.size();
  }
  return v;
}

double admissible_scale(const SuperpositionSpec& spec) {
  const auto& a = spec.stationary.positions;
  const Domain& domain = spec.domain();
  const int m = spec.anchor_count();
  std::vector<double> radius(m, 0.0);
  for (int k = 0; k < m; ++k) {
    const auto& c = spec.clusters[k];
    for (int j = 0; j < c.size(); ++j) {
      radius[k] = std::max(radius[k], c.z.segment<2>(2 * j).norm());
    }
  }
  double bound = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    const Vec2 ak = a.segment<2>(2 * k);
    if (radius[k] > 0.0) {
      bound = std::min(bound, (domain.boundary_distance(ak) - kBoundaryMargin) / radius[k]);
    }
    for (int q = k + 1; q < m; ++q) {
      const double reach = radius[k] + radius[q];
      if (reach > 0.0) {
        const double gap = (ak - Vec2(a.segment<2>(2 * q))).norm() - kCollisionTolerance;
        bound = std::min(bound, gap / reach);
      }
    }
  }
  return std::max(bound, 0.0);
}

Eigen::VectorXd build_initial_guess(const SuperpositionSpec& spec) {
  validate(spec);
  const Eigen::VectorXd u0 = phase_torus_point(spec, spec.phases, 0.0);
  const double r_max = admissible_scale(spec);
  if (spec.r >= r_max) {
    throw ScaleTooLargeError("scale r=" + number(spec.r) +
                                 " is not admissible; clusters fit only for r < " + number(r_max),
                             r_max);
  }
  if (spec.r > 0.0) {
    const RescaledSystem rs = rescaled_system(spec);
    try {
      rs.validate(u0);
    } catch (const GeometryError& e) {
      throw ScaleTooLargeError(std::string("initial superposition is not admissible: ") +
                                   e.what(),
                               r_max);
    }
  }
  return u0;
}

Eigen::VectorXd PeriodicOrbit::physical_state(const SuperpositionSpec& spec, double t) const {
  const Eigen::VectorXd u = orbit_state(*this, t / (r * r));
  return rescaled_system(spec, r).physical(u);
}

PeriodicOrbit shoot(const SuperpositionSpec& spec, const Eigen::VectorXd& u0_guess,
                    const ShootingOptions& options) {
  validate(spec);
  if (!(spec.r > 0.0)) throw PreconditionError("shooting needs r > 0");
  const double r_max = admissible_scale(spec);
  if (spec.r >= r_max) {
    throw ScaleTooLargeError("scale r=" + number(spec.r) +
                                 " is not admissible; clusters fit only for r < " + number(r_max),
                             r_max);
  }
  const Eigen::Index dim = 2 * total_vortices(spec);
  if (u0_guess.size() != dim) throw PreconditionError("guess has the wrong dimension");

  const RescaledSystem rs = rescaled_system(spec);
  const FlowModel model = flow_model(rs);
  const Permutation sigma = combined_sigma(spec);
  const Eigen::MatrixXd S = sigma.matrix();
  const IntegratorSettings& settings = options.integrator;
  const double step_time = 2.0 * kPi;

  auto residual_of = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    const Trajectory tr = integrate(model, u, 0.0, step_time, settings);
    return S * tr.final_state() - u;
  };

  PeriodicOrbit orbit;
  orbit.r = spec.r;
  Eigen::VectorXd u = u0_guess;
  auto [phi, D] = flow_with_jacobian(model, u, step_time, settings);
  Eigen::VectorXd R = S * phi - u;
  orbit.residual_history.push_back(R.norm());

  int iteration = 0;
  while (R.norm() > options.residual_tolerance) {
    if (iteration >= options.max_iterations) {
      throw ConvergenceError("shooting did not converge in " +
                             std::to_string(options.max_iterations) +
                             " iterations; residual " + number(R.norm()));
    }
    ++iteration;
    const Eigen::MatrixXd jac = S * D - Eigen::MatrixXd::Identity(dim, dim);
    int rank = 0;
    const Eigen::VectorXd step = truncated_svd_solve(jac, -R, options.truncation, &rank);
    if (rank == 0 || !step.allFinite()) {
      throw ConvergenceError("shooting Jacobian is effectively rank zero; guess too far");
    }
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, t *= 0.5) {
      const Eigen::VectorXd trial = u + t * step;
      Eigen::VectorXd R_trial;
      try {
        R_trial = residual_of(trial);
      } catch (const GeometryError&) {
        continue;
      }
      if (R_trial.norm() < R.norm()) {
        u = trial;
        R = R_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("shooting stalled at residual " + number(R.norm()));
    }
    orbit.residual_history.push_back(R.norm());
    if (R.norm() <= options.residual_tolerance) break;
    std::tie(phi, D) = flow_with_jacobian(model, u, step_time, settings);
    R = S * phi - u;
  }

  orbit.u0 = u;
  orbit.iterations = iteration;
  orbit.residual = R.norm();
  orbit.tau = rescaled_period(spec);
  orbit.period = orbit.tau * spec.r * spec.r;

  auto trajectory = std::make_shared<Trajectory>(integrate(model, u, 0.0, orbit.tau, settings));
  orbit.trajectory = trajectory;
  orbit.closure = (trajectory->final_state() - u).norm();
  orbit.energy_drift = trajectory->energy_drift();

  // sigma * u(t + 2 pi) against u(t) on the sample grid over [0, tau].
  const Trajectory extension =
      integrate(model, trajectory->final_state(), orbit.tau, orbit.tau + step_time, settings);
  const int ord = sigma.order();
  const int n = options.samples_per_2pi * ord;
  for (int i = 0; i <= n; ++i) {
    const double ti = orbit.tau * i / n;
    const double ts = ti + step_time;
    const Eigen::VectorXd later = ts <= orbit.tau ? trajectory->at(ts) : extension.at(ts);
    orbit.symmetry_defect =
        std::max(orbit.symmetry_defect, (sigma.act(later) - trajectory->at(ti)).norm());
  }

  // Windings of u^k_2 - u^k_1, counterclockwise positive.
  const std::vector<int> offsets = cluster_offsets(spec);
  for (std::size_t k = 0; k < spec.clusters.size(); ++k) {
    if (is_trivial(spec.clusters[k])) {
      orbit.winding.push_back(0);
      continue;
    }
    const int o = offsets[k];
    double angle = 0.0;
    Vec2 prev = Vec2::Zero();
    for (int i = 0; i <= n; ++i) {
      const Eigen::VectorXd s = trajectory->at(orbit.tau * i / n);
      const Vec2 d = s.segment<2>(2 * (o + 1)) - s.segment<2>(2 * o);
      if (i > 0) angle += std::atan2(prev.x() * d.y() - prev.y() * d.x(), prev.dot(d));
      prev = d;
    }
    orbit.winding.push_back(static_cast<int>(std::lround(angle / (2.0 * kPi))));
  }

  const VortexSystem physical = full_system(spec);
  const Eigen::VectorXd z0 = rs.physical(u);
  const Trajectory zt = integrate(physical, z0, 0.0, orbit.period, settings);
  orbit.physical_closure = (zt.final_state() - z0).norm();

  orbit.distance_to_M = distance_to_M(spec, orbit, options.samples_per_2pi);
  return orbit;
}

std::vector<PeriodicOrbit> continue_in_r(const SuperpositionSpec& spec,
                                         const std::vector<double>& r_list,
                                         const ShootingOptions& options) {
  if (r_list.empty()) throw PreconditionError("continuation needs at least one r");
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    if (!(r_list[i] > 0.0)) throw PreconditionError("continuation needs r > 0");
    if (i > 0 && !(r_list[i] < r_list[i - 1])) {
      throw PreconditionError("continuation needs strictly decreasing r");
    }
  }
  std::vector<PeriodicOrbit> orbits;
  SuperpositionSpec current = spec;
  Eigen::VectorXd guess;
  for (double r : r_list) {
    current.r = r;
    try {
      if (orbits.empty()) guess = build_initial_guess(current);
      orbits.push_back(shoot(current, guess, options));
    } catch (const Error&) {
      rethrow_with_scale(r);
    }
    guess = orbits.back().u0;
  }
  return orbits;
}

std::vector<Eigen::VectorXd> spectral_derivative(const std::vector<Eigen::VectorXd>& samples,
                                                 double period) {
  const int n = static_cast<int>(samples.size());
  std::vector<Eigen::VectorXd> out(n);
  if (n == 0) return out;
  const Eigen::Index dim = samples.front().size();
  for (auto& v : out) v = Eigen::VectorXd::Zero(dim);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> x(n);
  std::vector<std::complex<double>> spectrum;
  std::vector<std::complex<double>> back;
  const double base = 2.0 * kPi / period;
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (int i = 0; i < n; ++i) x[i] = samples[i][c];
    fft.fwd(spectrum, x);
    for (int k = 0; k < n; ++k) {
      int wave = k <= n / 2 ? k : k - n;
      if (n % 2 == 0 && k == n / 2) wave = 0;
      spectrum[k] *= std::complex<double>(0.0, base * wave);
    }
    fft.inv(back, spectrum);
    for (int i = 0; i < n; ++i) out[i][c] = back[i].real();
  }
  return out;
}

double distance_to_M(const SuperpositionSpec& spec, const std::vector<Eigen::VectorXd>& samples) {
  const int n = static_cast<int>(samples.size());
  if (n == 0) return 0.0;
  const double tau = rescaled_period(spec);
  const std::vector<Eigen::VectorXd> du = spectral_derivative(samples, tau);
  const std::vector<int> offsets = cluster_offsets(spec);

  double total = 0.0;
  for (std::size_t k = 0; k < spec.clusters.size(); ++k) {
    const auto& c = spec.clusters[k];
    const Eigen::Index o = 2 * offsets[k];
    const Eigen::Index len = 2 * c.size();
    if (is_trivial(c)) {
      for (int i = 0; i < n; ++i) {
        total += samples[i].segment(o, len).squaredNorm() + du[i].segment(o, len).squaredNorm();
      }
      continue;
    }
    // Sum of squares for phase theta, with its Gauss-Newton pieces.
    auto evaluate = [&](double theta, double* jtr, double* jtj) {
      double s = 0.0;
      double a = 0.0;
      double b = 0.0;
      for (int i = 0; i < n; ++i) {
        const double t = tau * i / n + theta;
        const Eigen::VectorXd z = c.at(t);
        const Eigen::VectorXd zd = c.omega * apply_J(z);
        const Eigen::VectorXd zdd = -c.omega * c.omega * z;
        const Eigen::VectorXd r1 = samples[i].segment(o, len) - z;
        const Eigen::VectorXd r2 = du[i].segment(o, len) - zd;
        s += r1.squaredNorm() + r2.squaredNorm();
        // d r / d theta = (-zd, -zdd)
        a += -zd.dot(r1) - zdd.dot(r2);
        b += zd.squaredNorm() + zdd.squaredNorm();
      }
      if (jtr) *jtr = a;
      if (jtj) *jtj = b;
      return s;
    };
    const double span = cluster_period(c);
    constexpr int kCoarse = 32;
    double best_theta = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int q = 0; q < kCoarse; ++q) {
      const double theta = span * q / kCoarse;
      const double s = evaluate(theta, nullptr, nullptr);
      if (s < best) {
        best = s;
        best_theta = theta;
      }
    }
    double theta = best_theta;
    for (int it = 0; it < 60; ++it) {
      double jtr = 0.0;
      double jtj = 0.0;
      const double s = evaluate(theta, &jtr, &jtj);
      if (jtj <= 0.0) break;
      const double step = -jtr / jtj;
      const double s_new = evaluate(theta + step, nullptr, nullptr);
      if (s_new > s) break;
      theta += step;
      best = s_new;
      if (std::abs(step) <= 1e-15 * span) break;
    }
    total += best;
  }
  return std::sqrt(tau / n * total);
}

double distance_to_M(const SuperpositionSpec& spec, const PeriodicOrbit& orbit,
                     int samples_per_2pi) {
  const int n = samples_per_2pi * symmetry_order(spec);
  return distance_to_M(spec, sample_orbit(orbit, n));
}

double orbit_distance(const SuperpositionSpec& spec, const PeriodicOrbit& a,
                      const PeriodicOrbit& b, int samples_per_2pi) {
  const int n = samples_per_2pi * symmetry_order(spec);
  const int vortices = total_vortices(spec);
  const Symmetry sym = spec.domain().symmetry();
  const RescaledSystem rs = rescaled_system(spec, a.r);
  const double r = a.r;

  // Physical configurations of n samples as one 2 x (n N) point cloud.
  auto cloud = [&](const PeriodicOrbit& orbit, double shift, const std::vector<int>* relabel) {
    Points p(2, static_cast<Eigen::Index>(n) * vortices);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd z = rs.physical(orbit_state(orbit, orbit.tau * i / n + shift));
      for (int j = 0; j < vortices; ++j) {
        const int target = relabel ? (*relabel)[j] : j;
        p.col(static_cast<Eigen::Index>(i) * vortices + target) = z.segment<2>(2 * j);
      }
    }
    return p;
  };
  // Largest per-sample configuration distance, in rescaled units.
  auto sup_distance = [&](const Points& x, const Points& y) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto block = x.middleCols(static_cast<Eigen::Index>(i) * vortices, vortices) -
                         y.middleCols(static_cast<Eigen::Index>(i) * vortices, vortices);
      worst = std::max(worst, block.norm() / r);
    }
    return worst;
  };

  const Points base_a = cloud(a, 0.0, nullptr);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& relabel : relabelings(spec)) {
    const Points pb = cloud(b, 0.0, &relabel);
    // Coarse search over grid shifts of a.
    int best_shift = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
      Points shifted(2, base_a.cols());
      for (int i = 0; i < n; ++i) {
        shifted.middleCols(static_cast<Eigen::Index>(i) * vortices, vortices) =
            base_a.middleCols(static_cast<Eigen::Index>((i + s) % n) * vortices, vortices);
      }
      const double cost = (shifted - align(shifted, pb, sym)).squaredNorm();
      if (cost < best_cost) {
        best_cost = cost;
        best_shift = s;
      }
    }
    const double dt = a.tau / n;
    auto cost_at = [&](double shift) {
      const Points pa = cloud(a, shift, nullptr);
      return (pa - align(pa, pb, sym)).squaredNorm();
    };
    const auto [shift, cost] = boost::math::tools::brent_find_minima(
        cost_at, best_shift * dt - dt, best_shift * dt + dt, 52);
    (void)cost;
    const Points pa = cloud(a, shift, nullptr);
    best = std::min(best, sup_distance(pa, align(pa, pb, sym)));
  }
  return best;
}

ScanResult scan_phases(const SuperpositionSpec& spec, int grid_size,
                       const ShootingOptions& options, double identification_tolerance) {
  validate(spec);
  if (grid_size < 1) throw PreconditionError("phase grid needs at least one point");
  const int l = spec.nontrivial_count();
  ScanResult result;

  // Phase grids of the first l - 1 nontrivial clusters.
  std::vector<double> spans;
  for (const auto& c : spec.clusters) {
    if (!is_trivial(c)) spans.push_back(cluster_period(c));
  }
  const int free_phases = std::max(l - 1, 0);
  long total = 1;
  for (int i = 0; i < free_phases; ++i) total *= grid_size;

  result.attempts.resize(total);
  std::vector<PeriodicOrbit> shots(total);
  for (long idx = 0; idx < total; ++idx) {
    std::vector<double> phases(l, 0.0);
    long rest = idx;
    for (int i = 0; i < free_phases; ++i) {
      phases[i] = spans[i] * static_cast<double>(rest % grid_size) / grid_size;
      rest /= grid_size;
    }
    result.attempts[idx].phases = phases;
  }

#pragma omp parallel for schedule(dynamic)
  for (long idx = 0; idx < total; ++idx) {
    ScanAttempt& attempt = result.attempts[idx];
    SuperpositionSpec local = spec;
    local.phases = attempt.phases;
    try {
      shots[idx] = shoot(local, build_initial_guess(local), options);
      attempt.converged = true;
    } catch (const Error& e) {
      attempt.failure = e.what();
    }
  }

  for (long idx = 0; idx < total; ++idx) {
    ScanAttempt& attempt = result.attempts[idx];
    if (!attempt.converged) continue;
    for (std::size_t c = 0; c < result.orbits.size(); ++c) {
      if (orbit_distance(spec, result.orbits[c], shots[idx], options.samples_per_2pi) <=
          identification_tolerance) {
        attempt.orbit_class = static_cast<int>(c);
        break;
      }
    }
    if (attempt.orbit_class < 0) {
      attempt.orbit_class = static_cast<int>(result.orbits.size());
      result.orbits.push_back(shots[idx]);
    }
  }
  result.conclusive = static_cast<int>(result.orbits.size()) >= std::max(l, 1);
  return result;
}

}  // namespace vortexlab
