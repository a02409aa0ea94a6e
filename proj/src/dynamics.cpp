#include "vortexlab/dynamics.hpp"

#include "vortexlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace vortexlab {
namespace {

void check_positions(const Eigen::VectorXd& z, const Domain& domain,
                     const IntegratorSettings& s) {
  const int n = static_cast<int>(z.size() / 2);
  for (int p = 0; p < n; ++p) {
    if (!domain.contains(Vec2(z[2 * p], z[2 * p + 1]), s.boundary_margin)) {
      throw DomainError("vortex " + std::to_string(p + 1) + " reached the boundary", p);
    }
  }
  if (n > 1) {
    const Separation sep = min_separation(z);
    if (sep.distance < s.collision_tolerance) {
      throw CollisionError("vortices " + std::to_string(sep.first + 1) + " and " +
                               std::to_string(sep.second + 1) + " collided",
                           sep.first, sep.second);
    }
  }
}

// Rethrows a geometry error stamped with the event time.
[[noreturn]] void rethrow_at(double t) {
  try {
    throw;
  } catch (const CollisionError& e) {
    throw CollisionError(e.what(), e.first(), e.second(), t);
  } catch (const DomainError& e) {
    throw DomainError(e.what(), e.vortex(), t);
  }
}

}  // namespace

FlowModel flow_model(const VortexSystem& system) {
  FlowModel m;
  m.vortices = system.size();
  m.field = [&system](const Eigen::VectorXd& z) { return vector_field(system, z); };
  m.jacobian = [&system](const Eigen::VectorXd& z) { return field_jacobian(system, z); };
  m.energy = [&system](const Eigen::VectorXd& z) { return hamiltonian(system, z); };
  m.energy_gradient = [&system](const Eigen::VectorXd& z) { return grad_hamiltonian(system, z); };
  m.guard = [&system](const Eigen::VectorXd& z, const IntegratorSettings& s) {
    check_positions(z, system.domain(), s);
  };
  return m;
}

FlowModel flow_model(const RescaledSystem& rs) {
  FlowModel m;
  m.vortices = rs.base().size();
  m.field = [&rs](const Eigen::VectorXd& u) { return rescaled_vector_field(rs, u); };
  m.jacobian = [&rs](const Eigen::VectorXd& u) { return rescaled_field_jacobian(rs, u); };
  m.energy = [&rs](const Eigen::VectorXd& u) { return rescaled_hamiltonian(rs, u); };
  m.energy_gradient = [&rs](const Eigen::VectorXd& u) {
    return rs.eval(u, Order::Gradient).gradient;
  };
  m.guard = [&rs](const Eigen::VectorXd& u, const IntegratorSettings& s) {
    rs.validate(u, s.collision_tolerance, s.boundary_margin);
  };
  return m;
}

Eigen::VectorXd Trajectory::at(double t) const {
  if (segments.empty()) return states.front();
  const bool forward = segments.front().h > 0.0;
  // Segments are ordered along the direction of integration.
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [forward](double value, const DenseSegment& s) {
                               return forward ? value < s.t0 : value > s.t0;
                             });
  if (it != segments.begin()) --it;
  return it->eval(t);
}

double Trajectory::energy_drift() const {
  if (energy.empty()) return 0.0;
  const double h0 = energy.front();
  double drift = 0.0;
  for (double h : energy) drift = std::max(drift, std::abs(h - h0));
  return drift / std::max(1.0, std::abs(h0));
}

Trajectory integrate(const FlowModel& model, const Eigen::VectorXd& z0, double t0, double t1,
                     const IntegratorSettings& settings) {
  model.guard(z0, settings);
  Trajectory traj;
  traj.energy.push_back(model.energy(z0));
  traj.min_separation = min_separation(z0).distance;

  OdeOptions o;
  o.rtol = settings.rtol;
  o.atol = settings.atol;
  o.max_step = settings.max_step;
  o.max_steps = settings.max_steps;

  const double h0 = traj.energy.front();
  StepProjection projection;
  if (settings.energy_projection) {
    projection = [&model, h0](Eigen::VectorXd& z) {
      const Eigen::VectorXd g = model.energy_gradient(z);
      const double gg = g.squaredNorm();
      if (gg > 0.0) z -= (model.energy(z) - h0) / gg * g;
    };
  }
  double current = t0;
  auto observer = [&](double t, const Eigen::VectorXd& z) {
    current = t;
    model.guard(z, settings);
    traj.energy.push_back(model.energy(z));
    traj.min_separation = std::min(traj.min_separation, min_separation(z).distance);
  };
  OdeResult r;
  try {
    r = solve_dopri5([&model](double, const Eigen::VectorXd& z) { return model.field(z); }, z0, t0,
                     t1, o, observer, projection);
  } catch (const GeometryError& e) {
    if (std::isnan(e.time())) rethrow_at(current);
    throw;
  }
  traj.times = std::move(r.times);
  traj.states = std::move(r.states);
  traj.segments = std::move(r.segments);
  return traj;
}

Trajectory integrate(const VortexSystem& system, const Eigen::VectorXd& z0, double t0, double t1,
                     const IntegratorSettings& settings) {
  return integrate(flow_model(system), z0, t0, t1, settings);
}

Trajectory integrate(const RescaledSystem& system, const Eigen::VectorXd& u0, double t0,
                     double t1, const IntegratorSettings& settings) {
  return integrate(flow_model(system), u0, t0, t1, settings);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> flow_with_jacobian(
    const FlowModel& model, const Eigen::VectorXd& z0, double t_end,
    const IntegratorSettings& settings) {
  const Eigen::Index n = z0.size();
  if (t_end == 0.0) return {z0, Eigen::MatrixXd::Identity(n, n)};
  model.guard(z0, settings);

  Eigen::VectorXd y(n + n * n);
  y.head(n) = z0;
  Eigen::Map<Eigen::MatrixXd>(y.data() + n, n, n) = Eigen::MatrixXd::Identity(n, n);

  auto rhs = [&model, n](double, const Eigen::VectorXd& s) {
    Eigen::VectorXd d(s.size());
    const Eigen::VectorXd z = s.head(n);
    d.head(n) = model.field(z);
    Eigen::Map<Eigen::MatrixXd>(d.data() + n, n, n) =
        model.jacobian(z) * Eigen::Map<const Eigen::MatrixXd>(s.data() + n, n, n);
    return d;
  };
  OdeOptions o;
  o.rtol = settings.rtol;
  o.atol = settings.atol;
  o.max_step = settings.max_step;
  o.max_steps = settings.max_steps;
  o.record = false;
  double current = 0.0;
  auto observer = [&](double t, const Eigen::VectorXd& s) {
    current = t;
    model.guard(s.head(n), settings);
  };
  OdeResult r;
  try {
    r = solve_dopri5(rhs, y, 0.0, t_end, o, observer);
  } catch (const GeometryError& e) {
    if (std::isnan(e.time())) rethrow_at(current);
    throw;
  }
  return {r.y.head(n), Eigen::Map<const Eigen::MatrixXd>(r.y.data() + n, n, n)};
}

double check_rescaling_equivalence(const VortexSystem& system, const Eigen::VectorXd& anchor,
                                   double r, const Eigen::VectorXd& u0, double t_span,
                                   const IntegratorSettings& settings, int samples) {
  if (!(r > 0.0)) throw PreconditionError("rescaling check needs r > 0");
  const RescaledSystem rs(system, anchor, r);
  const Trajectory u = integrate(rs, u0, 0.0, t_span / (r * r), settings);
  const Trajectory z = integrate(system, rs.physical(u0), 0.0, t_span, settings);
  double deviation = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = t_span * static_cast<double>(i) / samples;
    const Eigen::VectorXd mapped = rs.physical(u.at(t / (r * r)));
    deviation = std::max(deviation, (z.at(t) - mapped).norm());
  }
  return deviation;
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

void write_csv(std::ostream& out, const std::vector<double>& times,
               const std::vector<Eigen::VectorXd>& states, const std::vector<double>& energy) {
  const Eigen::Index n = states.empty() ? 0 : states.front().size() / 2;
  out << "t";
  for (Eigen::Index p = 1; p <= n; ++p) out << ",x" << p << ",y" << p;
  out << ",H\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << format_double(times[i]);
    for (Eigen::Index k = 0; k < states[i].size(); ++k) out << ',' << format_double(states[i][k]);
    out << ',' << format_double(i < energy.size() ? energy[i] : std::nan("")) << '\n';
  }
}

void write_csv(std::ostream& out, const Trajectory& trajectory) {
  write_csv(out, trajectory.times, trajectory.states, trajectory.energy);
}

}  // namespace vortexlab
