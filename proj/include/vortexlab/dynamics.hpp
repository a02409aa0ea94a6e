#pragma once

#include "vortexlab/ode.hpp"
#include "vortexlab/system.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace vortexlab {

struct IntegratorSettings {
  double rtol = 1e-12;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double collision_tolerance = kCollisionTolerance;
  double boundary_margin = kBoundaryMargin;
  long max_steps = 2'000'000;
  /// Pull each accepted state back to the initial energy level.
  bool energy_projection = false;
};

/// A Hamiltonian vector field together with what the integrator needs to
/// monitor it. Built from either the physical or the rescaled system.
struct FlowModel {
  int vortices = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> field;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  std::function<double(const Eigen::VectorXd&)> energy;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> energy_gradient;
  /// Throws CollisionError / DomainError for invalid states.
  std::function<void(const Eigen::VectorXd&, const IntegratorSettings&)> guard;
};

// The model refers to `system`, which must outlive it.
FlowModel flow_model(const VortexSystem& system);
FlowModel flow_model(const RescaledSystem& system);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> energy;
  double min_separation = std::numeric_limits<double>::infinity();
  std::vector<DenseSegment> segments;

  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }
  const Eigen::VectorXd& final_state() const { return states.back(); }
  /// Dense-output evaluation anywhere in [t_begin, t_end].
  Eigen::VectorXd at(double t) const;
  /// max |H(t) - H(0)| / max(1, |H(0)|) over accepted steps.
  double energy_drift() const;
};

Trajectory integrate(const FlowModel& model, const Eigen::VectorXd& z0, double t0, double t1,
                     const IntegratorSettings& settings = {});
Trajectory integrate(const VortexSystem& system, const Eigen::VectorXd& z0, double t0, double t1,
                     const IntegratorSettings& settings = {});
Trajectory integrate(const RescaledSystem& system, const Eigen::VectorXd& u0, double t0,
                     double t1, const IntegratorSettings& settings = {});

/// Time-t_end flow and its derivative, from the variational equation
/// W' = Df(z(t)) W, W(0) = I, integrated alongside the state.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> flow_with_jacobian(
    const FlowModel& model, const Eigen::VectorXd& z0, double t_end,
    const IntegratorSettings& settings = {});

/// Integrates u under H_r on [0, t_span / r^2] and z under H from
/// r u0 + hat(alpha) on [0, t_span]; returns the largest deviation
/// |z(t) - (r u(t / r^2) + hat(alpha))| on a shared uniform grid.
double check_rescaling_equivalence(const VortexSystem& system, const Eigen::VectorXd& anchor,
                                   double r, const Eigen::VectorXd& u0, double t_span,
                                   const IntegratorSettings& settings = {}, int samples = 256);

/// CSV with header `t,x1,y1,...,xN,yN,H`, one row per sample time, numbers in
/// shortest round-trip form.
void write_csv(std::ostream& out, const std::vector<double>& times,
               const std::vector<Eigen::VectorXd>& states, const std::vector<double>& energy);
void write_csv(std::ostream& out, const Trajectory& trajectory);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace vortexlab
