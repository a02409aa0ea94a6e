#pragma once

// Dormand-Prince 5(4) with PI step-size control and the standard
// fourth-order continuous extension. Generic over the right-hand side; the
// vortex-specific wrappers live in dynamics.hpp.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <limits>
#include <vector>

namespace vortexlab {

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 picks one automatically
  long max_steps = 2'000'000;
  bool record = true;         // keep accepted states and dense segments
};

/// Interpolant over one accepted step [t0, t0 + h].
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Eigen::VectorXd, 5> coefficients;

  Eigen::VectorXd eval(double t) const;
};

struct OdeResult {
  double t = 0.0;
  Eigen::VectorXd y;
  std::vector<double> times;            // accepted step endpoints, incl. t0
  std::vector<Eigen::VectorXd> states;
  std::vector<DenseSegment> segments;
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
/// Called after every accepted step; may throw to stop the integration.
using StepObserver = std::function<void(double, const Eigen::VectorXd&)>;
/// Optional in-place correction applied to each accepted state.
using StepProjection = std::function<void(Eigen::VectorXd&)>;

/// Integrates y' = f(t, y) from t0 to t1 (t1 < t0 integrates backwards).
///
/// A GeometryError thrown by `rhs` inside a trial step rejects that step and
/// retries with a quarter of the step size; if the step size underflows, the
/// last such error is rethrown with its time. Errors thrown by `observer` are
/// propagated unchanged.
OdeResult solve_dopri5(const OdeRhs& rhs, Eigen::VectorXd y0, double t0, double t1,
                       const OdeOptions& options, const StepObserver& observer = {},
                       const StepProjection& projection = {});

}  // namespace vortexlab
