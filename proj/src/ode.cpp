#include "vortexlab/ode.hpp"

#include "vortexlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace vortexlab {
namespace {

// Dormand & Prince (1980) coefficients.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants (Hairer, Norsett & Wanner).
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2;   // largest shrink is 1/5
constexpr double kFacMax = 10.0;  // largest growth

struct StageFailure {
  enum Kind { Collision, Boundary } kind;
  std::string message;
  int first;
  int second;

  [[noreturn]] void rethrow(double t) const {
    if (kind == Collision) throw CollisionError(message, first, second, t);
    throw DomainError(message, first, t);
  }
};

double scaled_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                   const OdeOptions& o) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sk = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    sum += (v[i] / sk) * (v[i] / sk);
  }
  return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
}

double initial_step(const OdeRhs& f, double t0, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, double direction, const OdeOptions& o) {
  const double d0 = scaled_norm(y0, y0, y0, o);
  const double d1n = scaled_norm(f0, y0, y0, o);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, o.max_step);
  const Eigen::VectorXd y1 = y0 + direction * h0 * f0;
  const Eigen::VectorXd f1 = f(t0 + direction * h0, y1);
  const double d2 = scaled_norm(f1 - f0, y0, y0, o) / h0;
  const double dmax = std::max(d1n, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, o.max_step});
}

}  // namespace

Eigen::VectorXd DenseSegment::eval(double t) const {
  const double s = h == 0.0 ? 0.0 : (t - t0) / h;
  const double s1 = 1.0 - s;
  return coefficients[0] +
         s * (coefficients[1] +
              s1 * (coefficients[2] + s * (coefficients[3] + s1 * coefficients[4])));
}

OdeResult solve_dopri5(const OdeRhs& f, Eigen::VectorXd y, double t0, double t1,
                       const OdeOptions& o, const StepObserver& observer,
                       const StepProjection& projection) {
  OdeResult out;
  out.t = t0;
  if (o.record) {
    out.times.push_back(t0);
    out.states.push_back(y);
  }
  if (t1 == t0) {
    out.y = std::move(y);
    return out;
  }
  const double direction = t1 > t0 ? 1.0 : -1.0;

  Eigen::VectorXd k1 = f(t0, y);
  ++out.evaluations;
  double h = o.initial_step > 0.0 ? o.initial_step : initial_step(f, t0, y, k1, direction, o);
  out.evaluations += o.initial_step > 0.0 ? 0 : 1;
  h = std::min(h, o.max_step);

  double t = t0;
  double facold = 1e-4;
  bool last_rejected = false;
  // Last geometry failure inside a trial step, rethrown on underflow.
  std::optional<StageFailure> last_geometry;
  Eigen::VectorXd k2, k3, k4, k5, k6, k7, ynew, tmp;

  while (direction * (t1 - t) > 0.0) {
    if (out.accepted + out.rejected >= o.max_steps) {
      throw StepSizeUnderflowError("maximum number of steps exceeded", t);
    }
    const double remaining = std::abs(t1 - t);
    // Land exactly on t1, avoiding a sliver final step.
    if (h >= remaining || 1.1 * h >= remaining) h = remaining;
    if (h < 1e-14 * std::max(1.0, std::abs(t)) || !std::isfinite(h)) {
      if (last_geometry) last_geometry->rethrow(t);
      throw StepSizeUnderflowError("step size underflow at t = " + std::to_string(t), t);
    }
    const double hs = direction * h;

    try {
      tmp = y + hs * a21 * k1;
      k2 = f(t + c2 * hs, tmp);
      tmp = y + hs * (a31 * k1 + a32 * k2);
      k3 = f(t + c3 * hs, tmp);
      tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      k4 = f(t + c4 * hs, tmp);
      tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      k5 = f(t + c5 * hs, tmp);
      tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      k6 = f(t + hs, tmp);
      ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      k7 = f(t + hs, ynew);
      out.evaluations += 6;
    } catch (const CollisionError& e) {
      last_geometry = StageFailure{StageFailure::Collision, e.what(), e.first(), e.second()};
      ++out.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    } catch (const DomainError& e) {
      last_geometry = StageFailure{StageFailure::Boundary, e.what(), e.vortex(), -1};
      ++out.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    const Eigen::VectorXd err =
        hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double errn = scaled_norm(err, y, ynew, o);
    if (!std::isfinite(errn)) {
      ++out.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }
    const double fac11 = std::pow(std::max(errn, 1e-300), kExpo);
    double fac = fac11 / std::pow(facold, kBeta);
    fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
    double hnew = h / fac;

    if (errn <= 1.0) {
      facold = std::max(errn, 1e-4);
      last_geometry.reset();
      if (o.record) {
        DenseSegment seg;
        seg.t0 = t;
        seg.h = hs;
        const Eigen::VectorXd ydiff = ynew - y;
        const Eigen::VectorXd bspl = hs * k1 - ydiff;
        seg.coefficients[0] = y;
        seg.coefficients[1] = ydiff;
        seg.coefficients[2] = bspl;
        seg.coefficients[3] = ydiff - hs * k7 - bspl;
        seg.coefficients[4] = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        out.segments.push_back(std::move(seg));
      }
      t = (h == remaining) ? t1 : t + hs;
      y = ynew;
      k1 = k7;
      if (projection) {
        projection(y);
        k1 = f(t, y);
        ++out.evaluations;
      }
      ++out.accepted;
      if (o.record) {
        out.times.push_back(t);
        out.states.push_back(y);
      }
      if (observer) observer(t, y);
      hnew = std::min(hnew, o.max_step);
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
      h = hnew;
    } else {
      hnew = h / std::min(1.0 / kFacMin, fac11 / kSafety);
      ++out.rejected;
      last_rejected = true;
      h = hnew;
    }
  }
  out.t = t;
  out.y = std::move(y);
  return out;
}

}  // namespace vortexlab
