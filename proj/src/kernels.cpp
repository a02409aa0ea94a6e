#include "vortexlab/kernels.hpp"

#include <cmath>
#include <vector>

namespace vortexlab {
namespace {

constexpr double kLogCoefficient = -1.0 / (2.0 * kPi);

inline Vec2 at(const Eigen::Ref<const Eigen::VectorXd>& z, int p) {
  return {z[2 * p], z[2 * p + 1]};
}

// Second derivative of -1/(2 pi) log|d| with respect to d.
inline Mat2 log_hessian(const Vec2& d) {
  const double r2 = d.squaredNorm();
  return kLogCoefficient * (Mat2::Identity() / r2 - 2.0 * d * d.transpose() / (r2 * r2));
}

inline bool log_active(const Interaction& in, int p, int q) {
  return in.cluster[p] == in.cluster[q] ? in.terms.intra_log : in.terms.cross_log;
}

Evaluation allocate(int n, Order order) {
  Evaluation e;
  if (order >= Order::Gradient) e.gradient = Eigen::VectorXd::Zero(2 * n);
  if (order >= Order::Hessian) e.hessian = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  return e;
}

}  // namespace

namespace serial {

Evaluation assemble(const Interaction& in, const Eigen::Ref<const Eigen::VectorXd>& z,
                    Order order) {
  const int n = static_cast<int>(in.strengths.size());
  Evaluation e = allocate(n, order);
  const bool grad = order >= Order::Gradient;
  const bool hess = order >= Order::Hessian;
  const Domain& domain = *in.domain;

  for (int p = 0; p < n; ++p) {
    const Vec2 zp = at(z, p);
    for (int q = p + 1; q < n; ++q) {
      const Vec2 zq = at(z, q);
      // Each unordered pair appears twice in the ordered double sum.
      const double w = 2.0 * in.strengths[p] * in.strengths[q];
      if (log_active(in, p, q)) {
        const Vec2 d = zp - zq;
        e.value += w * kLogCoefficient * std::log(d.norm());
        if (grad) {
          const Vec2 f = w * kLogCoefficient * d / d.squaredNorm();
          e.gradient.segment<2>(2 * p) += f;
          e.gradient.segment<2>(2 * q) -= f;
        }
        if (hess) {
          const Mat2 k = w * log_hessian(d);
          e.hessian.block<2, 2>(2 * p, 2 * p) += k;
          e.hessian.block<2, 2>(2 * q, 2 * q) += k;
          e.hessian.block<2, 2>(2 * p, 2 * q) -= k;
          e.hessian.block<2, 2>(2 * q, 2 * p) -= k;
        }
      }
      if (in.terms.regular) {
        e.value -= w * domain.g(zp, zq);
        if (grad) {
          auto [gp, gq] = domain.grad_g(zp, zq);
          e.gradient.segment<2>(2 * p) -= w * gp;
          e.gradient.segment<2>(2 * q) -= w * gq;
        }
        if (hess) {
          const Mat4 k = w * domain.hess_g(zp, zq);
          e.hessian.block<2, 2>(2 * p, 2 * p) -= k.topLeftCorner<2, 2>();
          e.hessian.block<2, 2>(2 * p, 2 * q) -= k.topRightCorner<2, 2>();
          e.hessian.block<2, 2>(2 * q, 2 * p) -= k.bottomLeftCorner<2, 2>();
          e.hessian.block<2, 2>(2 * q, 2 * q) -= k.bottomRightCorner<2, 2>();
        }
      }
    }
    if (in.terms.regular) {
      // Robin term -G_p^2 h(z_p) with h(x) = g(x, x).
      const double w = in.strengths[p] * in.strengths[p];
      e.value -= w * domain.g(zp, zp);
      if (grad) {
        auto [g1, g2] = domain.grad_g(zp, zp);
        e.gradient.segment<2>(2 * p) -= w * (g1 + g2);
      }
      if (hess) {
        const Mat4 k = domain.hess_g(zp, zp);
        e.hessian.block<2, 2>(2 * p, 2 * p) -=
            w * (k.topLeftCorner<2, 2>() + k.topRightCorner<2, 2>() +
                 k.bottomLeftCorner<2, 2>() + k.bottomRightCorner<2, 2>());
      }
    }
  }
  return e;
}

}  // namespace serial

namespace parallel {

Evaluation assemble(const Interaction& in, const Eigen::Ref<const Eigen::VectorXd>& z,
                    Order order) {
  const int n = static_cast<int>(in.strengths.size());
  Evaluation e = allocate(n, order);
  const bool grad = order >= Order::Gradient;
  const bool hess = order >= Order::Hessian;
  const Domain& domain = *in.domain;
  // Per-row partial values, summed in a fixed order afterwards so the result
  // does not depend on the thread count.
  std::vector<double> row_value(n, 0.0);

#pragma omp parallel for schedule(static)
  for (int p = 0; p < n; ++p) {
    const Vec2 zp = at(z, p);
    const double gp = in.strengths[p];
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
    Mat2 diagonal = Mat2::Zero();
    for (int q = 0; q < n; ++q) {
      const Vec2 zq = at(z, q);
      if (q == p) {
        if (!in.terms.regular) continue;
        const double w = gp * gp;
        value -= w * domain.g(zp, zp);
        if (grad) {
          auto [g1, g2] = domain.grad_g(zp, zp);
          gradient -= w * (g1 + g2);
        }
        if (hess) {
          const Mat4 k = domain.hess_g(zp, zp);
          diagonal -= w * (k.topLeftCorner<2, 2>() + k.topRightCorner<2, 2>() +
                           k.bottomLeftCorner<2, 2>() + k.bottomRightCorner<2, 2>());
        }
        continue;
      }
      // Ordered pair (p, q); its mirror (q, p) is handled by row q. The
      // gradient and Hessian rows receive both halves because the mirror
      // term depends on z_p as well.
      const double w = gp * in.strengths[q];
      Mat2 offdiag = Mat2::Zero();
      if (log_active(in, p, q)) {
        const Vec2 d = zp - zq;
        value += w * kLogCoefficient * std::log(d.norm());
        if (grad) gradient += 2.0 * w * kLogCoefficient * d / d.squaredNorm();
        if (hess) {
          const Mat2 k = 2.0 * w * log_hessian(d);
          diagonal += k;
          offdiag -= k;
        }
      }
      if (in.terms.regular) {
        value -= w * domain.g(zp, zq);
        if (grad) gradient -= 2.0 * w * domain.grad_g(zp, zq).first;
        if (hess) {
          const Mat4 k = domain.hess_g(zp, zq);
          diagonal -= 2.0 * w * k.topLeftCorner<2, 2>();
          offdiag -= 2.0 * w * k.topRightCorner<2, 2>();
        }
      }
      if (hess) e.hessian.block<2, 2>(2 * p, 2 * q) = offdiag;
    }
    row_value[p] = value;
    if (grad) e.gradient.segment<2>(2 * p) = gradient;
    if (hess) e.hessian.block<2, 2>(2 * p, 2 * p) = diagonal;
  }

  for (double v : row_value) e.value += v;
  return e;
}

}  // namespace parallel

Evaluation assemble(const Interaction& in, const Eigen::Ref<const Eigen::VectorXd>& z,
                    Order order) {
  if (static_cast<int>(in.strengths.size()) >= kParallelThreshold) {
    return parallel::assemble(in, z, order);
  }
  return serial::assemble(in, z, order);
}

}  // namespace vortexlab
