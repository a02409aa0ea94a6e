#pragma once

// Shared test helpers: random admissible states and finite differences.

#include "vortexlab/greens.hpp"
#include "vortexlab/system.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>

namespace support {

using vortexlab::Vec2;

/// n points with pairwise distance >= min_gap, inside the disc of radius
/// `radius` (also used for the plane).
inline Eigen::VectorXd random_state(std::mt19937_64& rng, int n, double radius = 0.85,
                                    double min_gap = 0.08) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd z(2 * n);
  for (int p = 0; p < n; ++p) {
    for (;;) {
      const Vec2 x(radius * unit(rng), radius * unit(rng));
      if (x.norm() > radius) continue;
      bool ok = true;
      for (int q = 0; q < p; ++q) ok = ok && (x - Vec2(z.segment<2>(2 * q))).norm() >= min_gap;
      if (!ok) continue;
      z.segment<2>(2 * p) = x;
      break;
    }
  }
  return z;
}

inline std::vector<double> random_strengths(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> mag(0.3, 2.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> s;
  for (int i = 0; i < n; ++i) s.push_back(sign(rng) ? mag(rng) : -mag(rng));
  return s;
}

/// Central differences of a scalar function, step h.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

/// Central differences of a vector function (columns = partials).
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::MatrixXd j;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    const Eigen::VectorXd d = (f(a) - f(b)) / (2 * h);
    if (i == 0) j.resize(d.size(), x.size());
    j.col(i) = d;
  }
  return j;
}

/// |a - b| / max(|b|, floor).
inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1.0) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace support
