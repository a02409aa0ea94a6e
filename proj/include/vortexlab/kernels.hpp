#pragma once

// Pairwise interaction assembly: value, gradient and Hessian of
//
//   E(z) = sum_{p != q} G_p G_q [ L_pq(z) - g(z_p, z_q) ] - sum_p G_p^2 h(z_p)
//
// where L_pq = -1/(2 pi) log|z_p - z_q| is included for intra-cluster pairs,
// cross-cluster pairs, both, or neither, and the g/h part can be switched
// off. Every Hamiltonian in the library (H, the m-vortex H, H_0, F) is one
// selection of terms.
//
// Two implementations are kept. `serial` walks unordered pairs once and
// scatters to both endpoints; `parallel` distributes rows over OpenMP
// threads and recomputes each pair from both sides so threads never write
// to the same row. The serial version is the test reference.

#include "vortexlab/greens.hpp"

#include <Eigen/Dense>

#include <span>

namespace vortexlab {

struct InteractionTerms {
  bool intra_log = true;
  bool cross_log = true;
  bool regular = true;  // the -g and -h terms
};

enum class Order { Value = 0, Gradient = 1, Hessian = 2 };

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;  // empty when order < Gradient
  Eigen::MatrixXd hessian;   // empty when order < Hessian
};

struct Interaction {
  std::span<const double> strengths;
  std::span<const int> cluster;  // cluster index per vortex
  const Domain* domain = nullptr;
  InteractionTerms terms;
};

namespace serial {
Evaluation assemble(const Interaction& in, const Eigen::Ref<const Eigen::VectorXd>& z,
                    Order order);
}

namespace parallel {
Evaluation assemble(const Interaction& in, const Eigen::Ref<const Eigen::VectorXd>& z,
                    Order order);
}

/// Vortex count from which `assemble` switches to the OpenMP kernel.
inline constexpr int kParallelThreshold = 48;

Evaluation assemble(const Interaction& in, const Eigen::Ref<const Eigen::VectorXd>& z,
                    Order order);

}  // namespace vortexlab
