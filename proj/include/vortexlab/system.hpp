#pragma once

#include "vortexlab/greens.hpp"
#include "vortexlab/kernels.hpp"

#include <Eigen/Dense>

#include <vector>

namespace vortexlab {

/// Minimum pairwise distance below which evaluations refuse to proceed.
inline constexpr double kCollisionTolerance = 1e-8;

/// N point vortices grouped into clusters of sizes (N_1, ..., N_m).
///
/// Coordinates are flattened as (z^1_1, ..., z^1_{N_1}, ..., z^m_{N_m}),
/// two reals per vortex, so the weight matrix M and the symplectic matrix
/// J_N are block diagonal.
class VortexSystem {
 public:
  /// One cluster per vortex.
  VortexSystem(std::vector<double> strengths, DomainPtr domain);
  VortexSystem(std::vector<double> strengths, std::vector<int> cluster_sizes,
               DomainPtr domain);

  int size() const { return static_cast<int>(strengths_.size()); }
  int cluster_count() const { return static_cast<int>(cluster_sizes_.size()); }
  const std::vector<double>& strengths() const { return strengths_; }
  const std::vector<int>& cluster_sizes() const { return cluster_sizes_; }
  const std::vector<int>& cluster_index() const { return cluster_index_; }
  /// First flattened vortex index of cluster k.
  int cluster_offset(int k) const { return cluster_offset_[k]; }
  /// Gamma^k = sum_j Gamma^k_j.
  std::vector<double> cluster_sums() const;
  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }

  /// Diagonal of M (each strength repeated twice).
  Eigen::VectorXd weights() const;

  Interaction interaction(InteractionTerms terms) const;

  /// Throws DomainError or CollisionError when z is not in F_N(Omega).
  void validate(const Eigen::Ref<const Eigen::VectorXd>& z,
                double collision_tolerance = kCollisionTolerance,
                double boundary_margin = kBoundaryMargin) const;

 private:
  std::vector<double> strengths_;
  std::vector<int> cluster_sizes_;
  std::vector<int> cluster_index_;
  std::vector<int> cluster_offset_;
  DomainPtr domain_;
};

/// Smallest pairwise distance and the pair attaining it.
struct Separation {
  double distance;
  int first;
  int second;
};
Separation min_separation(const Eigen::Ref<const Eigen::VectorXd>& z);

/// Blockwise rotation by -pi/2: (x, y) -> (y, -x).
Eigen::VectorXd apply_J(const Eigen::Ref<const Eigen::VectorXd>& v);
/// J_N as a dense matrix.
Eigen::MatrixXd symplectic_matrix(int n);
/// exp(theta J_N) applied to v; rotates every point clockwise by theta.
Eigen::VectorXd rotate_by_J(double theta, const Eigen::Ref<const Eigen::VectorXd>& v);
/// Rotates every point counterclockwise by theta about the origin.
Eigen::VectorXd rotate_points(double theta, const Eigen::Ref<const Eigen::VectorXd>& v);

double hamiltonian(const VortexSystem& system, const Eigen::Ref<const Eigen::VectorXd>& z);
Eigen::VectorXd grad_hamiltonian(const VortexSystem& system,
                                 const Eigen::Ref<const Eigen::VectorXd>& z);
Eigen::MatrixXd hess_hamiltonian(const VortexSystem& system,
                                 const Eigen::Ref<const Eigen::VectorXd>& z);

/// M^{-1} J_N grad H(z).
Eigen::VectorXd vector_field(const VortexSystem& system,
                             const Eigen::Ref<const Eigen::VectorXd>& z);
/// Jacobian of the vector field, M^{-1} J_N hess H(z).
Eigen::MatrixXd field_jacobian(const VortexSystem& system,
                               const Eigen::Ref<const Eigen::VectorXd>& z);

/// The system seen from a stationary skeleton: z = r u + hat(alpha).
///
///   H_r(u) = H_0(u) + F(r u) - calH(alpha),
///
/// where H_0 is the sum of the whole-plane cluster Hamiltonians and F
/// collects the cross-cluster Green's terms and all regular terms, with
/// cluster k shifted by alpha^k.
class RescaledSystem {
 public:
  /// `anchor` holds m points (2m reals), one per cluster of `base`.
  RescaledSystem(VortexSystem base, Eigen::VectorXd anchor, double r);

  const VortexSystem& base() const { return base_; }
  const Eigen::VectorXd& anchor() const { return anchor_; }
  double scale() const { return r_; }
  /// calH(alpha) for the m-vortex system with strengths Gamma^k.
  double anchor_energy() const { return anchor_energy_; }

  /// hat(a) = (a^1, ..., a^1, ..., a^m, ..., a^m).
  Eigen::VectorXd expand(const Eigen::Ref<const Eigen::VectorXd>& a) const;
  Eigen::VectorXd physical(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  Eigen::VectorXd rescaled(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  /// F(w), with gradient/Hessian as requested. w is an offset from hat(alpha).
  Evaluation eval_F(const Eigen::Ref<const Eigen::VectorXd>& w, Order order) const;
  Evaluation eval_H0(const Eigen::Ref<const Eigen::VectorXd>& u, Order order) const;
  Evaluation eval(const Eigen::Ref<const Eigen::VectorXd>& u, Order order) const;

  /// Throws when u is outside O_r (clusters collide in u, or r u + hat(alpha)
  /// leaves F_N(Omega)).
  void validate(const Eigen::Ref<const Eigen::VectorXd>& u,
                double collision_tolerance = kCollisionTolerance,
                double boundary_margin = kBoundaryMargin) const;

 private:
  VortexSystem base_;
  Eigen::VectorXd anchor_;
  double r_;
  double anchor_energy_;
};

double rescaled_hamiltonian(const RescaledSystem& rs, const Eigen::Ref<const Eigen::VectorXd>& u);
Eigen::VectorXd rescaled_vector_field(const RescaledSystem& rs,
                                      const Eigen::Ref<const Eigen::VectorXd>& u);
Eigen::MatrixXd rescaled_field_jacobian(const RescaledSystem& rs,
                                        const Eigen::Ref<const Eigen::VectorXd>& u);

}  // namespace vortexlab
