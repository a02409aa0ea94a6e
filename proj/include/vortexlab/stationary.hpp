#pragma once

// Critical points of the m-vortex Hamiltonian
//
//   calH(a) = sum_{k != k'} G^k G^k' G(a^k, a^k') - sum_k (G^k)^2 h(a^k)
//
// and their classification by Hessian kernel against the symmetry of the
// domain.

#include "vortexlab/greens.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace vortexlab {

enum class Classification { NondegenerateI, RotationalII, TranslationalIII, PlaneIV, Unclassified };

std::string to_string(Classification c);

struct StationaryPoint {
  std::vector<double> strengths;
  Eigen::VectorXd positions;  // alpha, 2m reals
  DomainPtr domain;
  double gradient_norm = 0.0;
  Eigen::MatrixXd hessian;
  Eigen::VectorXd hessian_singular_values;
  int kernel_dimension = 0;
  Classification classification = Classification::Unclassified;
  int iterations = 0;
  std::vector<double> gradient_history;  // |grad calH| per Newton iterate
};

double m_hamiltonian(const std::vector<double>& strengths, const Domain& domain,
                     const Eigen::Ref<const Eigen::VectorXd>& a);
Eigen::VectorXd m_hamiltonian_gradient(const std::vector<double>& strengths, const Domain& domain,
                                       const Eigen::Ref<const Eigen::VectorXd>& a);
Eigen::MatrixXd m_hamiltonian_hessian(const std::vector<double>& strengths, const Domain& domain,
                                      const Eigen::Ref<const Eigen::VectorXd>& a);

/// mu = sqrt(sqrt(5) - 2), the half-distance of the stationary dipole in the
/// unit disc; it solves mu^4 = 1 - 4 mu^2.
double dipole_mu();

/// Gamma = (1, -1) at ((mu, 0), (-mu, 0)) in the unit disc, classified.
StationaryPoint disc_dipole();

struct NewtonOptions {
  double gradient_tolerance = 1e-10;
  int max_iterations = 100;
  /// Relative singular-value cutoff of the bordered least-squares step.
  double step_truncation = 1e-12;
  int max_halvings = 30;
};

/// Newton iteration on grad calH = 0 from `guess`. When the domain has a
/// continuous symmetry the Newton matrix is bordered with rows orthogonal
/// to the symmetry generators and solved by truncated SVD.
/// Throws ConvergenceError (with the last iterate in the message) when the
/// iteration stalls, exceeds max_iterations, or leaves F_m(Omega).
StationaryPoint find_critical_point(const std::vector<double>& strengths, DomainPtr domain,
                                    const Eigen::VectorXd& guess,
                                    const NewtonOptions& options = {});

/// Infinitesimal generators of the domain's symmetry at a, orthonormalized
/// (columns). Empty for domains without continuous symmetry.
Eigen::MatrixXd symmetry_generators(const Domain& domain, const Eigen::Ref<const Eigen::VectorXd>& a);

/// Relative singular-value cutoff for the Hessian kernel.
inline constexpr double kKernelTolerance = 1e-8;

/// Fills hessian, singular values and kernel_dimension of `sp` and returns
/// the matching case: (i) kernel 0; (ii) rotational domain, kernel spanned
/// by J_m alpha; (iii) translational domain, kernel spanned by hat(nu);
/// (iv) whole plane, kernel 3 spanned by translations and J_m alpha.
Classification classify(StationaryPoint& sp, const Domain& domain);

}  // namespace vortexlab
