#pragma once

#include <Eigen/Dense>

namespace vortexlab {

/// Singular values of `a` (descending).
Eigen::VectorXd singular_values(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Number of singular values <= rel_tol * (largest singular value).
int kernel_dimension(const Eigen::Ref<const Eigen::MatrixXd>& a, double rel_tol);

/// Same count against an explicit absolute threshold.
int count_below(const Eigen::Ref<const Eigen::VectorXd>& singular_values, double threshold);

/// Minimum-norm least-squares solution of a x = b with singular values
/// below rel_tol * sigma_max discarded. `rank` receives the retained rank.
Eigen::VectorXd truncated_svd_solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                    const Eigen::Ref<const Eigen::VectorXd>& b, double rel_tol,
                                    int* rank = nullptr);

/// Orthonormal basis (columns) of the numerical null space of a.
Eigen::MatrixXd null_space(const Eigen::Ref<const Eigen::MatrixXd>& a, double rel_tol);

/// Matrix exponential by scaling and squaring with a Pade approximant.
Eigen::MatrixXd expm(const Eigen::Ref<const Eigen::MatrixXd>& a);

}  // namespace vortexlab
