#include "vortexlab/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace vortexlab {

Eigen::VectorXd singular_values(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
}

int count_below(const Eigen::Ref<const Eigen::VectorXd>& sv, double threshold) {
  int count = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] <= threshold) ++count;
  }
  return count;
}

int kernel_dimension(const Eigen::Ref<const Eigen::MatrixXd>& a, double rel_tol) {
  const Eigen::VectorXd sv = singular_values(a);
  // Rank-deficient in the wide direction counts as kernel too.
  const int missing = static_cast<int>(a.cols() - sv.size());
  if (sv.size() == 0) return static_cast<int>(a.cols());
  return missing + count_below(sv, rel_tol * sv[0]);
}

Eigen::VectorXd truncated_svd_solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                    const Eigen::Ref<const Eigen::VectorXd>& b, double rel_tol,
                                    int* rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  int kept = 0;
  if (sv.size() > 0 && sv[0] > 0.0) {
    const double cutoff = rel_tol * sv[0];
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] <= cutoff) break;
      x += (svd.matrixU().col(i).dot(b) / sv[i]) * svd.matrixV().col(i);
      ++kept;
    }
  }
  if (rank) *rank = kept;
  return x;
}

Eigen::MatrixXd null_space(const Eigen::Ref<const Eigen::MatrixXd>& a, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rel_tol * sv[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > cutoff) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

Eigen::MatrixXd expm(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  const Eigen::MatrixXd m = a;
  return m.exp();
}

}  // namespace vortexlab
