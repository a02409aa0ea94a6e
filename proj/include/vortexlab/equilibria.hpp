#pragma once

// Relative equilibria of the whole-plane system, Z(t) = exp(omega J t) z,
// and their (sigma-)nondegeneracy certificates.

#include "vortexlab/dynamics.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace vortexlab {

/// A permutation sigma of {0, ..., n-1}, stored as image[j] = sigma(j).
/// Acts on R^{2n} by (sigma * z)_i = z_{sigma^{-1}(i)}.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> image);
  static Permutation identity(int n);
  /// (1 2 ... n): j -> j + 1 mod n.
  static Permutation cyclic(int n);

  int size() const { return static_cast<int>(image_.size()); }
  int operator()(int j) const { return image_[j]; }
  const std::vector<int>& image() const { return image_; }
  bool is_identity() const;
  int order() const;
  Permutation inverse() const;
  Permutation compose(const Permutation& after) const;  // after o this
  Eigen::VectorXd act(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  Eigen::MatrixXd matrix() const;

 private:
  std::vector<int> image_;
};

struct RelativeEquilibrium {
  std::string catalog;  // pair, equilateral, thomson, hermite, custom, single
  std::vector<double> strengths;
  Eigen::VectorXd z;  // configuration at t = 0, center of vorticity at origin
  double omega = 0.0;
  Permutation sigma;

  int size() const { return static_cast<int>(strengths.size()); }
  int order() const { return sigma.order(); }
  double total_strength() const;
  /// Z(t) = exp(omega J t) z.
  Eigen::VectorXd at(double t) const;
  /// |grad H(z) - omega M z|.
  double residual() const;
};

/// |grad H_plane(z) - omega M z| for the given strengths.
double equilibrium_residual(const std::vector<double>& strengths,
                            const Eigen::Ref<const Eigen::VectorXd>& z, double omega);
/// Least-squares omega for a candidate configuration.
double fit_angular_velocity(const std::vector<double>& strengths,
                            const Eigen::Ref<const Eigen::VectorXd>& z);

/// Two vortices on the x-axis about their center of vorticity, |omega| = 1.
RelativeEquilibrium make_pair(double g1, double g2);
/// Equilateral triangle about the center of vorticity, |omega| = 1.
RelativeEquilibrium make_equilateral(double g1, double g2, double g3);
/// Regular n-gon of identical vortices with sigma = (1 2 ... n) and
/// |omega| = 1/n, so that sigma * Z(t + 2 pi) = Z(t).
RelativeEquilibrium make_thomson(int n, double gamma);
/// Identical vortices at the roots of the n-th Hermite polynomial, |omega| = 1.
RelativeEquilibrium make_collinear_hermite(int n, double gamma);
/// A single vortex at the origin (omega = 0); the trivial cluster.
RelativeEquilibrium make_single(double gamma);
/// User-supplied configuration; omega is fitted unless given. Throws
/// NotAnEquilibriumError when the residual exceeds `tolerance`.
RelativeEquilibrium make_custom(std::vector<double> strengths, Eigen::VectorXd z,
                                Permutation sigma, double tolerance = 1e-10);
RelativeEquilibrium make_custom(std::vector<double> strengths, Eigen::VectorXd z, double omega,
                                Permutation sigma, double tolerance = 1e-10);

/// Rescales z by sqrt(omega / target) so the angular velocity becomes
/// target. The sense of rotation is fixed by the strengths, so target must
/// have the sign of omega.
RelativeEquilibrium normalize(const RelativeEquilibrium& eq, double target_omega);

/// Roots of the physicists' Hermite polynomial H_n, ascending.
std::vector<double> hermite_roots(int n);

struct CertifyOptions {
  /// Singular values of (Phi - I) below tolerance * |Phi| count as kernel.
  double tolerance = 1e-6;
  double residual_tolerance = 1e-10;
};

struct CertificationReport {
  /// dim ker(Phi_tau - I) over the period tau = 2 pi ord(sigma) of Z.
  int periodic_solution_count = 0;
  /// dim ker(S_sigma Phi_{2 pi} - I).
  int symmetric_count = 0;
  bool nondegenerate = false;
  bool sigma_nondegenerate = false;
  double omega = 0.0;
  double residual = 0.0;
  Eigen::VectorXd singular_values;            // of Phi - I
  Eigen::VectorXd symmetric_singular_values;  // of S_sigma Phi - I
  Eigen::MatrixXd monodromy;
};

/// Time-`period` monodromy of the linearization M w' = J hess H(Z(t)) w,
/// computed in the rotating frame w = exp(omega J t) v where the system has
/// constant coefficients:
///   Phi = exp(period omega J) exp(period A),  A = M^{-1} J hess H(z) - omega J.
Eigen::MatrixXd monodromy(const RelativeEquilibrium& eq, double period = 2.0 * kPi);
/// The same matrix by integrating the time-dependent linearization.
Eigen::MatrixXd monodromy_by_integration(const RelativeEquilibrium& eq,
                                         double period = 2.0 * kPi,
                                         const IntegratorSettings& settings = {});

CertificationReport certify(const RelativeEquilibrium& eq, const CertifyOptions& options = {});

/// Whole-plane system for the equilibrium's strengths.
VortexSystem plane_system(const RelativeEquilibrium& eq);

}  // namespace vortexlab
