#pragma once

// Periodic orbits from superposition: a stationary skeleton alpha with each
// anchor replaced by an r-scaled rotating cluster,
//
//   z^k_j(t) ~ alpha^k + r Z^k_j(t / r^2),
//
// continued into genuine T = tau r^2 periodic solutions by shooting in the
// rescaled coordinates u, z = r u + hat(alpha).

#include "vortexlab/dynamics.hpp"
#include "vortexlab/equilibria.hpp"
#include "vortexlab/stationary.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace vortexlab {

struct SuperpositionSpec {
  /// Anchors alpha and strengths Gamma^k; carries the domain.
  StationaryPoint stationary;
  /// One per anchor. Single-vortex clusters (make_single) are trivial.
  std::vector<RelativeEquilibrium> clusters;
  /// One phase per nontrivial cluster, in cluster order.
  std::vector<double> phases;
  double r = 0.0;

  int anchor_count() const { return static_cast<int>(clusters.size()); }
  /// l, the number of clusters with more than one vortex.
  int nontrivial_count() const;
  const Domain& domain() const { return *stationary.domain; }
};

/// Throws PreconditionError unless: one cluster per anchor; cluster sums
/// match anchor strengths to 1e-12; every nontrivial cluster satisfies
/// sigma_k * Z^k(t + 2 pi) = Z^k(t) (|omega_k| ord(sigma_k) = 1) and is
/// certified sigma_k-nondegenerate; one phase per nontrivial cluster; r >= 0.
void validate(const SuperpositionSpec& spec);

/// sigma = (sigma_1, ..., sigma_m) acting blockwise on all N vortices.
Permutation combined_sigma(const SuperpositionSpec& spec);
/// ord(sigma), the lcm of the cluster orders.
int symmetry_order(const SuperpositionSpec& spec);
/// tau = 2 pi ord(sigma), the period in rescaled time.
double rescaled_period(const SuperpositionSpec& spec);

/// N-vortex system with the clusters' strengths and sizes.
VortexSystem full_system(const SuperpositionSpec& spec);
RescaledSystem rescaled_system(const SuperpositionSpec& spec);
RescaledSystem rescaled_system(const SuperpositionSpec& spec, double r);

/// (theta * Z)(t) = (Z^1(t + theta_1), ..., Z^m(t + theta_m)), with zero
/// blocks for trivial clusters; `phases` has one entry per nontrivial cluster.
Eigen::VectorXd phase_torus_point(const SuperpositionSpec& spec,
                                  const std::vector<double>& phases, double t);
/// Time derivative of phase_torus_point.
Eigen::VectorXd phase_torus_velocity(const SuperpositionSpec& spec,
                                     const std::vector<double>& phases, double t);

/// Largest r for which r (theta * Z)(t) + hat(alpha) stays in F_N(Omega) for
/// every t and every phase: clusters are discs of radius max_j |Z^k_j|.
double admissible_scale(const SuperpositionSpec& spec);

/// u0 = (theta * Z)(0). Throws ScaleTooLargeError when r is not below
/// admissible_scale or r u0 + hat(alpha) is not in F_N(Omega).
Eigen::VectorXd build_initial_guess(const SuperpositionSpec& spec);

struct ShootingOptions {
  double residual_tolerance = 1e-10;
  int max_iterations = 50;
  /// Singular values of S_sigma D phi - I below this times the largest are
  /// dropped from the Newton step.
  double truncation = 1e-6;
  int max_halvings = 20;
  IntegratorSettings integrator{};
  /// Samples per 2 pi of rescaled time for defect, winding and distance.
  int samples_per_2pi = 256;
};

struct PeriodicOrbit {
  Eigen::VectorXd u0;
  double r = 0.0;
  double tau = 0.0;     // rescaled period
  double period = 0.0;  // physical period T = tau r^2
  int iterations = 0;
  std::vector<double> residual_history;
  double residual = 0.0;          // |S_sigma phi_2pi(u0) - u0|
  double closure = 0.0;           // |phi_tau(u0) - u0|
  double physical_closure = 0.0;  // same in z for the physical flow over T
  double symmetry_defect = 0.0;   // max_t |sigma * u(t + 2 pi) - u(t)|
  double energy_drift = 0.0;
  double distance_to_M = 0.0;
  /// Signed turns of u^k_2 - u^k_1 over one period tau; 0 for trivial clusters.
  std::vector<int> winding;
  /// Rescaled trajectory on [0, tau].
  std::shared_ptr<const Trajectory> trajectory;

  /// Physical state at physical time t in [0, T].
  Eigen::VectorXd physical_state(const SuperpositionSpec& spec, double t) const;
};

/// Solves S_sigma phi_2pi(u0) - u0 = 0 for the rescaled flow at spec.r by
/// Newton's method with a truncated-SVD pseudo-inverse and step halving,
/// then evaluates the diagnostics. Throws ConvergenceError when the residual
/// does not reach the tolerance, GeometryError subclasses when the flow hits
/// a collision or the boundary.
PeriodicOrbit shoot(const SuperpositionSpec& spec, const Eigen::VectorXd& u0_guess,
                    const ShootingOptions& options = {});

/// Shoots at r_list[0] from build_initial_guess, then at each following r
/// from the previous solution. r_list must be positive and strictly
/// decreasing. Errors carry the failing r.
std::vector<PeriodicOrbit> continue_in_r(const SuperpositionSpec& spec,
                                         const std::vector<double>& r_list,
                                         const ShootingOptions& options = {});

/// Discrete H^1 distance from the periodic samples u_i = u(i tau / n) to the
/// phase torus M: minimum over phases of
///   sqrt( (tau / n) sum_i |u_i - v_i|^2 + |u'_i - v'_i|^2 ),
/// with u' from spectral differentiation. Coarse search on 32 phases per
/// cluster, then Gauss-Newton.
double distance_to_M(const SuperpositionSpec& spec, const std::vector<Eigen::VectorXd>& samples);
/// Distance for an orbit, sampled from its trajectory.
double distance_to_M(const SuperpositionSpec& spec, const PeriodicOrbit& orbit,
                     int samples_per_2pi = 256);

/// Spectral derivative of uniformly sampled periodic data with period `period`.
std::vector<Eigen::VectorXd> spectral_derivative(const std::vector<Eigen::VectorXd>& samples,
                                                 double period);

struct ScanAttempt {
  std::vector<double> phases;
  bool converged = false;
  std::string failure;
  int orbit_class = -1;
};

struct ScanResult {
  std::vector<PeriodicOrbit> orbits;  // one representative per class
  std::vector<ScanAttempt> attempts;  // in grid order
  /// False when fewer than l classes were found; T may exceed T_0.
  bool conclusive = false;
};

/// Shoots from phases (theta_1, ..., theta_{l-1}, 0) on a uniform grid of
/// grid_size points per phase and groups converged orbits into classes:
/// two orbits coincide when some time shift, symmetry of the domain and
/// relabeling of equal strengths inside a cluster maps one onto the other to
/// within `identification_tolerance` (sup norm, rescaled units).
ScanResult scan_phases(const SuperpositionSpec& spec, int grid_size,
                       const ShootingOptions& options = {},
                       double identification_tolerance = 1e-6);

/// Minimal sup-distance between two orbits of the same spec modulo time
/// shift, domain symmetry and equal-strength relabeling within clusters.
double orbit_distance(const SuperpositionSpec& spec, const PeriodicOrbit& a,
                      const PeriodicOrbit& b, int samples_per_2pi = 256);

}  // namespace vortexlab
