#include "vortexlab/equilibria.hpp"

#include "vortexlab/errors.hpp"
#include "vortexlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vortexlab {

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (int v : image_) {
    if (v < 0 || v >= size() || seen[v]) throw PreconditionError("not a permutation");
    seen[v] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> image(n);
  std::iota(image.begin(), image.end(), 0);
  return Permutation(std::move(image));
}

Permutation Permutation::cyclic(int n) {
  std::vector<int> image(n);
  for (int j = 0; j < n; ++j) image[j] = (j + 1) % n;
  return Permutation(std::move(image));
}

bool Permutation::is_identity() const {
  for (int j = 0; j < size(); ++j) {
    if (image_[j] != j) return false;
  }
  return true;
}

int Permutation::order() const {
  std::vector<bool> seen(image_.size(), false);
  long result = 1;
  for (int j = 0; j < size(); ++j) {
    if (seen[j]) continue;
    long length = 0;
    for (int k = j; !seen[k]; k = image_[k]) {
      seen[k] = true;
      ++length;
    }
    result = std::lcm(result, length);
  }
  return static_cast<int>(result);
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (int j = 0; j < size(); ++j) inv[image_[j]] = j;
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& after) const {
  std::vector<int> image(image_.size());
  for (int j = 0; j < size(); ++j) image[j] = after(image_[j]);
  return Permutation(std::move(image));
}

Eigen::VectorXd Permutation::act(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  Eigen::VectorXd out(z.size());
  for (int j = 0; j < size(); ++j) out.segment<2>(2 * image_[j]) = z.segment<2>(2 * j);
  return out;
}

Eigen::MatrixXd Permutation::matrix() const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * size(), 2 * size());
  for (int j = 0; j < size(); ++j) {
    s(2 * image_[j], 2 * j) = 1.0;
    s(2 * image_[j] + 1, 2 * j + 1) = 1.0;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Relative equilibria

namespace {

Eigen::VectorXd weights_of(const std::vector<double>& strengths) {
  Eigen::VectorXd w(2 * strengths.size());
  for (std::size_t p = 0; p < strengths.size(); ++p) w[2 * p] = w[2 * p + 1] = strengths[p];
  return w;
}

double total(const std::vector<double>& strengths) {
  return std::accumulate(strengths.begin(), strengths.end(), 0.0);
}

void center_on_vorticity(const std::vector<double>& strengths, Eigen::VectorXd& z) {
  const double sum = total(strengths);
  if (std::abs(sum) < 1e-14) throw PreconditionError("total strength is zero");
  Vec2 c = Vec2::Zero();
  for (std::size_t p = 0; p < strengths.size(); ++p) c += strengths[p] * z.segment<2>(2 * p);
  c /= sum;
  for (std::size_t p = 0; p < strengths.size(); ++p) z.segment<2>(2 * p) -= c;
}

// Fits omega and rescales to |omega| = magnitude.
RelativeEquilibrium finish(std::string catalog, std::vector<double> strengths, Eigen::VectorXd z,
                           Permutation sigma, double magnitude) {
  center_on_vorticity(strengths, z);
  RelativeEquilibrium eq{std::move(catalog), std::move(strengths), std::move(z), 0.0,
                         std::move(sigma)};
  eq.omega = fit_angular_velocity(eq.strengths, eq.z);
  if (eq.omega == 0.0 || !std::isfinite(eq.omega)) {
    throw PreconditionError("configuration does not rotate");
  }
  return normalize(eq, std::copysign(magnitude, eq.omega));
}

}  // namespace

double RelativeEquilibrium::total_strength() const { return total(strengths); }

Eigen::VectorXd RelativeEquilibrium::at(double t) const { return rotate_by_J(omega * t, z); }

double RelativeEquilibrium::residual() const { return equilibrium_residual(strengths, z, omega); }

VortexSystem plane_system(const RelativeEquilibrium& eq) {
  return VortexSystem(eq.strengths, whole_plane());
}

double equilibrium_residual(const std::vector<double>& strengths,
                            const Eigen::Ref<const Eigen::VectorXd>& z, double omega) {
  const VortexSystem system(strengths, whole_plane());
  return (grad_hamiltonian(system, z) - omega * weights_of(strengths).cwiseProduct(z)).norm();
}

double fit_angular_velocity(const std::vector<double>& strengths,
                            const Eigen::Ref<const Eigen::VectorXd>& z) {
  const VortexSystem system(strengths, whole_plane());
  const Eigen::VectorXd mz = weights_of(strengths).cwiseProduct(z);
  const double denom = mz.squaredNorm();
  if (denom == 0.0) return 0.0;
  return grad_hamiltonian(system, z).dot(mz) / denom;
}

RelativeEquilibrium normalize(const RelativeEquilibrium& eq, double target_omega) {
  if (eq.omega == 0.0) throw PreconditionError("cannot normalize a non-rotating configuration");
  if (target_omega == 0.0 || (target_omega > 0.0) != (eq.omega > 0.0)) {
    throw PreconditionError("target angular velocity must be nonzero with the sign of omega");
  }
  // grad H scales like 1/lambda and M z like lambda, so omega ~ 1/lambda^2.
  const double lambda = std::sqrt(eq.omega / target_omega);
  RelativeEquilibrium out = eq;
  out.z = lambda * eq.z;
  out.omega = target_omega;
  return out;
}

RelativeEquilibrium make_pair(double g1, double g2) {
  if (g1 + g2 == 0.0) {
    throw PreconditionError("pair with zero total strength translates; it has no center");
  }
  Eigen::VectorXd z(4);
  z << 0.5, 0.0, -0.5, 0.0;
  return finish("pair", {g1, g2}, std::move(z), Permutation::identity(2), 1.0);
}

RelativeEquilibrium make_equilateral(double g1, double g2, double g3) {
  if (g1 + g2 + g3 == 0.0) throw PreconditionError("equilateral triangle needs nonzero total strength");
  Eigen::VectorXd z(6);
  const double h = std::sqrt(3.0) / 2.0;
  z << 0.0, h * 2.0 / 3.0, -0.5, -h / 3.0, 0.5, -h / 3.0;
  return finish("equilateral", {g1, g2, g3}, std::move(z), Permutation::identity(3), 1.0);
}

RelativeEquilibrium make_thomson(int n, double gamma) {
  if (n < 2) throw PreconditionError("Thomson polygon needs at least 2 vortices");
  if (gamma == 0.0) throw PreconditionError("vortex strength must be nonzero");
  // Positive vortices turn counterclockwise (omega < 0 in the exp(omega J t)
  // convention); sigma * Z(t + 2 pi) = Z(t) then needs counterclockwise
  // vertex order, and clockwise order for negative strengths.
  const double orientation = gamma > 0.0 ? 1.0 : -1.0;
  Eigen::VectorXd z(2 * n);
  for (int j = 0; j < n; ++j) {
    const double phi = orientation * 2.0 * kPi * j / n;
    z[2 * j] = std::cos(phi);
    z[2 * j + 1] = std::sin(phi);
  }
  return finish("thomson", std::vector<double>(n, gamma), std::move(z), Permutation::cyclic(n),
                1.0 / n);
}

std::vector<double> hermite_roots(int n) {
  if (n < 1) throw PreconditionError("Hermite degree must be positive");
  // Symmetric tridiagonal form of the three-term recurrence
  // H_{k+1} = 2x H_k - 2k H_{k-1}; its eigenvalues are the roots of H_n.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("Hermite root eigensolver failed");
  std::vector<double> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  // Newton polish on the recurrence.
  for (double& x : roots) {
    for (int it = 0; it < 3; ++it) {
      double h0 = 1.0, h1 = 2.0 * x;
      if (n == 1) h1 = 2.0 * x;
      for (int k = 1; k < n; ++k) {
        const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
      }
      // H_n' = 2n H_{n-1}
      const double derivative = 2.0 * n * h0;
      if (derivative == 0.0) break;
      x -= h1 / derivative;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

RelativeEquilibrium make_collinear_hermite(int n, double gamma) {
  if (n < 2) throw PreconditionError("collinear configuration needs at least 2 vortices");
  if (gamma == 0.0) throw PreconditionError("vortex strength must be nonzero");
  const std::vector<double> roots = hermite_roots(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * n);
  for (int j = 0; j < n; ++j) z[2 * j] = roots[j];
  return finish("hermite", std::vector<double>(n, gamma), std::move(z), Permutation::identity(n),
                1.0);
}

RelativeEquilibrium make_single(double gamma) {
  if (gamma == 0.0) throw PreconditionError("vortex strength must be nonzero");
  return {"single", {gamma}, Eigen::VectorXd::Zero(2), 0.0, Permutation::identity(1)};
}

namespace {

void check_sigma(const std::vector<double>& strengths, const Permutation& sigma) {
  if (sigma.size() != static_cast<int>(strengths.size())) {
    throw PreconditionError("permutation size does not match the number of vortices");
  }
  for (int j = 0; j < sigma.size(); ++j) {
    if (strengths[sigma(j)] != strengths[j]) {
      throw PreconditionError("permutation must preserve strengths");
    }
  }
}

}  // namespace

RelativeEquilibrium make_custom(std::vector<double> strengths, Eigen::VectorXd z,
                                Permutation sigma, double tolerance) {
  if (z.size() != 2 * static_cast<Eigen::Index>(strengths.size())) {
    throw PreconditionError("custom configuration has the wrong number of coordinates");
  }
  center_on_vorticity(strengths, z);
  const double omega = fit_angular_velocity(strengths, z);
  return make_custom(std::move(strengths), std::move(z), omega, std::move(sigma), tolerance);
}

RelativeEquilibrium make_custom(std::vector<double> strengths, Eigen::VectorXd z, double omega,
                                Permutation sigma, double tolerance) {
  if (z.size() != 2 * static_cast<Eigen::Index>(strengths.size())) {
    throw PreconditionError("custom configuration has the wrong number of coordinates");
  }
  check_sigma(strengths, sigma);
  center_on_vorticity(strengths, z);
  RelativeEquilibrium eq{"custom", std::move(strengths), std::move(z), omega, std::move(sigma)};
  const double residual = eq.residual();
  if (!(residual <= tolerance)) {
    throw NotAnEquilibriumError("custom configuration is not a relative equilibrium (residual " +
                                std::to_string(residual) + ")");
  }
  return eq;
}

// ---------------------------------------------------------------------------
// Certification

namespace {

Eigen::MatrixXd rotation_matrix(int n, double theta) {
  // exp(theta J_N)
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int p = 0; p < n; ++p) {
    r(2 * p, 2 * p) = c;
    r(2 * p, 2 * p + 1) = s;
    r(2 * p + 1, 2 * p) = -s;
    r(2 * p + 1, 2 * p + 1) = c;
  }
  return r;
}

}  // namespace

Eigen::MatrixXd monodromy(const RelativeEquilibrium& eq, double period) {
  const VortexSystem system = plane_system(eq);
  const int n = eq.size();
  const Eigen::MatrixXd a =
      field_jacobian(system, eq.z) - eq.omega * symplectic_matrix(n);
  return rotation_matrix(n, period * eq.omega) * expm(period * a);
}

Eigen::MatrixXd monodromy_by_integration(const RelativeEquilibrium& eq, double period,
                                         const IntegratorSettings& settings) {
  const VortexSystem system = plane_system(eq);
  const Eigen::Index dim = 2 * eq.size();
  Eigen::VectorXd w0(dim * dim);
  Eigen::Map<Eigen::MatrixXd>(w0.data(), dim, dim) = Eigen::MatrixXd::Identity(dim, dim);
  auto rhs = [&](double t, const Eigen::VectorXd& w) {
    Eigen::VectorXd d(w.size());
    Eigen::Map<Eigen::MatrixXd>(d.data(), dim, dim) =
        field_jacobian(system, eq.at(t)) * Eigen::Map<const Eigen::MatrixXd>(w.data(), dim, dim);
    return d;
  };
  OdeOptions o;
  o.rtol = settings.rtol;
  o.atol = settings.atol;
  o.max_step = settings.max_step;
  o.record = false;
  const OdeResult r = solve_dopri5(rhs, w0, 0.0, period, o);
  return Eigen::Map<const Eigen::MatrixXd>(r.y.data(), dim, dim);
}

CertificationReport certify(const RelativeEquilibrium& eq, const CertifyOptions& options) {
  CertificationReport report;
  report.omega = eq.omega;
  report.residual = eq.residual();
  if (!(report.residual <= options.residual_tolerance)) {
    throw NotAnEquilibriumError("residual " + std::to_string(report.residual) +
                                " exceeds the relative-equilibrium tolerance");
  }
  if (eq.omega == 0.0) throw NotAnEquilibriumError("a non-rotating configuration has no monodromy");
  if (eq.sigma.size() != eq.size()) throw PreconditionError("sigma has the wrong size");

  const int n = eq.size();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  report.monodromy = monodromy(eq, 2.0 * kPi);

  const Eigen::MatrixXd sigma_phi = eq.sigma.matrix() * report.monodromy;
  report.symmetric_singular_values = singular_values(sigma_phi - identity);
  report.symmetric_count = count_below(report.symmetric_singular_values,
                                       options.tolerance * report.monodromy.norm());

  const Eigen::MatrixXd full =
      eq.sigma.is_identity() ? report.monodromy : monodromy(eq, 2.0 * kPi * eq.order());
  report.singular_values = singular_values(full - identity);
  report.periodic_solution_count =
      count_below(report.singular_values, options.tolerance * full.norm());

  report.nondegenerate = report.periodic_solution_count == 3;
  report.sigma_nondegenerate = report.symmetric_count == 3;
  return report;
}

}  // namespace vortexlab
