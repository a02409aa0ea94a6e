#include "vortexlab/stationary.hpp"

#include "vortexlab/errors.hpp"
#include "vortexlab/linalg.hpp"
#include "vortexlab/system.hpp"

#include <cmath>
#include <sstream>

namespace vortexlab {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::NondegenerateI: return "nondegenerate";
    case Classification::RotationalII: return "rotational";
    case Classification::TranslationalIII: return "translational";
    case Classification::PlaneIV: return "plane";
    case Classification::Unclassified: return "unclassified";
  }
  return "unclassified";
}

double m_hamiltonian(const std::vector<double>& strengths, const Domain& domain,
                     const Eigen::Ref<const Eigen::VectorXd>& a) {
  const VortexSystem system(strengths, std::shared_ptr<const Domain>(&domain, [](auto*) {}));
  return hamiltonian(system, a);
}

Eigen::VectorXd m_hamiltonian_gradient(const std::vector<double>& strengths, const Domain& domain,
                                       const Eigen::Ref<const Eigen::VectorXd>& a) {
  const VortexSystem system(strengths, std::shared_ptr<const Domain>(&domain, [](auto*) {}));
  return grad_hamiltonian(system, a);
}

Eigen::MatrixXd m_hamiltonian_hessian(const std::vector<double>& strengths, const Domain& domain,
                                      const Eigen::Ref<const Eigen::VectorXd>& a) {
  const VortexSystem system(strengths, std::shared_ptr<const Domain>(&domain, [](auto*) {}));
  return hess_hamiltonian(system, a);
}

double dipole_mu() { return std::sqrt(std::sqrt(5.0) - 2.0); }

StationaryPoint disc_dipole() {
  StationaryPoint sp;
  sp.strengths = {1.0, -1.0};
  const double mu = dipole_mu();
  sp.positions.resize(4);
  sp.positions << mu, 0.0, -mu, 0.0;
  sp.domain = unit_disc();
  sp.gradient_norm = m_hamiltonian_gradient(sp.strengths, *sp.domain, sp.positions).norm();
  classify(sp, *sp.domain);
  return sp;
}

Eigen::MatrixXd symmetry_generators(const Domain& domain,
                                    const Eigen::Ref<const Eigen::VectorXd>& a) {
  const Eigen::Index dim = a.size();
  const int m = static_cast<int>(dim / 2);
  std::vector<Eigen::VectorXd> raw;
  auto translation = [&](const Vec2& nu) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < m; ++k) v.segment<2>(2 * k) = nu;
    return v;
  };
  const Symmetry sym = domain.symmetry();
  switch (sym.kind) {
    case Symmetry::Kind::None:
      break;
    case Symmetry::Kind::Rotational:
      raw.push_back(apply_J(a));
      break;
    case Symmetry::Kind::Translational:
      raw.push_back(translation(sym.direction));
      break;
    case Symmetry::Kind::PlaneFull:
      raw.push_back(translation(Vec2(1.0, 0.0)));
      raw.push_back(translation(Vec2(0.0, 1.0)));
      raw.push_back(apply_J(a));
      raw.push_back(a);  // scaling about the origin
      break;
  }
  // Gram-Schmidt, dropping numerically dependent generators.
  Eigen::MatrixXd basis(dim, 0);
  for (Eigen::VectorXd v : raw) {
    for (Eigen::Index c = 0; c < basis.cols(); ++c) v -= basis.col(c).dot(v) * basis.col(c);
    const double norm = v.norm();
    if (norm <= 1e-10 * std::max(1.0, a.norm())) continue;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v / norm;
  }
  return basis;
}

namespace {

bool in_configuration_space(const std::vector<double>& strengths, const DomainPtr& domain,
                            const Eigen::VectorXd& a) {
  try {
    VortexSystem(strengths, domain).validate(a);
    return true;
  } catch (const GeometryError&) {
    return false;
  }
}

std::string describe(const Eigen::VectorXd& a) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < a.size(); ++i) os << (i ? ", " : "") << a[i];
  os << "]";
  return os.str();
}

// Cosine between v and its projection onto the column span of basis.
double alignment(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
  const double n = v.norm();
  if (n == 0.0 || basis.cols() == 0) return 0.0;
  return (basis.transpose() * v).norm() / n;
}

}  // namespace

StationaryPoint find_critical_point(const std::vector<double>& strengths, DomainPtr domain,
                                    const Eigen::VectorXd& guess, const NewtonOptions& options) {
  if (guess.size() != 2 * static_cast<Eigen::Index>(strengths.size())) {
    throw PreconditionError("guess must have two coordinates per vortex");
  }
  const VortexSystem system(strengths, domain);
  system.validate(guess);

  StationaryPoint sp;
  sp.strengths = strengths;
  sp.domain = domain;
  Eigen::VectorXd a = guess;
  Eigen::VectorXd g = grad_hamiltonian(system, a);
  sp.gradient_history.push_back(g.norm());

  int iteration = 0;
  while (g.norm() > options.gradient_tolerance) {
    if (iteration >= options.max_iterations) {
      throw ConvergenceError("critical-point search did not converge in " +
                             std::to_string(options.max_iterations) +
                             " iterations; last iterate " + describe(a));
    }
    ++iteration;
    const Eigen::MatrixXd hess = hess_hamiltonian(system, a);
    const Eigen::MatrixXd generators = symmetry_generators(*domain, a);
    Eigen::MatrixXd bordered(hess.rows() + generators.cols(), hess.cols());
    bordered << hess, generators.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(bordered.rows());
    rhs.head(g.size()) = -g;
    const Eigen::VectorXd step = truncated_svd_solve(bordered, rhs, options.step_truncation);

    // Backtrack until the iterate stays admissible and the gradient drops.
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, t *= 0.5) {
      const Eigen::VectorXd trial = a + t * step;
      if (!in_configuration_space(strengths, domain, trial)) continue;
      const Eigen::VectorXd g_trial = grad_hamiltonian(system, trial);
      if (g_trial.norm() < g.norm()) {
        a = trial;
        g = g_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("critical-point search stalled (no admissible descent step); last "
                             "iterate " + describe(a));
    }
    sp.gradient_history.push_back(g.norm());
  }

  sp.positions = a;
  sp.gradient_norm = g.norm();
  sp.iterations = iteration;
  classify(sp, *domain);
  return sp;
}

Classification classify(StationaryPoint& sp, const Domain& domain) {
  sp.hessian = m_hamiltonian_hessian(sp.strengths, domain, sp.positions);
  sp.hessian_singular_values = singular_values(sp.hessian);
  const double top = sp.hessian_singular_values.size() ? sp.hessian_singular_values[0] : 0.0;
  sp.kernel_dimension = count_below(sp.hessian_singular_values, kKernelTolerance * top);

  const Eigen::MatrixXd kernel = null_space(sp.hessian, kKernelTolerance);
  const Symmetry sym = domain.symmetry();
  const Eigen::MatrixXd generators = symmetry_generators(domain, sp.positions);
  // A generator lies in the kernel when its projection onto the kernel is
  // (numerically) the whole vector.
  auto spans_generators = [&](int expected) {
    if (generators.cols() < expected) return false;
    for (int c = 0; c < expected; ++c) {
      if (alignment(generators.col(c), kernel) < 1.0 - 1e-6) return false;
    }
    return true;
  };

  Classification result = Classification::Unclassified;
  if (sp.kernel_dimension == 0) {
    result = Classification::NondegenerateI;
  } else if (sp.kernel_dimension == 1 && sym.kind == Symmetry::Kind::Rotational &&
             spans_generators(1)) {
    result = Classification::RotationalII;
  } else if (sp.kernel_dimension == 1 && sym.kind == Symmetry::Kind::Translational &&
             spans_generators(1)) {
    result = Classification::TranslationalIII;
  } else if (sp.kernel_dimension == 3 && sym.kind == Symmetry::Kind::PlaneFull &&
             spans_generators(3)) {
    result = Classification::PlaneIV;
  }
  sp.classification = result;
  return result;
}

}  // namespace vortexlab
