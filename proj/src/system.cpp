#include "vortexlab/system.hpp"

#include "vortexlab/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace vortexlab {
namespace {

std::vector<int> ones(std::size_t n) { return std::vector<int>(n, 1); }

}  // namespace

VortexSystem::VortexSystem(std::vector<double> strengths, DomainPtr domain)
    : VortexSystem(strengths, ones(strengths.size()), std::move(domain)) {}

VortexSystem::VortexSystem(std::vector<double> strengths, std::vector<int> cluster_sizes,
                           DomainPtr domain)
    : strengths_(std::move(strengths)),
      cluster_sizes_(std::move(cluster_sizes)),
      domain_(std::move(domain)) {
  if (!domain_) throw PreconditionError("vortex system needs a domain");
  if (strengths_.empty()) throw PreconditionError("vortex system needs at least one vortex");
  for (std::size_t i = 0; i < strengths_.size(); ++i) {
    if (strengths_[i] == 0.0 || !std::isfinite(strengths_[i])) {
      throw PreconditionError("strength " + std::to_string(i + 1) +
                              " must be a nonzero finite number");
    }
  }
  int total = 0;
  for (int size : cluster_sizes_) {
    if (size < 1) throw PreconditionError("cluster sizes must be positive");
    cluster_offset_.push_back(total);
    for (int j = 0; j < size; ++j) cluster_index_.push_back(static_cast<int>(cluster_offset_.size()) - 1);
    total += size;
  }
  if (total != size()) {
    throw PreconditionError("cluster sizes sum to " + std::to_string(total) + " but there are " +
                            std::to_string(size()) + " strengths");
  }
}

std::vector<double> VortexSystem::cluster_sums() const {
  std::vector<double> sums(cluster_sizes_.size(), 0.0);
  for (int p = 0; p < size(); ++p) sums[cluster_index_[p]] += strengths_[p];
  return sums;
}

Eigen::VectorXd VortexSystem::weights() const {
  Eigen::VectorXd w(2 * size());
  for (int p = 0; p < size(); ++p) w[2 * p] = w[2 * p + 1] = strengths_[p];
  return w;
}

Interaction VortexSystem::interaction(InteractionTerms terms) const {
  return {strengths_, cluster_index_, domain_.get(), terms};
}

void VortexSystem::validate(const Eigen::Ref<const Eigen::VectorXd>& z,
                            double collision_tolerance, double boundary_margin) const {
  if (z.size() != 2 * size()) {
    throw PreconditionError("state has " + std::to_string(z.size()) + " coordinates, expected " +
                            std::to_string(2 * size()));
  }
  for (int p = 0; p < size(); ++p) {
    const Vec2 x(z[2 * p], z[2 * p + 1]);
    if (!std::isfinite(x.x()) || !std::isfinite(x.y()) ||
        !domain_->contains(x, boundary_margin)) {
      throw DomainError("vortex " + std::to_string(p + 1) + " left the " + domain_->name(), p);
    }
  }
  if (size() > 1) {
    const Separation s = min_separation(z);
    if (s.distance < collision_tolerance) {
      throw CollisionError("vortices " + std::to_string(s.first + 1) + " and " +
                               std::to_string(s.second + 1) + " collided",
                           s.first, s.second);
    }
  }
}

Separation min_separation(const Eigen::Ref<const Eigen::VectorXd>& z) {
  const int n = static_cast<int>(z.size() / 2);
  Separation best{std::numeric_limits<double>::infinity(), -1, -1};
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const double d = std::hypot(z[2 * p] - z[2 * q], z[2 * p + 1] - z[2 * q + 1]);
      if (d < best.distance) best = {d, p, q};
    }
  }
  return best;
}

Eigen::VectorXd apply_J(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index p = 0; p + 1 < v.size(); p += 2) {
    out[p] = v[p + 1];
    out[p + 1] = -v[p];
  }
  return out;
}

Eigen::MatrixXd symplectic_matrix(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int p = 0; p < n; ++p) {
    j(2 * p, 2 * p + 1) = 1.0;
    j(2 * p + 1, 2 * p) = -1.0;
  }
  return j;
}

Eigen::VectorXd rotate_by_J(double theta, const Eigen::Ref<const Eigen::VectorXd>& v) {
  return rotate_points(-theta, v);
}

Eigen::VectorXd rotate_points(double theta, const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::VectorXd out(v.size());
  for (Eigen::Index p = 0; p + 1 < v.size(); p += 2) {
    out[p] = c * v[p] - s * v[p + 1];
    out[p + 1] = s * v[p] + c * v[p + 1];
  }
  return out;
}

double hamiltonian(const VortexSystem& system, const Eigen::Ref<const Eigen::VectorXd>& z) {
  system.validate(z);
  return assemble(system.interaction({}), z, Order::Value).value;
}

Eigen::VectorXd grad_hamiltonian(const VortexSystem& system,
                                 const Eigen::Ref<const Eigen::VectorXd>& z) {
  system.validate(z);
  return assemble(system.interaction({}), z, Order::Gradient).gradient;
}

Eigen::MatrixXd hess_hamiltonian(const VortexSystem& system,
                                 const Eigen::Ref<const Eigen::VectorXd>& z) {
  system.validate(z);
  return assemble(system.interaction({}), z, Order::Hessian).hessian;
}

Eigen::VectorXd vector_field(const VortexSystem& system,
                             const Eigen::Ref<const Eigen::VectorXd>& z) {
  return apply_J(grad_hamiltonian(system, z)).cwiseQuotient(system.weights());
}

Eigen::MatrixXd field_jacobian(const VortexSystem& system,
                               const Eigen::Ref<const Eigen::VectorXd>& z) {
  const Eigen::MatrixXd jh = symplectic_matrix(system.size()) * hess_hamiltonian(system, z);
  return system.weights().cwiseInverse().asDiagonal() * jh;
}

// ---------------------------------------------------------------------------

RescaledSystem::RescaledSystem(VortexSystem base, Eigen::VectorXd anchor, double r)
    : base_(std::move(base)), anchor_(std::move(anchor)), r_(r) {
  const int m = base_.cluster_count();
  if (anchor_.size() != 2 * m) {
    throw PreconditionError("anchor has " + std::to_string(anchor_.size() / 2) +
                            " points but the system has " + std::to_string(m) + " clusters");
  }
  if (!(r_ >= 0.0) || !std::isfinite(r_)) throw PreconditionError("scale r must be >= 0");
  const std::vector<double> sums = base_.cluster_sums();
  for (int k = 0; k < m; ++k) {
    if (std::abs(sums[k]) < 1e-14) {
      throw PreconditionError("cluster " + std::to_string(k + 1) +
                              " has zero total strength; it cannot sit on an anchor");
    }
  }
  const VortexSystem skeleton(sums, base_.domain_ptr());
  anchor_energy_ = hamiltonian(skeleton, anchor_);
}

Eigen::VectorXd RescaledSystem::expand(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  Eigen::VectorXd out(2 * base_.size());
  for (int p = 0; p < base_.size(); ++p) {
    out.segment<2>(2 * p) = a.segment<2>(2 * base_.cluster_index()[p]);
  }
  return out;
}

Eigen::VectorXd RescaledSystem::physical(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  return r_ * u + expand(anchor_);
}

Eigen::VectorXd RescaledSystem::rescaled(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  if (r_ == 0.0) throw PreconditionError("cannot rescale at r = 0");
  return (z - expand(anchor_)) / r_;
}

Evaluation RescaledSystem::eval_F(const Eigen::Ref<const Eigen::VectorXd>& w, Order order) const {
  const Eigen::VectorXd z = w + expand(anchor_);
  return assemble(base_.interaction({.intra_log = false, .cross_log = true, .regular = true}), z,
                  order);
}

Evaluation RescaledSystem::eval_H0(const Eigen::Ref<const Eigen::VectorXd>& u, Order order) const {
  return assemble(base_.interaction({.intra_log = true, .cross_log = false, .regular = false}), u,
                  order);
}

Evaluation RescaledSystem::eval(const Eigen::Ref<const Eigen::VectorXd>& u, Order order) const {
  validate(u);
  Evaluation h0 = eval_H0(u, order);
  const Evaluation f = eval_F(r_ * u, order);
  h0.value += f.value - anchor_energy_;
  if (order >= Order::Gradient) h0.gradient += r_ * f.gradient;
  if (order >= Order::Hessian) h0.hessian += r_ * r_ * f.hessian;
  return h0;
}

void RescaledSystem::validate(const Eigen::Ref<const Eigen::VectorXd>& u,
                              double collision_tolerance, double boundary_margin) const {
  if (u.size() != 2 * base_.size()) {
    throw PreconditionError("rescaled state has wrong dimension");
  }
  // H_0 is singular when two members of one cluster meet in u.
  for (int p = 0; p < base_.size(); ++p) {
    for (int q = p + 1; q < base_.size(); ++q) {
      if (base_.cluster_index()[p] != base_.cluster_index()[q]) continue;
      const double d = (u.segment<2>(2 * p) - u.segment<2>(2 * q)).norm();
      if (!(d >= collision_tolerance)) {
        throw CollisionError("vortices " + std::to_string(p + 1) + " and " +
                                 std::to_string(q + 1) + " collided (rescaled)",
                             p, q);
      }
    }
  }
  if (r_ > 0.0) {
    base_.validate(physical(u), collision_tolerance * std::min(1.0, r_), boundary_margin);
  } else {
    VortexSystem(base_.cluster_sums(), base_.domain_ptr()).validate(anchor_);
  }
}

double rescaled_hamiltonian(const RescaledSystem& rs, const Eigen::Ref<const Eigen::VectorXd>& u) {
  return rs.eval(u, Order::Value).value;
}

Eigen::VectorXd rescaled_vector_field(const RescaledSystem& rs,
                                      const Eigen::Ref<const Eigen::VectorXd>& u) {
  return apply_J(rs.eval(u, Order::Gradient).gradient).cwiseQuotient(rs.base().weights());
}

Eigen::MatrixXd rescaled_field_jacobian(const RescaledSystem& rs,
                                        const Eigen::Ref<const Eigen::VectorXd>& u) {
  const Eigen::MatrixXd jh =
      symplectic_matrix(rs.base().size()) * rs.eval(u, Order::Hessian).hessian;
  return rs.base().weights().cwiseInverse().asDiagonal() * jh;
}

}  // namespace vortexlab
