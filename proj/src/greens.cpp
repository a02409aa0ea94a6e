#include "vortexlab/greens.hpp"

#include "vortexlab/errors.hpp"

#include <cmath>
#include <limits>

namespace vortexlab {
namespace {

class WholePlane final : public Domain {
 public:
  DomainKind kind() const override { return DomainKind::WholePlane; }
  Symmetry symmetry() const override { return {Symmetry::Kind::PlaneFull, Vec2::Zero()}; }
  std::string name() const override { return "plane"; }
  double boundary_distance(const Vec2&) const override {
    return std::numeric_limits<double>::infinity();
  }
  double g(const Vec2&, const Vec2&) const override { return 0.0; }
  std::pair<Vec2, Vec2> grad_g(const Vec2&, const Vec2&) const override {
    return {Vec2::Zero(), Vec2::Zero()};
  }
  Mat4 hess_g(const Vec2&, const Vec2&) const override { return Mat4::Zero(); }
};

class UnitDisc : public Domain {
 public:
  DomainKind kind() const override { return DomainKind::UnitDisc; }
  Symmetry symmetry() const override { return {Symmetry::Kind::Rotational, Vec2::Zero()}; }
  std::string name() const override { return "disc"; }
  double boundary_distance(const Vec2& x) const override { return 1.0 - x.norm(); }

  // Q(x, y) = |x|^2 |y|^2 - 2 <x, y> + 1 = |x|^2 |y - R(x)|^2, positive in
  // the open disc.
  // |x|^2 |y|^2 - 2<x,y> + 1 written as a sum of nonnegative terms.
  static double image_term(const Vec2& x, const Vec2& y) {
    return (x - y).squaredNorm() + (1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm());
  }

  double g(const Vec2& x, const Vec2& y) const override {
    return -std::log(image_term(x, y)) / (4.0 * kPi);
  }

  std::pair<Vec2, Vec2> grad_g(const Vec2& x, const Vec2& y) const override {
    const double q = image_term(x, y);
    const double c = -1.0 / (4.0 * kPi * q);
    return {c * (2.0 * y.squaredNorm() * x - 2.0 * y),
            c * (2.0 * x.squaredNorm() * y - 2.0 * x)};
  }

  Mat4 hess_g(const Vec2& x, const Vec2& y) const override {
    const double q = image_term(x, y);
    Eigen::Vector4d dq;
    dq << 2.0 * y.squaredNorm() * x - 2.0 * y, 2.0 * x.squaredNorm() * y - 2.0 * x;
    Mat4 d2q = Mat4::Zero();
    d2q.topLeftCorner<2, 2>() = 2.0 * y.squaredNorm() * Mat2::Identity();
    d2q.bottomRightCorner<2, 2>() = 2.0 * x.squaredNorm() * Mat2::Identity();
    const Mat2 mixed = 4.0 * x * y.transpose() - 2.0 * Mat2::Identity();
    d2q.topRightCorner<2, 2>() = mixed;
    d2q.bottomLeftCorner<2, 2>() = mixed.transpose();
    return -(d2q / q - dq * dq.transpose() / (q * q)) / (4.0 * kPi);
  }
};

class PerturbedDisc final : public UnitDisc {
 public:
  explicit PerturbedDisc(double eps) : eps_(eps) {}
  DomainKind kind() const override { return DomainKind::Custom; }
  Symmetry symmetry() const override { return {}; }
  std::string name() const override { return "perturbed-disc"; }

  double g(const Vec2& x, const Vec2& y) const override {
    return UnitDisc::g(x, y) + eps_ * p(x) * p(y);
  }
  std::pair<Vec2, Vec2> grad_g(const Vec2& x, const Vec2& y) const override {
    auto [gx, gy] = UnitDisc::grad_g(x, y);
    return {gx + eps_ * p(y) * dp(x), gy + eps_ * p(x) * dp(y)};
  }
  Mat4 hess_g(const Vec2& x, const Vec2& y) const override {
    Mat4 hess = UnitDisc::hess_g(x, y);
    hess.topLeftCorner<2, 2>() += eps_ * p(y) * d2p();
    hess.bottomRightCorner<2, 2>() += eps_ * p(x) * d2p();
    hess.topRightCorner<2, 2>() += eps_ * dp(x) * dp(y).transpose();
    hess.bottomLeftCorner<2, 2>() += eps_ * dp(y) * dp(x).transpose();
    return hess;
  }

 private:
  static double p(const Vec2& x) { return x.x() + x.y() * x.y() + x.x() * x.y(); }
  static Vec2 dp(const Vec2& x) { return {1.0 + x.y(), 2.0 * x.y() + x.x()}; }
  static Mat2 d2p() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 2.0;
    return m;
  }

  double eps_;
};

void require_inside(const Domain& domain, const Vec2& x, int index) {
  if (!domain.contains(x)) {
    throw DomainError("point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                          ") is not interior to the " + domain.name(),
                      index);
  }
}

}  // namespace

DomainPtr whole_plane() {
  static const DomainPtr instance = std::make_shared<WholePlane>();
  return instance;
}

DomainPtr unit_disc() {
  static const DomainPtr instance = std::make_shared<UnitDisc>();
  return instance;
}

DomainPtr perturbed_disc(double eps) { return std::make_shared<PerturbedDisc>(eps); }

double eval_g(const Domain& domain, const Vec2& x, const Vec2& y) {
  require_inside(domain, x, 0);
  require_inside(domain, y, 1);
  return domain.g(x, y);
}

double eval_G(const Domain& domain, const Vec2& x, const Vec2& y) {
  require_inside(domain, x, 0);
  require_inside(domain, y, 1);
  const double d = (x - y).norm();
  if (d == 0.0) throw CollisionError("G is singular at coincident points", 0, 1);
  return -std::log(d) / (2.0 * kPi) - domain.g(x, y);
}

double eval_h(const Domain& domain, const Vec2& x) {
  require_inside(domain, x, 0);
  return domain.g(x, x);
}

std::pair<Vec2, Vec2> grad_g(const Domain& domain, const Vec2& x, const Vec2& y) {
  require_inside(domain, x, 0);
  require_inside(domain, y, 1);
  return domain.grad_g(x, y);
}

Mat4 hess_g(const Domain& domain, const Vec2& x, const Vec2& y) {
  require_inside(domain, x, 0);
  require_inside(domain, y, 1);
  return domain.hess_g(x, y);
}

}  // namespace vortexlab
