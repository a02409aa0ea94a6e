#pragma once

// Planar domains and the regular part g of their Green's functions.
//
//   G(x, y) = -1/(2 pi) log|x - y| - g(x, y),      h(x) = g(x, x).
//
// A Domain owns g and its analytic first and second derivatives. The
// whole plane has g = 0; the unit disc uses the Dirichlet image formula
//
//   g(x, y) = -1/(4 pi) log(|x|^2 |y|^2 - 2 <x, y> + 1).

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <utility>

namespace vortexlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Points closer than this to the boundary are rejected.
inline constexpr double kBoundaryMargin = 1e-9;

enum class DomainKind { WholePlane, UnitDisc, Custom };

/// Invariance class of (Omega, g), used to classify degenerate critical
/// points.
struct Symmetry {
  enum class Kind { None, Rotational, Translational, PlaneFull };
  Kind kind = Kind::None;
  Vec2 direction = Vec2::Zero();  // unit vector, Translational only
};

class Domain {
 public:
  virtual ~Domain() = default;

  virtual DomainKind kind() const = 0;
  virtual Symmetry symmetry() const = 0;
  virtual std::string name() const = 0;

  /// Distance from x to the boundary (+inf for the plane, negative outside).
  virtual double boundary_distance(const Vec2& x) const = 0;

  // Unchecked evaluations; callers validate points first.
  virtual double g(const Vec2& x, const Vec2& y) const = 0;
  virtual std::pair<Vec2, Vec2> grad_g(const Vec2& x, const Vec2& y) const = 0;
  /// Block matrix [d2g/dx2, d2g/dxdy; d2g/dydx, d2g/dy2], rows and columns
  /// ordered (x1, x2, y1, y2).
  virtual Mat4 hess_g(const Vec2& x, const Vec2& y) const = 0;

  bool contains(const Vec2& x, double margin = kBoundaryMargin) const {
    return boundary_distance(x) > margin;
  }
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr whole_plane();
DomainPtr unit_disc();

/// Unit disc with g replaced by g + eps p(x) p(y), p(x) = x1 + x2^2 + x1 x2.
/// Breaks the rotational symmetry while keeping g symmetric; used to emulate
/// a generic domain whose critical points are nondegenerate.
DomainPtr perturbed_disc(double eps = 1e-2);

// Checked entry points. Throw DomainError for points outside the domain and
// CollisionError when eval_G is asked for x == y.
double eval_g(const Domain& domain, const Vec2& x, const Vec2& y);
double eval_G(const Domain& domain, const Vec2& x, const Vec2& y);
double eval_h(const Domain& domain, const Vec2& x);
std::pair<Vec2, Vec2> grad_g(const Domain& domain, const Vec2& x, const Vec2& y);
Mat4 hess_g(const Domain& domain, const Vec2& x, const Vec2& y);

/// Counterclockwise rotation by theta.
inline Mat2 rotation(double theta) {
  Mat2 r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace vortexlab
