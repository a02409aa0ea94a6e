#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "vortexlab/dynamics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/ode.hpp"
#include "vortexlab/stationary.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace vortexlab;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("dopri5 reproduces the exponential and harmonic oscillator") {
  auto decay = [](double, const Eigen::VectorXd& y) -> Eigen::VectorXd { return -y; };
  const OdeResult a = solve_dopri5(decay, vec({1.0}), 0.0, 3.0, {});
  CHECK(a.y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-11));
  auto osc = [](double, const Eigen::VectorXd& y) -> Eigen::VectorXd { return vec({y[1], -y[0]}); };
  const OdeResult b = solve_dopri5(osc, vec({1.0, 0.0}), 0.0, 20.0, {});
  CHECK(b.y[0] == doctest::Approx(std::cos(20.0)).epsilon(1e-10));
  // Dense output between steps.
  for (const auto& seg : b.segments) {
    const double t = seg.t0 + 0.37 * seg.h;
    CHECK(seg.eval(t)[0] == doctest::Approx(std::cos(t)).epsilon(1e-9));
  }
  // Backward integration.
  const OdeResult c = solve_dopri5(osc, vec({1.0, 0.0}), 0.0, -5.0, {});
  CHECK(c.y[0] == doctest::Approx(std::cos(5.0)).epsilon(1e-10));
}

TEST_CASE("single plane vortex stays put") {
  const VortexSystem sys({1.3}, whole_plane());
  const Trajectory tr = integrate(sys, vec({0.4, -2.0}), 0.0, 10.0);
  for (const auto& s : tr.states) CHECK(s == vec({0.4, -2.0}));
}

TEST_CASE("plane pair rotates rigidly at the predicted rate") {
  const double d = 1.0 / std::sqrt(kPi);
  const VortexSystem sys({0.5, 0.5}, whole_plane());
  const Eigen::VectorXd z0 = vec({d / 2, 0, -d / 2, 0});
  const Trajectory tr = integrate(sys, z0, 0.0, 2 * kPi);
  // omega = -1 in exp(omega J t): counterclockwise at unit rate.
  for (double t : {0.5, 1.0, 3.0, 2 * kPi}) {
    CHECK((tr.at(t) - rotate_points(t, z0)).norm() <= 1e-10);
  }
  CHECK(tr.energy_drift() <= 1e-12);
}

TEST_CASE("energy is conserved in the disc") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    const VortexSystem sys(support::random_strengths(rng, 4), unit_disc());
    const Eigen::VectorXd z0 = support::random_state(rng, 4, 0.6, 0.2);
    try {
      const Trajectory tr = integrate(sys, z0, 0.0, 1.0);
      CHECK(tr.energy_drift() <= 1e-9);
    } catch (const GeometryError&) {
      // Random states may legitimately collide.
    }
  }
}

TEST_CASE("energy projection keeps the level set") {
  const VortexSystem sys({1.0, -0.6, 0.8}, unit_disc());
  IntegratorSettings s;
  s.rtol = 1e-7;
  s.atol = 1e-9;
  s.energy_projection = true;
  const Trajectory tr = integrate(sys, vec({0.3, 0.1, -0.2, 0.3, 0.0, -0.4}), 0.0, 2.0, s);
  CHECK(tr.energy_drift() <= 1e-12);
}

TEST_CASE("disc flow commutes with rotations") {
  const VortexSystem sys({1.0, -0.5, 0.7}, unit_disc());
  const Eigen::VectorXd z0 = vec({0.3, 0.1, -0.2, 0.3, 0.0, -0.4});
  const double th = 0.9;
  const Trajectory a = integrate(sys, z0, 0.0, 1.5);
  const Trajectory b = integrate(sys, rotate_points(th, z0), 0.0, 1.5);
  CHECK((rotate_points(th, a.final_state()) - b.final_state()).norm() <= 1e-9);
}

TEST_CASE("collision is reported with vortices and time") {
  // Plane dipole driven through a weak vortex; closest approach is about 0.055.
  const VortexSystem sys({1.0, -1.0, 0.05}, whole_plane());
  IntegratorSettings s;
  s.collision_tolerance = 0.07;
  const Eigen::VectorXd z0 = vec({-0.05, 0.0, 0.05, 0.0, 0.0, 0.5});
  try {
    integrate(sys, z0, 0.0, 4.0, s);
    FAIL("expected a collision");
  } catch (const CollisionError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 4.0);
    CHECK(e.second() == 2);
  }
  s.collision_tolerance = 0.04;
  CHECK_NOTHROW(integrate(sys, z0, 0.0, 4.0, s));
}

TEST_CASE("boundary event is reported") {
  // Disc dipole running into the wall; it settles about 0.051 from the boundary.
  const VortexSystem sys({1.0, -1.0}, unit_disc());
  IntegratorSettings s;
  s.boundary_margin = 0.06;
  const Eigen::VectorXd z0 = vec({0.05, -0.5, -0.05, -0.5});
  try {
    integrate(sys, z0, 0.0, 5.0, s);
    FAIL("expected a boundary event");
  } catch (const DomainError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 5.0);
  }
  s.boundary_margin = 0.04;
  CHECK_NOTHROW(integrate(sys, z0, 0.0, 5.0, s));
}

TEST_CASE("invalid initial states are rejected") {
  const VortexSystem sys({1.0, 1.0}, unit_disc());
  CHECK_THROWS_AS(integrate(sys, vec({0.1, 0.1, 0.1, 0.1}), 0.0, 1.0), CollisionError);
  CHECK_THROWS_AS(integrate(sys, vec({0.1, 0.1, 1.1, 0.1}), 0.0, 1.0), DomainError);
}

TEST_CASE("flow Jacobian matches finite differences of the flow") {
  const VortexSystem sys({1.0, -0.5, 0.7}, unit_disc());
  const FlowModel model = flow_model(sys);
  const Eigen::VectorXd z0 = vec({0.3, 0.1, -0.2, 0.3, 0.0, -0.4});
  const auto [z, W] = flow_with_jacobian(model, z0, 0.7);
  CHECK((z - integrate(sys, z0, 0.0, 0.7).final_state()).norm() <= 1e-10);
  auto flow = [&](const Eigen::VectorXd& x) { return integrate(sys, x, 0.0, 0.7).final_state(); };
  CHECK(support::rel_error(W, support::fd_jacobian(flow, z0, 1e-6)) <= 1e-6);
  const auto [z1, I] = flow_with_jacobian(model, z0, 0.0);
  CHECK(z1 == z0);
  CHECK(I.isIdentity());
}

TEST_CASE("rescaled and physical integrations agree") {
  const double mu = dipole_mu();
  const VortexSystem base({-1.0, -1.0, 1.0, 1.0}, {2, 2}, unit_disc());
  const Eigen::VectorXd anchor = vec({mu, 0.0, -mu, 0.0});
  const double d = std::sqrt(2.0 / kPi);
  const Eigen::VectorXd u0 = vec({d / 2, 0, -d / 2, 0, d / 2, 0, -d / 2, 0});
  for (double r : {0.1, 0.05}) {
    const double dev = check_rescaling_equivalence(base, anchor, r, u0, 2 * kPi * r * r);
    CHECK(dev <= 1e-8);
  }
  CHECK_THROWS_AS(check_rescaling_equivalence(base, anchor, 0.0, u0, 1.0), PreconditionError);
}

TEST_CASE("flow preserves phase-space volume") {
  const VortexSystem sys({1.0, -0.5, 0.7}, unit_disc());
  const auto [z, W] = flow_with_jacobian(flow_model(sys), vec({0.3, 0.1, -0.2, 0.3, 0.0, -0.4}), 1.0);
  CHECK(std::abs(W.determinant() - 1.0) <= 1e-6);
}

TEST_CASE("flow Jacobian matches forward differences on a disc pair") {
  const VortexSystem sys({1.0, 0.5}, unit_disc());
  const Eigen::VectorXd z0 = vec({0.3, 0.1, -0.2, -0.1});
  const auto [z, W] = flow_with_jacobian(flow_model(sys), z0, 1.0);
  Eigen::MatrixXd fd(4, 4);
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd p = z0;
    p[i] += 1e-6;
    fd.col(i) = (integrate(sys, p, 0.0, 1.0).final_state() - z) / 1e-6;
  }
  CHECK(support::rel_error(W, fd) <= 1e-5);
}

TEST_CASE("integrating forward and back returns to the start") {
  const VortexSystem sys({1.0, -0.5, 0.7}, unit_disc());
  const Eigen::VectorXd z0 = vec({0.3, 0.1, -0.2, 0.3, 0.0, -0.4});
  const Eigen::VectorXd z1 = integrate(sys, z0, 0.0, 3.0).final_state();
  CHECK((integrate(sys, z1, 3.0, 0.0).final_state() - z0).norm() <= 1e-8);
}

TEST_CASE("tightening tolerances reduces the error monotonically") {
  const VortexSystem sys({1.0, -0.5, 0.7}, unit_disc());
  const Eigen::VectorXd z0 = vec({0.3, 0.1, -0.2, 0.3, 0.0, -0.4});
  IntegratorSettings ref;
  ref.rtol = ref.atol = 1e-13;
  const Eigen::VectorXd exact = integrate(sys, z0, 0.0, 2.0, ref).final_state();
  double last = INFINITY;
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
    IntegratorSettings s;
    s.rtol = s.atol = tol;
    const double err = (integrate(sys, z0, 0.0, 2.0, s).final_state() - exact).norm();
    CHECK(err < last);
    last = err;
  }
}

TEST_CASE("unit rescaling is a plain shift") {
  const VortexSystem base({0.5, 0.5}, {2}, whole_plane());
  CHECK(check_rescaling_equivalence(base, vec({0.0, 0.0}), 1.0, vec({0.2, 0.0, -0.2, 0.0}), 1.0) <=
        1e-10);
}

TEST_CASE("CSV header and round-trip numbers") {
  const VortexSystem sys({0.5, 0.5}, whole_plane());
  const Trajectory tr = integrate(sys, vec({0.1, 0.0, -0.1, 0.0}), 0.0, 0.1);
  std::ostringstream os;
  write_csv(os, tr);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,x1,y1,x2,y2,H");
  std::string row;
  std::getline(is, row);
  CHECK(row.rfind("0,0.1,0,-0.1,0,", 0) == 0);
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}
