#include <cmath>

#include "doctest.h"
#include "test_support.hpp"

using namespace dqdmp;
using namespace dqdmp::test;

namespace {

Pose translation(const Vec3& p) { return {p, UnitQuaternion::identity()}; }

// Fixed-step RK4 on q̂̇ = ½ q̂ ⊗ ξ̃ (constant body twist), renormalized at the end.
DualQuaternion integrate_body(DualQuaternion q, const Twist& xi, double duration, int steps) {
  const double h = duration / steps;
  const DualQuaternion w = xi.lifted();
  const auto f = [&](const DualQuaternion& s) { return 0.5 * (s * w); };
  for (int i = 0; i < steps; ++i) {
    const DualQuaternion k1 = f(q);
    const DualQuaternion k2 = f(q + (0.5 * h) * k1);
    const DualQuaternion k3 = f(q + (0.5 * h) * k2);
    const DualQuaternion k4 = f(q + h * k3);
    q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return q;
}

}  // namespace

TEST_CASE("pose conversion") {
  const UnitDualQuaternion id = dq_from_pose(Pose{});
  CHECK(max_abs(id, DualQuaternion::identity()) == 0.0);
  const UnitDualQuaternion t = dq_from_pose(translation(Vec3(2, 0, 0)));
  CHECK(t.dual().coeffs() == Vec4(0, 1, 0, 0));
  CHECK(dq_to_pose(t).position == Vec3(2, 0, 0));
  CHECK(dq_to_pose(DualQuaternion::identity()).position == Vec3::Zero());

  std::mt19937_64 rng(11);
  for (int n = 0; n < 1000; ++n) {
    const Pose p = random_pose(rng, 100.0);
    const Pose back = dq_to_pose(dq_from_pose(p));
    CHECK((back.position - p.position).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(max_abs(back.orientation, p.orientation) <= 1e-12);
    const UnitDualQuaternion dq = dq_from_pose(p);
    CHECK(std::abs(dq.dq().real.norm() - 1.0) <= 1e-9);
    CHECK(std::abs(dot(dq.dq().real, dq.dq().dual)) <= 1e-9);
  }
  CHECK_THROWS_AS(dq_to_pose(DualQuaternion{{0.5, Vec3::Zero()}, Quaternion::zero()}),
                  ConstraintViolation);
}

TEST_CASE("dual quaternion algebra") {
  std::mt19937_64 rng(12);
  const UnitDualQuaternion a = dq_from_pose(random_pose(rng, 5.0));
  CHECK(max_abs(DualQuaternion::identity() * a.dq(), a.dq()) == 0.0);
  CHECK(max_abs(conjugate(conjugate(a.dq())), a.dq()) == 0.0);
  CHECK(max_abs(conjugate(DualQuaternion::identity()), DualQuaternion::identity()) == 0.0);
  CHECK(max_abs(a.dq() + DualQuaternion::zero(), a.dq()) == 0.0);
  CHECK(max_abs(a.dq() + (-1.0) * a.dq(), DualQuaternion::zero()) == 0.0);
  const UnitDualQuaternion b = dq_from_pose(random_pose(rng, 5.0));
  CHECK(max_abs((a.dq() + b.dq()).real, a.dq().real + b.dq().real) == 0.0);

  // Translation [1,0,0] then [0,1,0].
  const Pose composed = dq_to_pose(dq_from_pose(translation(Vec3::UnitX())) *
                                   dq_from_pose(translation(Vec3::UnitY())));
  CHECK((composed.position - Vec3(1, 1, 0)).norm() <= 1e-15);

  for (int n = 0; n < 1000; ++n) {
    const UnitDualQuaternion q = dq_from_pose(random_pose(rng, 50.0));
    CHECK(max_abs(q.dq() * conjugate(q.dq()), DualQuaternion::identity()) <= 1e-12);
    // Composition matches pose composition: p = p1 + R1 p2, q = q1 q2.
    const Pose p1 = random_pose(rng, 10.0), p2 = random_pose(rng, 10.0);
    const Pose c = dq_to_pose(dq_from_pose(p1) * dq_from_pose(p2));
    CHECK((c.position - (p1.position + rotate(p1.orientation, p2.position))).norm() <= 1e-12);
    CHECK(geodesic_distance(c.orientation, p1.orientation * p2.orientation) <= 1e-7);
  }
}

TEST_CASE("normalization") {
  std::mt19937_64 rng(13);
  const UnitDualQuaternion q = dq_from_pose(random_pose(rng, 5.0));
  const DualQuaternion off{2.0 * q.dq().real, 2.0 * q.dq().dual + 0.1 * q.dq().real};
  const UnitDualQuaternion n = UnitDualQuaternion::normalized(off);
  CHECK(std::abs(n.dq().real.norm() - 1.0) <= 1e-15);
  CHECK(std::abs(dot(n.dq().real, n.dq().dual)) <= 1e-15);
  CHECK(max_abs(UnitDualQuaternion::normalized(q).dq(), q.dq()) == 0.0);
  CHECK_THROWS_AS(UnitDualQuaternion::checked(off), ConstraintViolation);
}

TEST_CASE("pose error") {
  std::mt19937_64 rng(14);
  const UnitDualQuaternion q = dq_from_pose(random_pose(rng, 5.0));
  CHECK(dq_error(q, q).norm() <= 1e-15);
  Vec6 expected;
  expected << 0, 0, 0, 1, 0, 0;
  CHECK((dq_error(UnitDualQuaternion::identity(), dq_from_pose(translation(Vec3::UnitX()))) -
         expected).norm() <= 1e-15);
  // Translation block is the body-frame position of the relative transform
  // a⁻¹g, i.e. the displacement g - a in the goal's axes.
  for (int n = 0; n < 100; ++n) {
    const Pose a = random_pose(rng, 10.0), g = random_pose(rng, 10.0);
    const Vec6 e = dq_error(dq_from_pose(a), dq_from_pose(g));
    const Vec3 p_rel = rotate(conjugate(g.orientation), g.position - a.position);
    CHECK((e.tail<3>() - p_rel).norm() <= 1e-12);
    // Sign flip of the orientation leaves the implied pose of the error unchanged.
    const Pose flipped{a.position, -a.orientation};
    const Vec6 ef = dq_error(dq_from_pose(flipped), dq_from_pose(g));
    CHECK((ef.tail<3>() - e.tail<3>()).norm() <= 1e-12);
    // Log mode: rotation block is the relative rotation vector (half angle).
    const Vec6 el = dq_error(dq_from_pose(a), dq_from_pose(g), RotationError::Log);
    CHECK((el.head<3>() - quat_log(conjugate(a.orientation) * g.orientation)).norm() <= 1e-12);
  }
}

TEST_CASE("screw exponential and logarithm") {
  CHECK(max_abs(dq_exp(Vec6::Zero()), DualQuaternion::identity()) == 0.0);
  CHECK(dq_log(UnitDualQuaternion::identity()).norm() == 0.0);
  Vec6 t;
  t << 0, 0, 0, 1, 0, 0;
  CHECK((dq_to_pose(dq_exp(t)).position - Vec3(2, 0, 0)).norm() <= 1e-15);
  const UnitDualQuaternion pure = dq_from_pose(translation(Vec3(4, -2, 6)));
  Vec6 expected;
  expected << 0, 0, 0, 2, -1, 3;
  CHECK((dq_log(pure) - expected).norm() <= 1e-15);

  std::mt19937_64 rng(15);
  for (int n = 0; n < 1000; ++n) {
    Vec6 xi;
    xi << random_ball(rng, M_PI - 0.1), random_vec(rng, 10.0);
    CHECK((dq_log(dq_exp(xi)) - xi).cwiseAbs().maxCoeff() <= 1e-9);
  }
  // Small-angle branch stays continuous with the closed form.
  for (double s : {1e-12, 1e-8, 1e-5, 9.9e-5, 1.01e-4, 1e-3}) {
    Vec6 xi;
    xi << s * Vec3(0.6, -0.8, 0).normalized(), Vec3(1.5, 2.0, -0.5);
    CHECK((dq_log(dq_exp(xi)) - xi).cwiseAbs().maxCoeff() <= 1e-12);
  }
  const Pose near_cut{Vec3(1, 0, 0), quat_exp(Vec3(0, 0, M_PI - 1e-7))};
  CHECK_THROWS_AS(dq_log(dq_from_pose(near_cut)), InvalidArgument);
}

TEST_CASE("screw exponential against integration of the body kinematics") {
  std::mt19937_64 rng(16);
  for (int n = 0; n < 50; ++n) {
    const Pose p = random_pose(rng, 5.0);
    const Twist xi{random_vec(rng, 2.0), random_vec(rng, 5.0), Frame::Body};
    const double dt = 0.7;
    const DualQuaternion oracle = integrate_body(dq_from_pose(p), xi, dt, 2000);
    const UnitDualQuaternion stepped = dq_step_body(dq_from_pose(p), xi, dt);
    CHECK(max_abs(stepped, oracle) <= 1e-9);
  }
}

TEST_CASE("kinematics in both frames") {
  std::mt19937_64 rng(17);
  const UnitDualQuaternion q = dq_from_pose(random_pose(rng, 5.0));
  CHECK(max_abs(dq_derivative_body(q, Twist::zero()), DualQuaternion::zero()) == 0.0);
  const Twist xi{Vec3(1, 2, 3), Vec3(4, 5, 6), Frame::Body};
  const DualQuaternion d = dq_derivative_body(UnitDualQuaternion::identity(), xi);
  CHECK(d.real.coeffs() == Vec4(0, 0.5, 1, 1.5));
  CHECK(d.dual.coeffs() == Vec4(0, 2, 2.5, 3));
  CHECK_THROWS_AS(dq_derivative_body(q, Twist::zero(Frame::Inertial)), FrameMismatch);
  CHECK_THROWS_AS(dq_derivative_inertial(q, Twist::zero(Frame::Body)), FrameMismatch);
  CHECK_THROWS_AS(dq_step_body(q, Twist::zero(Frame::Inertial), 0.1), FrameMismatch);

  for (int n = 0; n < 1000; ++n) {
    const UnitDualQuaternion s = dq_from_pose(random_pose(rng, 50.0));
    const Twist xb{random_vec(rng, 3.0), random_vec(rng, 20.0), Frame::Body};
    const DualQuaternion body = dq_derivative_body(s, xb);
    const Twist xs = twist_to_inertial(s, xb);
    CHECK(max_abs(body, dq_derivative_inertial(s, xs)) <= 1e-9);
    // Independent oracle for the inertial form: ½ ξ̃^s ⊗ q̂ via the sandwich q̂ ξ̃^b q̂*.
    const DualQuaternion sandwich = s.dq() * xb.lifted() * conjugate(s.dq());
    CHECK(max_abs(body, 0.5 * (sandwich * s.dq())) <= 1e-9);
    const Twist back = twist_to_body(s, xs);
    CHECK((back.vector() - xb.vector()).norm() <= 1e-10);
    // Constraint tangency.
    CHECK(std::abs(dot(s.dq().real, body.real)) <= 1e-12);
    CHECK(std::abs(dot(body.real, s.dq().dual) + dot(s.dq().real, body.dual)) <= 1e-12);
  }
}

TEST_CASE("twists from demonstrations") {
  CHECK(twist_body_from_demo(Vec3::Zero(), Vec3::Zero(), Vec3::Zero()).vector().norm() == 0.0);
  CHECK(twist_body_from_demo(Vec3::Zero(), Vec3(1, 2, 3), Vec3(4, 5, 6)).v == Vec3(4, 5, 6));
  // Body linear velocity: ṗ^b + ω × p^b.
  CHECK(twist_body_from_demo(Vec3::UnitZ(), Vec3::UnitX(), Vec3::Zero()).v == Vec3(0, 1, 0));
  CHECK(twist_body_from_demo(Vec3::UnitZ(), Vec3::UnitX(), Vec3::Zero()).frame == Frame::Body);

  // Consistency with the body kinematics: a pose moving with constant body
  // twist has p^b, ṗ^b and ω that reproduce that twist.
  std::mt19937_64 rng(18);
  for (int n = 0; n < 100; ++n) {
    const Pose p = random_pose(rng, 10.0);
    const Twist xi{random_vec(rng, 1.0), random_vec(rng, 5.0), Frame::Body};
    const double h = 1e-5;
    const Pose a = dq_to_pose(dq_step_body(dq_from_pose(p), xi, -h));
    const Pose b = dq_to_pose(dq_step_body(dq_from_pose(p), xi, h));
    const Vec3 pb_dot = (position_in_body(b) - position_in_body(a)) / (2 * h);
    const Twist rebuilt = twist_body_from_demo(xi.r, position_in_body(p), pb_dot);
    CHECK((rebuilt.v - xi.v).norm() <= 1e-6);
    const Vec3 ps_dot = (b.position - a.position) / (2 * h);
    const Vec3 ws = quat_to_rotmat(p.orientation) * xi.r;
    const Twist inertial = twist_inertial_from_demo(ws, p.position, ps_dot);
    CHECK((inertial.vector() - twist_to_inertial(dq_from_pose(p), xi).vector()).norm() <= 1e-6);
  }
}

TEST_CASE("exponential step") {
  std::mt19937_64 rng(19);
  const UnitDualQuaternion q = dq_from_pose(random_pose(rng, 5.0));
  CHECK(max_abs(dq_step_body(q, Twist::zero(), 0.1), q) == 0.0);
  const Twist spin{Vec3(0.3, -0.2, 0.9), Vec3::Zero(), Frame::Body};
  const UnitDualQuaternion r = dq_step_body(UnitDualQuaternion::identity(), spin, 0.5);
  CHECK(max_abs(r.dq().real, quat_step_body(UnitQuaternion::identity(), spin.r, 0.5)) <= 1e-15);
  const Twist xi{random_vec(rng, 1.0), random_vec(rng, 3.0), Frame::Body};
  UnitDualQuaternion fine = q;
  for (int k = 0; k < 100; ++k) fine = dq_step_body(fine, xi, 0.01);
  CHECK(max_abs(fine, dq_step_body(q, xi, 1.0)) <= 1e-9);
}
