#include "dqdmp/dualquat.hpp"

#include <cmath>
#include <numbers>

namespace dqdmp {

DualQuaternion operator+(const DualQuaternion& a, const DualQuaternion& b) {
  return {a.real + b.real, a.dual + b.dual};
}

DualQuaternion operator*(double s, const DualQuaternion& q) {
  return {s * q.real, s * q.dual};
}

DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b) {
  return {a.real * b.real, a.real * b.dual + a.dual * b.real};
}

DualQuaternion conjugate(const DualQuaternion& q) {
  return {conjugate(q.real), conjugate(q.dual)};
}

UnitDualQuaternion UnitDualQuaternion::normalized(const DualQuaternion& q) {
  // Already unit to rounding: keep the bits so normalization is idempotent.
  if (std::abs(q.real.squared_norm() - 1.0) <= 1e-15 &&
      std::abs(dot(q.real, q.dual)) <= 1e-15 * (1.0 + q.dual.norm())) {
    return UnitDualQuaternion(q);
  }
  const double n = q.real.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ConstraintViolation("dual quaternion has a zero or non-finite real part");
  }
  const Quaternion real = (1.0 / n) * q.real;
  Quaternion dual = (1.0 / n) * q.dual;
  dual = dual - dot(real, dual) * real;
  return UnitDualQuaternion({real, dual});
}

UnitDualQuaternion UnitDualQuaternion::checked(const DualQuaternion& q, double tol) {
  const double norm_err = std::abs(q.real.norm() - 1.0);
  const double ortho_err = std::abs(dot(q.real, q.dual));
  if (!(norm_err <= tol) || !(ortho_err <= tol)) {
    throw ConstraintViolation("unit dual quaternion constraints violated (|‖q_o‖-1| = " +
                              std::to_string(norm_err) + ", |<q_o,q_p>| = " +
                              std::to_string(ortho_err) + ")");
  }
  return normalized(q);
}

UnitDualQuaternion operator*(const UnitDualQuaternion& a,
                             const UnitDualQuaternion& b) {
  return UnitDualQuaternion::normalized(a.dq() * b.dq());
}

UnitDualQuaternion conjugate(const UnitDualQuaternion& q) {
  return UnitDualQuaternion::normalized(conjugate(q.dq()));
}

UnitDualQuaternion dq_from_pose(const Pose& pose) {
  const Vec3 p_b = position_in_body(pose);
  const Quaternion& q = pose.orientation;
  return UnitDualQuaternion::normalized({q, 0.5 * (q * Quaternion::pure(p_b))});
}

Pose dq_to_pose(const DualQuaternion& dq) {
  const UnitDualQuaternion u = UnitDualQuaternion::checked(dq);
  Pose pose;
  pose.orientation = u.real();
  const Vec3 p_b = (2.0 * (conjugate(u.dq().real) * u.dual())).eps;
  pose.position = rotate(pose.orientation, p_b);
  return pose;
}

Vec6 dq_error(const UnitDualQuaternion& dq, const UnitDualQuaternion& dq_goal,
              RotationError mode) {
  const UnitDualQuaternion e = conjugate(dq) * dq_goal;
  const Vec3 p_e = (2.0 * (conjugate(e.dq().real) * e.dual())).eps;
  Vec6 out;
  out.head<3>() = mode == RotationError::Vec ? e.dq().real.eps : quat_log(e.real());
  out.tail<3>() = p_e;
  return out;
}

namespace {

// Coefficients of the exponential's dual part,
//   dual = [-a (r·v), a v + b (r·v) r],  a = sin θ / θ,  b = (cos θ - a) / θ².
struct ExpCoeffs {
  double a;
  double b;
};

ExpCoeffs exp_coeffs(double theta) {
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0, -1.0 / 3.0 + t2 / 30.0};
  }
  const double a = std::sin(theta) / theta;
  return {a, (std::cos(theta) - a) / (theta * theta)};
}

}  // namespace

UnitDualQuaternion dq_exp(const Vec6& xi) {
  const Vec3 r = xi.head<3>();
  const Vec3 v = xi.tail<3>();
  const double theta = r.norm();
  if (theta == 0.0 && v.isZero(0.0)) return UnitDualQuaternion::identity();
  const ExpCoeffs c = exp_coeffs(theta);
  const double rv = r.dot(v);
  DualQuaternion out;
  out.real = quat_exp(r).quat();
  out.dual = Quaternion{-c.a * rv, c.a * v + c.b * rv * r};
  return UnitDualQuaternion::normalized(out);
}

Vec6 dq_log(const UnitDualQuaternion& dq) {
  const Vec3 r = quat_log(dq.real());
  const double theta = r.norm();
  if (theta > std::numbers::pi - 1e-6) {
    throw InvalidArgument("dq_log: rotation is within 1e-6 of the ‖r‖ = π branch cut");
  }
  const ExpCoeffs c = exp_coeffs(theta);
  const Quaternion& d = dq.dual();
  const double rv = std::cos(theta) * r.dot(d.eps) - theta * std::sin(theta) * d.eta;
  Vec6 out;
  out.head<3>() = r;
  out.tail<3>() = (d.eps - c.b * rv * r) / c.a;
  return out;
}

DualQuaternion dq_derivative_body(const UnitDualQuaternion& dq, const Twist& xi) {
  if (xi.frame != Frame::Body) {
    throw FrameMismatch("dq_derivative_body expects a body-frame twist");
  }
  return 0.5 * (dq.dq() * xi.lifted());
}

DualQuaternion dq_derivative_inertial(const UnitDualQuaternion& dq,
                                      const Twist& xi) {
  if (xi.frame != Frame::Inertial) {
    throw FrameMismatch("dq_derivative_inertial expects an inertial-frame twist");
  }
  return 0.5 * (xi.lifted() * dq.dq());
}

Twist twist_body_from_demo(const Vec3& omega_b, const Vec3& p_b,
                           const Vec3& p_b_dot) {
  return {omega_b, p_b_dot + omega_b.cross(p_b), Frame::Body};
}

Twist twist_inertial_from_demo(const Vec3& omega_s, const Vec3& p_s,
                               const Vec3& p_s_dot) {
  return {omega_s, p_s_dot + p_s.cross(omega_s), Frame::Inertial};
}

Twist twist_to_inertial(const UnitDualQuaternion& dq, const Twist& xi_body) {
  if (xi_body.frame != Frame::Body) {
    throw FrameMismatch("twist_to_inertial expects a body-frame twist");
  }
  const Pose pose = dq_to_pose(dq);
  const Mat3 rot = quat_to_rotmat(pose.orientation);
  const Vec3 omega_s = rot * xi_body.r;
  return twist_inertial_from_demo(omega_s, pose.position, rot * xi_body.v);
}

Twist twist_to_body(const UnitDualQuaternion& dq, const Twist& xi_inertial) {
  if (xi_inertial.frame != Frame::Inertial) {
    throw FrameMismatch("twist_to_body expects an inertial-frame twist");
  }
  const Pose pose = dq_to_pose(dq);
  const Mat3 rot_t = quat_to_rotmat(pose.orientation).transpose();
  const Vec3 p_dot = xi_inertial.v - pose.position.cross(xi_inertial.r);
  return {rot_t * xi_inertial.r, rot_t * p_dot, Frame::Body};
}

UnitDualQuaternion dq_step_body(const UnitDualQuaternion& dq, const Twist& xi,
                                double dt) {
  if (xi.frame != Frame::Body) {
    throw FrameMismatch("dq_step_body expects a body-frame twist");
  }
  return dq * dq_exp(0.5 * dt * xi.vector());
}

}  // namespace dqdmp
