#include "dqdmp/quat.hpp"

#include <algorithm>
#include <cmath>

namespace dqdmp {

double Quaternion::norm() const { return std::sqrt(squared_norm()); }

Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.eta + b.eta, a.eps + b.eps};
}

Quaternion operator-(const Quaternion& a, const Quaternion& b) {
  return {a.eta - b.eta, a.eps - b.eps};
}

Quaternion operator-(const Quaternion& q) { return {-q.eta, -q.eps}; }

Quaternion operator*(double s, const Quaternion& q) {
  return {s * q.eta, s * q.eps};
}

Quaternion operator*(const Quaternion& q, double s) { return s * q; }

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.eta * b.eta - a.eps.dot(b.eps),
          a.eta * b.eps + b.eta * a.eps + a.eps.cross(b.eps)};
}

double dot(const Quaternion& a, const Quaternion& b) {
  return a.eta * b.eta + a.eps.dot(b.eps);
}

Quaternion conjugate(const Quaternion& q) { return {q.eta, -q.eps}; }

UnitQuaternion UnitQuaternion::normalized(const Quaternion& q) {
  // Values already unit to rounding are kept bit-for-bit so that
  // normalization is idempotent.
  if (std::abs(q.squared_norm() - 1.0) <= 1e-15) return UnitQuaternion(q);
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ConstraintViolation("cannot normalize a zero or non-finite quaternion");
  }
  return UnitQuaternion(Quaternion{q.eta / n, q.eps / n});
}

UnitQuaternion UnitQuaternion::from_unit(const Quaternion& q, double tol) {
  const double n = q.norm();
  if (!(std::abs(n - 1.0) <= tol)) {
    throw ConstraintViolation("quaternion norm " + std::to_string(n) +
                              " is not unit");
  }
  return normalized(q);
}

UnitQuaternion UnitQuaternion::operator-() const { return UnitQuaternion(-q_); }

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion::normalized(a.quat() * b.quat());
}

UnitQuaternion conjugate(const UnitQuaternion& q) {
  return UnitQuaternion::normalized(conjugate(q.quat()));
}

UnitQuaternion quat_exp(const Vec3& r) {
  const double n = r.norm();
  if (n == 0.0) return UnitQuaternion::identity();
  return UnitQuaternion::normalized({std::cos(n), std::sin(n) / n * r});
}

Vec3 quat_log(const UnitQuaternion& q) {
  const double s = q.eps().norm();
  if (s < 1e-12) return Vec3::Zero();
  // atan2 keeps full precision near ‖r‖ = 0 and π where acos does not.
  const double angle = std::atan2(s, std::clamp(q.eta(), -1.0, 1.0));
  return angle / s * q.eps();
}

Vec3 orientation_error(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  return (q1.quat() * conjugate(q2.quat())).eps;
}

Quaternion quat_derivative(const UnitQuaternion& q, const Vec3& omega_body) {
  return {-0.5 * q.eps().dot(omega_body),
          0.5 * (q.eta() * omega_body + q.eps().cross(omega_body))};
}

UnitQuaternion quat_step_body(const UnitQuaternion& q, const Vec3& omega_body,
                              double dt) {
  return q * quat_exp(0.5 * dt * omega_body);
}

UnitQuaternion quat_step_inertial(const UnitQuaternion& q,
                                  const Vec3& omega_inertial, double dt) {
  return quat_exp(0.5 * dt * omega_inertial) * q;
}

Mat3 quat_to_rotmat(const UnitQuaternion& q) {
  const double q0 = q.eta();
  const double q1 = q.eps().x();
  const double q2 = q.eps().y();
  const double q3 = q.eps().z();
  Mat3 m;
  m << q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3, 2 * (q1 * q2 - q0 * q3),
      2 * (q1 * q3 + q0 * q2),  //
      2 * (q1 * q2 + q0 * q3), q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3,
      2 * (q2 * q3 - q0 * q1),  //
      2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1),
      q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3;
  return m;
}

Vec3 rotate(const UnitQuaternion& q, const Vec3& u) {
  return (q.quat() * Quaternion::pure(u) * conjugate(q.quat())).eps;
}

double geodesic_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  const Quaternion rel = conjugate(a.quat()) * b.quat();
  return 2.0 * std::atan2(rel.eps.norm(), std::abs(rel.eta));
}

UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b,
                     double u) {
  if (u <= 0.0) return a;
  if (u >= 1.0) return b;
  const UnitQuaternion bb = dot(a, b) < 0.0 ? -b : b;
  const Vec3 r = quat_log(conjugate(a) * bb);
  return a * quat_exp(u * r);
}

}  // namespace dqdmp
