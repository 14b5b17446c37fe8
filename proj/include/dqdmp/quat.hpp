#pragma once

// Hamilton quaternion algebra, scalar-first [eta, eps1, eps2, eps3].

#include "dqdmp/types.hpp"

namespace dqdmp {

struct Quaternion {
  double eta{1.0};
  Vec3 eps{Vec3::Zero()};

  Quaternion() = default;
  Quaternion(double eta_, const Vec3& eps_) : eta(eta_), eps(eps_) {}
  Quaternion(double w, double x, double y, double z) : eta(w), eps(x, y, z) {}

  static Quaternion identity() { return {}; }
  static Quaternion zero() { return {0.0, Vec3::Zero()}; }
  /// Pure quaternion [0, v].
  static Quaternion pure(const Vec3& v) { return {0.0, v}; }
  static Quaternion from_coeffs(const Vec4& c) { return {c[0], c.tail<3>()}; }

  Vec4 coeffs() const { return {eta, eps.x(), eps.y(), eps.z()}; }
  double squared_norm() const { return eta * eta + eps.squaredNorm(); }
  double norm() const;
};

Quaternion operator+(const Quaternion& a, const Quaternion& b);
Quaternion operator-(const Quaternion& a, const Quaternion& b);
Quaternion operator-(const Quaternion& q);
Quaternion operator*(double s, const Quaternion& q);
Quaternion operator*(const Quaternion& q, double s);

/// Hamilton product [η1η2 − ε1·ε2, η1ε2 + η2ε1 + ε1×ε2].
Quaternion operator*(const Quaternion& a, const Quaternion& b);

/// 4-vector inner product.
double dot(const Quaternion& a, const Quaternion& b);

Quaternion conjugate(const Quaternion& q);

/// A quaternion of unit norm (|‖q‖² − 1| ≤ 1e-9).
///
/// Constructed only through `normalized` (projects any non-zero quaternion)
/// or `from_unit` (accepts an already-unit quaternion, rejects otherwise).
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion normalized(const Quaternion& q);
  /// Throws ConstraintViolation when |‖q‖ − 1| > tol; renormalizes otherwise.
  static UnitQuaternion from_unit(const Quaternion& q, double tol = 1e-9);

  const Quaternion& quat() const { return q_; }
  operator const Quaternion&() const { return q_; }  // NOLINT
  double eta() const { return q_.eta; }
  const Vec3& eps() const { return q_.eps; }
  Vec4 coeffs() const { return q_.coeffs(); }

  UnitQuaternion operator-() const;

 private:
  explicit UnitQuaternion(const Quaternion& q) : q_(q) {}
  Quaternion q_;
};

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);
UnitQuaternion conjugate(const UnitQuaternion& q);

/// exp(r) = [cos‖r‖, sin‖r‖ r/‖r‖], identity at r = 0.
///
/// Half-angle convention: the result rotates by 2‖r‖ about r/‖r‖. A full
/// rotation angle θ about axis n is therefore quat_exp(θ/2 · n).
UnitQuaternion quat_exp(const Vec3& r);

/// Principal-branch inverse of quat_exp, ‖result‖ ∈ [0, π].
/// Returns zero when ‖ε‖ < 1e-12.
Vec3 quat_log(const UnitQuaternion& q);

/// Vector part ε.
inline const Vec3& quat_vec(const Quaternion& q) { return q.eps; }

/// e_o(q1, q2) = vec(q1 ⊗ q2*).
Vec3 orientation_error(const UnitQuaternion& q1, const UnitQuaternion& q2);

/// q̇ = ½ q ⊗ [0, ω] for a body-frame angular velocity.
Quaternion quat_derivative(const UnitQuaternion& q, const Vec3& omega_body);

/// q ⊗ exp(dt/2 · ω), exact for constant body-frame ω.
UnitQuaternion quat_step_body(const UnitQuaternion& q, const Vec3& omega_body,
                              double dt);

/// exp(dt/2 · ω) ⊗ q, exact for constant inertial-frame ω.
UnitQuaternion quat_step_inertial(const UnitQuaternion& q,
                                  const Vec3& omega_inertial, double dt);

/// Body-to-inertial rotation matrix.
Mat3 quat_to_rotmat(const UnitQuaternion& q);

/// vec(q ⊗ [0, u] ⊗ q*).
Vec3 rotate(const UnitQuaternion& q, const Vec3& u);

/// Rotation angle between two orientations, in [0, π], insensitive to sign.
double geodesic_distance(const UnitQuaternion& a, const UnitQuaternion& b);

/// Shortest-arc interpolation, u ∈ [0, 1].
UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double u);

}  // namespace dqdmp
