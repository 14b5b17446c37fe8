#pragma once

// Dual quaternion algebra on SE(3): q̂ = q_o + ε q_p, ε² = 0.
//
// A pose (p^s, q) is encoded as q_o = q, q_p = ½ q ⊗ [0, p^b], where p^b is the
// inertial position expressed in body axes.

#include "dqdmp/quat.hpp"

namespace dqdmp {

struct DualQuaternion {
  Quaternion real{Quaternion::identity()};
  Quaternion dual{Quaternion::zero()};

  static DualQuaternion identity() { return {}; }
  static DualQuaternion zero() { return {Quaternion::zero(), Quaternion::zero()}; }
};

DualQuaternion operator+(const DualQuaternion& a, const DualQuaternion& b);
DualQuaternion operator*(double s, const DualQuaternion& q);
/// q_o1 ⊗ q_o2 + ε (q_o1 ⊗ q_p2 + q_p1 ⊗ q_o2).
DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b);
/// q_o* + ε q_p*.
DualQuaternion conjugate(const DualQuaternion& q);

/// Dual quaternion satisfying ‖q_o‖ = 1 and ⟨q_o, q_p⟩ = 0 (to 1e-9).
class UnitDualQuaternion {
 public:
  UnitDualQuaternion() = default;

  static UnitDualQuaternion identity() { return {}; }

  /// Projects onto the unit constraints: q_o is scaled to unit norm (q_p with
  /// it), then the q_o component of q_p is removed.
  static UnitDualQuaternion normalized(const DualQuaternion& q);

  /// Throws ConstraintViolation when either constraint is off by more than
  /// `tol`; otherwise returns the projected value.
  static UnitDualQuaternion checked(const DualQuaternion& q, double tol = 1e-6);

  const DualQuaternion& dq() const { return q_; }
  operator const DualQuaternion&() const { return q_; }  // NOLINT
  UnitQuaternion real() const { return UnitQuaternion::normalized(q_.real); }
  const Quaternion& dual() const { return q_.dual; }

 private:
  explicit UnitDualQuaternion(const DualQuaternion& q) : q_(q) {}
  DualQuaternion q_;
};

UnitDualQuaternion operator*(const UnitDualQuaternion& a,
                             const UnitDualQuaternion& b);
UnitDualQuaternion conjugate(const UnitDualQuaternion& q);

/// Rigid-body velocity (spinor) ξ = r + ε v with an explicit frame tag.
struct Twist {
  Vec3 r{Vec3::Zero()};  // angular, rad/s
  Vec3 v{Vec3::Zero()};  // linear, m/s
  Frame frame{Frame::Body};

  static Twist zero(Frame f = Frame::Body) { return {Vec3::Zero(), Vec3::Zero(), f}; }
  static Twist from_vector(const Vec6& x, Frame f) {
    return {x.head<3>(), x.tail<3>(), f};
  }
  Vec6 vector() const {
    Vec6 x;
    x << r, v;
    return x;
  }
  /// Pure dual quaternion [0, r] + ε [0, v].
  DualQuaternion lifted() const { return {Quaternion::pure(r), Quaternion::pure(v)}; }
};

struct Pose {
  Vec3 position{Vec3::Zero()};  // inertial frame, m
  UnitQuaternion orientation;   // body to inertial
};

UnitDualQuaternion dq_from_pose(const Pose& pose);

/// Throws ConstraintViolation when `dq` violates the unit constraints by more
/// than 1e-6.
Pose dq_to_pose(const DualQuaternion& dq);

/// Selects how the rotational part of dq_error is formed from q_oe.
enum class RotationError {
  Vec,  // vec(q_oe)
  Log,  // quat_log(q_oe)
};

/// [rotation error of q_oe, vec(p_e)] for q̂_e = q̂* ⊗ q̂_d and
/// p_e = 2 q_oe* ⊗ q_pe.
Vec6 dq_error(const UnitDualQuaternion& dq, const UnitDualQuaternion& dq_goal,
              RotationError mode = RotationError::Vec);

/// Exponential of a screw displacement ξ = [r, v].
///
/// The real part is quat_exp(r). The dual part is exact for SE(3): the result
/// equals the displacement reached after unit time under a constant body
/// twist (2r, 2v), so q̂ ⊗ dq_exp(dt/2 · ξ) integrates q̂̇ = ½ q̂ ⊗ ξ̃ exactly
/// over dt. Requires ‖r‖ < π.
UnitDualQuaternion dq_exp(const Vec6& xi);

/// Inverse of dq_exp. Throws InvalidArgument within 1e-6 of ‖r‖ = π.
Vec6 dq_log(const UnitDualQuaternion& dq);

/// ½ q̂ ⊗ ξ̃^b. Throws FrameMismatch unless `xi` is body-frame.
DualQuaternion dq_derivative_body(const UnitDualQuaternion& dq, const Twist& xi);

/// ½ ξ̃^s ⊗ q̂. Throws FrameMismatch unless `xi` is inertial-frame.
DualQuaternion dq_derivative_inertial(const UnitDualQuaternion& dq,
                                      const Twist& xi);

/// Body twist from body-frame angular velocity, position and its rate:
/// r = ω^b, v = ṗ^b + ω^b × p^b (the body-frame linear velocity).
Twist twist_body_from_demo(const Vec3& omega_b, const Vec3& p_b, const Vec3& p_b_dot);

/// Inertial twist: r = ω^s, v = ṗ^s + p^s × ω^s.
Twist twist_inertial_from_demo(const Vec3& omega_s, const Vec3& p_s,
                               const Vec3& p_s_dot);

/// Re-expresses a twist in the other frame at pose `dq`.
Twist twist_to_inertial(const UnitDualQuaternion& dq, const Twist& xi_body);
Twist twist_to_body(const UnitDualQuaternion& dq, const Twist& xi_inertial);

/// q̂ ⊗ dq_exp(dt/2 · ξ^b), renormalized.
UnitDualQuaternion dq_step_body(const UnitDualQuaternion& dq, const Twist& xi,
                                double dt);

/// Body-frame position p^b = vec(q* ⊗ [0, p^s] ⊗ q).
inline Vec3 position_in_body(const Pose& pose) {
  return rotate(conjugate(pose.orientation), pose.position);
}

}  // namespace dqdmp
