#pragma once

// Dynamic motion primitives: classical (per-dimension scalar), quaternion
// (inertial or body frame) and dual quaternion (body frame), plus the
// pose-decoupled baseline that pairs classical position DMPs with a
// quaternion DMP on a shared phase.
//
// Velocity states are kept in the DMP's scaled time: the integrated state is
// τ·(physical velocity). Samples returned by the rollouts report physical
// velocities.

#include <cmath>
#include <optional>
#include <vector>

#include "dqdmp/canonical.hpp"
#include "dqdmp/traj.hpp"

namespace dqdmp {

// ---------------------------------------------------------------------------
// Gains

/// τż = α_z[β_z(g - y) - z] + f(x).
struct ClassicalGains {
  double alpha_z{25.0};
  double beta_z{6.25};

  /// Spring-damper form K(g - y) - D z, i.e. α_z = D, β_z = K/D.
  static ClassicalGains from_stiffness(double k, double d) { return {d, k / d}; }
  void validate() const;
};

struct RotationGains {
  Mat3 K{Mat3::Identity()};
  Mat3 D{10.0 * Mat3::Identity()};

  static RotationGains scalar(double k, double d);
  /// Throws InvalidArgument unless K, D are symmetric positive definite.
  void validate() const;
};

/// Block-diagonal 6×6 gains: rotation block first, translation block second.
struct PoseGains {
  Mat6 K{Mat6::Identity()};
  Mat6 D{10.0 * Mat6::Identity()};

  static PoseGains scalar(double k_rot, double d_rot, double k_pos, double d_pos);
  Mat3 rotation_stiffness() const { return K.topLeftCorner<3, 3>(); }
  Mat3 translation_stiffness() const { return K.bottomRightCorner<3, 3>(); }
  /// Throws InvalidArgument unless all four blocks are symmetric positive
  /// definite and the off-diagonal blocks vanish.
  void validate() const;
};

/// Damping paired with stiffness k: ratio·√k (ratio 10 by default).
inline double damping_for(double k, double ratio = 10.0) { return ratio * std::sqrt(k); }

/// Source of the velocity and acceleration samples used as training targets.
enum class TargetRates {
  /// Velocities from the pose increments the rollout integrator applies
  /// (ξ_{k+1} = 2/Δt log(q̂_k* ⊗ q̂_{k+1}), ξ̇_k forward difference), so a
  /// rollout at the demo's step size retraces the demo up to the fit residual.
  StepMatched,
  /// The demo's central-difference channels.
  Central,
};

const char* to_string(TargetRates r);
TargetRates target_rates_from_string(const std::string& s);

template <typename Goal>
struct RolloutOptions {
  double dt{0.01};
  double duration{0.0};
  std::optional<Goal> goal;  // re-targets without retraining
  std::optional<double> tau; // re-times without retraining
};

// ---------------------------------------------------------------------------
// Classical

struct ClassicalDmp {
  ClassicalGains gains;
  double tau;
  GaussianBasis basis;
  Eigen::MatrixXd weights;  // N×D
  Eigen::VectorXd y0;
  Eigen::VectorXd goal;

  int dims() const { return static_cast<int>(goal.size()); }
};

/// f_d = τ²ÿ - α_z(β_z(g - y) - τẏ) per sample; rows are samples.
Eigen::MatrixXd classical_target_forcing(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yd,
                                         const Eigen::MatrixXd& ydd,
                                         const Eigen::VectorXd& goal, double tau,
                                         const ClassicalGains& gains);

struct ClassicalTraining {
  ClassicalDmp model;
  WeightFit fit;
};

/// Trains one DMP per column sharing a phase; y0 and the goal are the first
/// and last rows. `dt` is the sample spacing.
ClassicalTraining classical_train(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yd,
                                  const Eigen::MatrixXd& ydd, double dt, double tau,
                                  const ClassicalGains& gains, const GaussianBasis& basis);

/// Step-matched rates replace the demo's ẏ, ÿ (except ẏ at the first sample)
/// with the increments the rollout integrator applies.
ClassicalTraining classical_train(const ScalarDemo& demo, double tau,
                                  const ClassicalGains& gains, const GaussianBasis& basis,
                                  TargetRates rates = TargetRates::StepMatched);

struct ClassicalSample {
  double t;
  double x;
  Eigen::VectorXd y;
  Eigen::VectorXd yd;  // physical rate
  Eigen::VectorXd forcing;
};

/// Semi-implicit Euler: z advances first, then y with the new z.
std::vector<ClassicalSample> classical_rollout(const ClassicalDmp& model,
                                               const Eigen::VectorXd& y0,
                                               const RolloutOptions<Eigen::VectorXd>& opts,
                                               const Eigen::VectorXd* yd0 = nullptr);

// ---------------------------------------------------------------------------
// Quaternion

/// Inertial frame: τq̇ = ½ ω̃ ⊗ q,  error e_o(q_d ⊗ q*).
/// Body frame:     τq̇ = ½ q ⊗ ω̃,  error e_o(q* ⊗ q_d).
/// Both: τω̇ = K[e - d_0(x) + f(x)] - Dω, d_0(x) = e(q_0, q_d)·x.
struct QuaternionDmp {
  Frame frame;
  RotationGains gains;
  double tau;
  GaussianBasis basis;
  Eigen::MatrixXd weights;  // N×3
  UnitQuaternion q0;
  UnitQuaternion goal;
};

/// Attractor error for the given frame convention.
Vec3 quat_attractor_error(Frame frame, const UnitQuaternion& q, const UnitQuaternion& goal);

/// f_d = K⁻¹(τ²ω̇ + τDω) - e + d_0(x) per sample. ω, ω̇ are physical and
/// expressed in `frame`.
std::vector<Vec3> quat_target_forcing(const std::vector<UnitQuaternion>& q,
                                      const std::vector<Vec3>& omega,
                                      const std::vector<Vec3>& omega_rate, double dt,
                                      Frame frame, const RotationGains& gains, double tau,
                                      double alpha_x, const UnitQuaternion& q0,
                                      const UnitQuaternion& goal);

struct QuaternionTraining {
  QuaternionDmp model;
  WeightFit fit;
};

/// `demo` must be differentiated. Body angular rates are rotated into the
/// inertial frame when `frame` is Inertial.
QuaternionTraining quat_train(const Trajectory& demo, Frame frame, const RotationGains& gains,
                              double tau, const GaussianBasis& basis,
                              TargetRates rates = TargetRates::StepMatched);

struct QuaternionSample {
  double t;
  double x;
  UnitQuaternion q;
  Vec3 omega;  // physical, model frame
  Vec3 forcing;
  Vec3 error;
};

std::vector<QuaternionSample> quat_rollout(const QuaternionDmp& model,
                                           const UnitQuaternion& q0, const Vec3& omega0,
                                           const RolloutOptions<UnitQuaternion>& opts);

// ---------------------------------------------------------------------------
// Dual quaternion

/// τq̂̇ = ½ q̂ ⊗ ξ̃^b,
/// τξ̇^b = K[e_o(q̂* ⊗ q̂_d) - d_0(x) + f(x)] - Dξ^b,
/// d_0(x) = e_o(q̂_0* ⊗ q̂_d)·x.
struct DualQuaternionDmp {
  PoseGains gains;
  double tau;
  GaussianBasis basis;
  Eigen::MatrixXd weights;  // N×6
  UnitDualQuaternion start;
  UnitDualQuaternion goal;
  RotationError error_mode{RotationError::Vec};
};

/// f_d = K⁻¹(τ²ξ̇ + τDξ) - e_o(q̂* ⊗ q̂_d) + d_0(x) per sample (physical,
/// body-frame twists).
std::vector<Vec6> dq_target_forcing(const std::vector<UnitDualQuaternion>& dq,
                                    const std::vector<Vec6>& xi,
                                    const std::vector<Vec6>& xi_rate, double dt,
                                    const PoseGains& gains, double tau, double alpha_x,
                                    const UnitDualQuaternion& start,
                                    const UnitDualQuaternion& goal,
                                    RotationError mode = RotationError::Vec);

struct DualQuaternionTraining {
  DualQuaternionDmp model;
  WeightFit fit;
};

/// `demo` must be differentiated; its first twist seeds the step-matched
/// sequence.
DualQuaternionTraining dq_train(const Trajectory& demo, const PoseGains& gains, double tau,
                                const GaussianBasis& basis,
                                RotationError mode = RotationError::Vec,
                                TargetRates rates = TargetRates::StepMatched);

struct LyapunovValue {
  double V;
  double V1;  // rotational
  double V2;  // translational
};

/// V1 = (η_od - η_o)² + ‖ε_od - ε_o‖² + ½ωᵀ(K^o)⁻¹ω,
/// V2 = ½‖p_d - p‖² + ½vᵀ(K^p)⁻¹v.
/// `xi` is the scaled-time twist state [ω, v]; positions are inertial.
LyapunovValue lyapunov_value(const UnitDualQuaternion& dq, const Vec6& xi,
                             const UnitDualQuaternion& goal, const PoseGains& gains);

struct DualQuaternionSample {
  double t;
  double x;
  UnitDualQuaternion dq;
  Twist twist;  // physical, body frame
  Vec6 forcing;
  Vec6 error;
  LyapunovValue lyapunov;
};

/// Semi-implicit Euler on ξ, exact exponential step on q̂.
std::vector<DualQuaternionSample> dq_rollout(const DualQuaternionDmp& model,
                                             const UnitDualQuaternion& dq0, const Twist& xi0,
                                             const RolloutOptions<UnitDualQuaternion>& opts);

// ---------------------------------------------------------------------------
// Pose-decoupled baseline

/// Inertial-frame classical DMPs for x, y, z and a body-frame quaternion
/// DMP, coupled only through the shared phase.
struct PoseDecoupledDmp {
  ClassicalDmp position;
  QuaternionDmp orientation;
};

struct PoseDecoupledConfig {
  double alpha_x{0.1};
  double tau{0.0};  // 0: demo duration
  int position_kernels{30};
  double position_stiffness{10.0};
  double position_damping{damping_for(10.0)};
  int orientation_kernels{50};
  double orientation_stiffness{1.0};
  double orientation_damping{damping_for(1.0)};
  KernelScheme scheme{KernelScheme::A};
  TargetRates rates{TargetRates::StepMatched};
};

struct PoseDecoupledTraining {
  PoseDecoupledDmp model;
  WeightFit position_fit;
  WeightFit orientation_fit;
};

/// Builds the kernel bank for a model with time scale `tau` trained on a
/// demo of `duration` sampled every `dt`.
GaussianBasis make_basis(KernelScheme scheme, int n, double alpha_x, double tau,
                         double duration, double dt);

PoseDecoupledTraining pose_train(const Trajectory& demo, const PoseDecoupledConfig& config);

struct PoseSample {
  double t;
  double x;
  Pose pose;
  Vec3 velocity;  // inertial, physical
  Vec3 omega;     // body, physical
};

std::vector<PoseSample> pose_rollout(const PoseDecoupledDmp& model, const Pose& start,
                                     const RolloutOptions<Pose>& opts);

}  // namespace dqdmp
