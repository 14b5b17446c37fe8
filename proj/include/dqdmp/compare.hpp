#pragma once

// Training presets, rollout tables and the side-by-side evaluation of the
// dual quaternion DMP against the pose-decoupled baseline.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dqdmp/dmp.hpp"

namespace dqdmp {

struct DualQuaternionConfig {
  double alpha_x{0.05};
  double tau{0.0};  // 0: demo duration
  int kernels{30};
  double rotation_stiffness{1.0};
  double rotation_damping{damping_for(1.0)};
  double position_stiffness{1.0};
  double position_damping{damping_for(1.0)};
  KernelScheme scheme{KernelScheme::A};
  TargetRates rates{TargetRates::StepMatched};
  RotationError error{RotationError::Vec};
};

/// `demo` must be differentiated.
DualQuaternionTraining train_dual_quaternion(const Trajectory& demo,
                                             const DualQuaternionConfig& config);

/// One rollout sample in physical units: inertial position, body angular
/// and linear velocity. Lyapunov values are present for dual quaternion
/// rollouts only and are in model units.
struct RolloutRow {
  double t;
  double x;
  Pose pose;
  Vec3 omega_body;
  Vec3 velocity_body;
  std::optional<LyapunovValue> lyapunov;
};

/// Positions and linear velocities are divided by `position_scale`.
std::vector<RolloutRow> rollout_rows(const std::vector<DualQuaternionSample>& samples,
                                     double position_scale = 1.0);
std::vector<RolloutRow> rollout_rows(const std::vector<PoseSample>& samples,
                                     double position_scale = 1.0);
/// Position columns are NaN; ω is rotated into the body frame when needed.
std::vector<RolloutRow> rollout_rows(const std::vector<QuaternionSample>& samples, Frame frame);

/// `t,x,px,py,pz,qw,qx,qy,qz,wx,wy,wz,vx,vy,vz,V,V1,V2`; absent values are
/// written as `nan`.
void write_rollout_table(const std::vector<RolloutRow>& rows, std::ostream& out);

/// `t,x,y0..,yd0..,f0..` for classical rollouts.
void write_classical_table(const std::vector<ClassicalSample>& samples, std::ostream& out);

struct ModelReport {
  std::string model;
  double position_rmse;        // m
  double orientation_rmse;     // rad, geodesic
  double terminal_position;    // m, last sample vs demo goal
  double terminal_orientation; // rad
  /// Mean over interior samples of ‖central-difference ṗ^s - R(q) v^b‖ (m/s).
  /// For a rollout's own velocity, v^b at sample k is the mean of the
  /// velocities driving the two steps the difference spans.
  double consistency_residual;
};

/// Compares `rows` against `demo` sample by sample (same grid). `velocity_body`
/// supplies v^b per sample for the consistency residual; by default the
/// rows' own body velocities are used. Demo positions are divided by
/// `position_scale`.
ModelReport evaluate_rollout(const std::string& name, const Trajectory& demo,
                             const std::vector<RolloutRow>& rows, double position_scale = 1.0,
                             const std::vector<Vec3>* velocity_body = nullptr);

struct CompareConfig {
  DualQuaternionConfig dual_quaternion;
  PoseDecoupledConfig pose;
};

struct Comparison {
  DualQuaternionTraining dual_quaternion;
  PoseDecoupledTraining pose;
  std::vector<RolloutRow> dual_quaternion_rows;
  std::vector<RolloutRow> pose_rows;
  ModelReport dual_quaternion_report;
  ModelReport pose_report;
};

/// Trains both models on `demo` (positions multiplied by its position scale
/// first), rolls each out from the demo's initial state over the demo's
/// duration and step, and evaluates them in the demo's units. The decoupled
/// model has no body linear velocity of its own; its consistency residual
/// uses the demo's body velocity, so it measures how well the rolled-out
/// attitude carries the demonstrated motion along the rolled-out path.
Comparison compare_models(const Trajectory& demo, const CompareConfig& config = {});

/// `model,position_rmse_m,orientation_rmse_rad,terminal_position_m,
/// terminal_orientation_rad,consistency_residual_mps`.
void write_comparison(const std::vector<ModelReport>& reports, std::ostream& out);

}  // namespace dqdmp
