#include "dqdmp/compare.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace dqdmp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_vec(std::ostream& out, const Eigen::Ref<const Eigen::VectorXd>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v[i]);
}

}  // namespace

DualQuaternionTraining train_dual_quaternion(const Trajectory& demo,
                                             const DualQuaternionConfig& config) {
  const double tau = config.tau == 0.0 ? demo.duration() : config.tau;
  const PoseGains gains =
      PoseGains::scalar(config.rotation_stiffness, config.rotation_damping,
                        config.position_stiffness, config.position_damping);
  const GaussianBasis basis = make_basis(config.scheme, config.kernels, config.alpha_x, tau,
                                         demo.duration(), demo.dt());
  return dq_train(demo, gains, tau, basis, config.error, config.rates);
}

std::vector<RolloutRow> rollout_rows(const std::vector<DualQuaternionSample>& samples,
                                     double position_scale) {
  std::vector<RolloutRow> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    Pose pose = dq_to_pose(s.dq);
    pose.position /= position_scale;
    rows.push_back({s.t, s.x, pose, s.twist.r, s.twist.v / position_scale, s.lyapunov});
  }
  return rows;
}

std::vector<RolloutRow> rollout_rows(const std::vector<PoseSample>& samples,
                                     double position_scale) {
  std::vector<RolloutRow> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    Pose pose = s.pose;
    pose.position /= position_scale;
    const Vec3 v_body = quat_to_rotmat(s.pose.orientation).transpose() * s.velocity;
    rows.push_back({s.t, s.x, pose, s.omega, v_body / position_scale, std::nullopt});
  }
  return rows;
}

std::vector<RolloutRow> rollout_rows(const std::vector<QuaternionSample>& samples,
                                     Frame frame) {
  std::vector<RolloutRow> rows;
  rows.reserve(samples.size());
  const Vec3 nan3 = Vec3::Constant(kNaN);
  for (const auto& s : samples) {
    const Vec3 w =
        frame == Frame::Body ? s.omega : Vec3(quat_to_rotmat(s.q).transpose() * s.omega);
    rows.push_back({s.t, s.x, {nan3, s.q}, w, nan3, std::nullopt});
  }
  return rows;
}

void write_rollout_table(const std::vector<RolloutRow>& rows, std::ostream& out) {
  out << "t,x,px,py,pz,qw,qx,qy,qz,wx,wy,wz,vx,vy,vz,V,V1,V2\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.x);
    write_vec(out, r.pose.position);
    write_vec(out, r.pose.orientation.coeffs());
    write_vec(out, r.omega_body);
    write_vec(out, r.velocity_body);
    if (r.lyapunov) {
      write_vec(out, Eigen::Vector3d(r.lyapunov->V, r.lyapunov->V1, r.lyapunov->V2));
    } else {
      out << ",nan,nan,nan";
    }
    out << '\n';
  }
  if (!out) throw Error("failed to write rollout table");
}

void write_classical_table(const std::vector<ClassicalSample>& samples, std::ostream& out) {
  const Eigen::Index d = samples.empty() ? 0 : samples.front().y.size();
  out << "t,x";
  for (const char* name : {"y", "yd", "f"}) {
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << name << i;
  }
  out << '\n';
  for (const auto& s : samples) {
    out << format_double(s.t) << ',' << format_double(s.x);
    write_vec(out, s.y);
    write_vec(out, s.yd);
    write_vec(out, s.forcing);
    out << '\n';
  }
  if (!out) throw Error("failed to write rollout table");
}

ModelReport evaluate_rollout(const std::string& name, const Trajectory& demo,
                             const std::vector<RolloutRow>& rows, double position_scale,
                             const std::vector<Vec3>* velocity_body) {
  const std::size_t n = std::min(rows.size(), demo.size());
  if (n < 3) throw InvalidArgument("evaluation needs at least 3 samples");
  if (velocity_body && velocity_body->size() < n) {
    throw InvalidArgument("body velocity channel is shorter than the rollout");
  }
  double pos_sq = 0.0;
  double rot_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Pose& ref = demo.pose(k);
    pos_sq += (rows[k].pose.position - ref.position / position_scale).squaredNorm();
    const double g = geodesic_distance(rows[k].pose.orientation, ref.orientation);
    rot_sq += g * g;
  }
  const Pose& goal = demo.poses().back();
  const Pose& last = rows[n - 1].pose;

  const double dt = rows[1].t - rows[0].t;
  double residual = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Vec3 p_dot = (rows[k + 1].pose.position - rows[k - 1].pose.position) / (2.0 * dt);
    // A row's velocity drives the step into it, so the central difference at
    // k spans the velocities of rows k and k+1.
    const Vec3 v_b = velocity_body
                         ? (*velocity_body)[k]
                         : Vec3(0.5 * (rows[k].velocity_body + rows[k + 1].velocity_body));
    residual += (p_dot - quat_to_rotmat(rows[k].pose.orientation) * v_b).norm();
  }
  return {name,
          std::sqrt(pos_sq / static_cast<double>(n)),
          std::sqrt(rot_sq / static_cast<double>(n)),
          (last.position - goal.position / position_scale).norm(),
          geodesic_distance(last.orientation, goal.orientation),
          residual / static_cast<double>(n - 2)};
}

Comparison compare_models(const Trajectory& raw_demo, const CompareConfig& config) {
  const double scale = raw_demo.position_scale();
  const Trajectory demo = differentiate(apply_position_scale(raw_demo));
  const DerivedChannels& d = demo.derived();

  DualQuaternionTraining dq = train_dual_quaternion(demo, config.dual_quaternion);
  PoseDecoupledTraining pose = pose_train(demo, config.pose);

  RolloutOptions<UnitDualQuaternion> dq_opts{demo.dt(), demo.duration(), std::nullopt,
                                             std::nullopt};
  auto dq_rows = rollout_rows(dq_rollout(dq.model, dq.model.start, d.twist.front(), dq_opts),
                              scale);
  RolloutOptions<Pose> pose_opts{demo.dt(), demo.duration(), std::nullopt, std::nullopt};
  auto pose_rows = rollout_rows(pose_rollout(pose.model, demo.pose(0), pose_opts), scale);

  // Raw demo positions are already in output units.
  std::vector<Vec3> demo_v(demo.size());
  for (std::size_t k = 0; k < demo.size(); ++k) demo_v[k] = d.twist[k].v / scale;

  ModelReport dq_report =
      evaluate_rollout("dual-quaternion", raw_demo, dq_rows, 1.0);
  ModelReport pose_report =
      evaluate_rollout("pose-decoupled", raw_demo, pose_rows, 1.0, &demo_v);
  return {std::move(dq), std::move(pose), std::move(dq_rows), std::move(pose_rows),
          std::move(dq_report), std::move(pose_report)};
}

void write_comparison(const std::vector<ModelReport>& reports, std::ostream& out) {
  out << "model,position_rmse_m,orientation_rmse_rad,terminal_position_m,"
         "terminal_orientation_rad,consistency_residual_mps\n";
  for (const auto& r : reports) {
    out << r.model << ',' << format_double(r.position_rmse) << ','
        << format_double(r.orientation_rmse) << ',' << format_double(r.terminal_position)
        << ',' << format_double(r.terminal_orientation) << ','
        << format_double(r.consistency_residual) << '\n';
  }
  if (!out) throw Error("failed to write comparison");
}

}  // namespace dqdmp
