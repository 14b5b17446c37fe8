#include "dqdmp/dmp.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace dqdmp {

namespace {

template <typename M>
void check_spd(const M& m, const char* name) {
  if (!m.allFinite()) throw InvalidArgument(std::string(name) + " has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale)) {
    throw InvalidArgument(std::string(name) + " must be symmetric");
  }
  Eigen::LLT<M> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument(std::string(name) + " must be positive definite");
  }
}

void check_step(double dt, double duration) {
  if (!(dt > 0.0)) throw InvalidArgument("rollout dt must be positive");
  if (!(duration >= 0.0)) throw InvalidArgument("rollout duration must be non-negative");
}

// Semi-implicit Euler on a damped state is stable only for dt·D/τ below 2.
template <typename Derived>
void check_state(const Eigen::MatrixBase<Derived>& state, double t) {
  if (!state.allFinite() || state.norm() > 1e100) {
    throw Error("rollout diverged at t = " + format_double(t) +
                "; reduce dt (the velocity update needs dt*D/tau < 2)");
  }
}

std::vector<double> phases(std::size_t n, double dt, const PhaseParams& params) {
  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) xs[k] = phase(static_cast<double>(k) * dt, params);
  return xs;
}

// Velocity entering step k→k+1 is stored at k+1; rates are forward
// differences, the last one repeated.
template <typename V>
void step_matched(std::vector<V>& vel, std::vector<V>& rate, double dt) {
  const std::size_t n = vel.size();
  rate.resize(n);
  for (std::size_t k = 0; k + 1 < n; ++k) rate[k] = (vel[k + 1] - vel[k]) / dt;
  rate[n - 1] = n >= 2 ? rate[n - 2] : V::Zero();
}

}  // namespace

const char* to_string(TargetRates r) {
  return r == TargetRates::StepMatched ? "step-matched" : "central";
}

TargetRates target_rates_from_string(const std::string& s) {
  if (s == "step-matched") return TargetRates::StepMatched;
  if (s == "central") return TargetRates::Central;
  throw InvalidArgument("unknown target rates '" + s + "'");
}

void ClassicalGains::validate() const {
  if (!(alpha_z > 0.0) || !(beta_z > 0.0) || !std::isfinite(alpha_z) ||
      !std::isfinite(beta_z)) {
    throw InvalidArgument("alpha_z and beta_z must be positive");
  }
}

RotationGains RotationGains::scalar(double k, double d) {
  return {k * Mat3::Identity(), d * Mat3::Identity()};
}

void RotationGains::validate() const {
  check_spd(K, "rotational stiffness");
  check_spd(D, "rotational damping");
}

PoseGains PoseGains::scalar(double k_rot, double d_rot, double k_pos, double d_pos) {
  PoseGains g;
  g.K.setZero();
  g.D.setZero();
  g.K.topLeftCorner<3, 3>() = k_rot * Mat3::Identity();
  g.K.bottomRightCorner<3, 3>() = k_pos * Mat3::Identity();
  g.D.topLeftCorner<3, 3>() = d_rot * Mat3::Identity();
  g.D.bottomRightCorner<3, 3>() = d_pos * Mat3::Identity();
  return g;
}

void PoseGains::validate() const {
  for (const Mat6* m : {&K, &D}) {
    if (!m->topRightCorner<3, 3>().isZero(0.0) || !m->bottomLeftCorner<3, 3>().isZero(0.0)) {
      throw InvalidArgument("pose gains must be block diagonal");
    }
  }
  check_spd(Mat3(K.topLeftCorner<3, 3>()), "rotational stiffness");
  check_spd(Mat3(K.bottomRightCorner<3, 3>()), "translational stiffness");
  check_spd(Mat3(D.topLeftCorner<3, 3>()), "rotational damping");
  check_spd(Mat3(D.bottomRightCorner<3, 3>()), "translational damping");
}

GaussianBasis make_basis(KernelScheme scheme, int n, double alpha_x, double tau,
                         double duration, double dt) {
  if (scheme == KernelScheme::A) return GaussianBasis::scheme_a(n, alpha_x);
  return GaussianBasis::scheme_b(n, alpha_x, duration / tau, dt / tau);
}

// ---------------------------------------------------------------------------
// Classical

Eigen::MatrixXd classical_target_forcing(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yd,
                                         const Eigen::MatrixXd& ydd,
                                         const Eigen::VectorXd& goal, double tau,
                                         const ClassicalGains& gains) {
  if (y.rows() != yd.rows() || y.rows() != ydd.rows() || y.cols() != goal.size() ||
      yd.cols() != goal.size() || ydd.cols() != goal.size()) {
    throw InvalidArgument("demo channels have inconsistent shapes");
  }
  const Eigen::MatrixXd error = (-y).rowwise() + goal.transpose();
  return tau * tau * ydd - gains.alpha_z * (gains.beta_z * error - tau * yd);
}

ClassicalTraining classical_train(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yd,
                                  const Eigen::MatrixXd& ydd, double dt, double tau,
                                  const ClassicalGains& gains, const GaussianBasis& basis) {
  gains.validate();
  const PhaseParams params{basis.alpha_x(), tau};
  params.validate();
  if (y.rows() < 2) throw InvalidArgument("demo needs at least 2 samples");
  const Eigen::VectorXd goal = y.row(y.rows() - 1).transpose();
  const Eigen::MatrixXd fd = classical_target_forcing(y, yd, ydd, goal, tau, gains);
  const std::vector<double> xs = phases(static_cast<std::size_t>(y.rows()), dt, params);
  WeightFit fit = fit_weights(xs, fd, basis);
  ClassicalDmp model{gains, tau, basis, fit.weights, y.row(0).transpose(), goal};
  return {std::move(model), std::move(fit)};
}

ClassicalTraining classical_train(const ScalarDemo& demo, double tau,
                                  const ClassicalGains& gains, const GaussianBasis& basis,
                                  TargetRates rates) {
  const auto n = static_cast<Eigen::Index>(demo.t.size());
  if (demo.y.size() != demo.t.size() || demo.yd.size() != demo.t.size() ||
      demo.ydd.size() != demo.t.size()) {
    throw InvalidArgument("demo channels differ in length");
  }
  const auto col = [n](const std::vector<double>& v) {
    return Eigen::MatrixXd(Eigen::Map<const Eigen::VectorXd>(v.data(), n));
  };
  if (rates == TargetRates::Central || n < 2) {
    return classical_train(col(demo.y), col(demo.yd), col(demo.ydd), demo.dt, tau, gains,
                           basis);
  }
  std::vector<Eigen::Matrix<double, 1, 1>> v(demo.t.size()), a;
  v[0](0) = demo.yd[0];
  for (std::size_t k = 0; k + 1 < v.size(); ++k) v[k + 1](0) = (demo.y[k + 1] - demo.y[k]) / demo.dt;
  step_matched(v, a, demo.dt);
  Eigen::MatrixXd yd(n, 1), ydd(n, 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    yd(k, 0) = v[static_cast<std::size_t>(k)](0);
    ydd(k, 0) = a[static_cast<std::size_t>(k)](0);
  }
  return classical_train(col(demo.y), yd, ydd, demo.dt, tau, gains, basis);
}

std::vector<ClassicalSample> classical_rollout(const ClassicalDmp& model,
                                               const Eigen::VectorXd& y0,
                                               const RolloutOptions<Eigen::VectorXd>& opts,
                                               const Eigen::VectorXd* yd0) {
  check_step(opts.dt, opts.duration);
  const double tau = opts.tau.value_or(model.tau);
  const Eigen::VectorXd goal = opts.goal.value_or(model.goal);
  const PhaseParams params{model.basis.alpha_x(), tau};
  params.validate();
  if (y0.size() != model.dims() || goal.size() != model.dims()) {
    throw InvalidArgument("start/goal dimension does not match the model");
  }
  const double a = model.gains.alpha_z;
  const double b = model.gains.beta_z;

  const std::size_t n = sample_count(opts.duration, opts.dt);
  std::vector<ClassicalSample> out;
  out.reserve(n);
  Eigen::VectorXd y = y0;
  Eigen::VectorXd z = yd0 ? Eigen::VectorXd(tau * *yd0) : Eigen::VectorXd::Zero(y0.size());
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * opts.dt;
    const double x = phase(t, params);
    Eigen::VectorXd f = forcing(x, model.basis, model.weights);
    out.push_back({t, x, y, z / tau, f});
    if (k + 1 == n) break;
    z += opts.dt / tau * (a * (b * (goal - y) - z) + f);
    y += opts.dt / tau * z;
    check_state(z, t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quaternion

Vec3 quat_attractor_error(Frame frame, const UnitQuaternion& q, const UnitQuaternion& goal) {
  if (frame == Frame::Inertial) return orientation_error(goal, q);
  // vec(q* ⊗ q_d)
  return (conjugate(q.quat()) * goal.quat()).eps;
}

std::vector<Vec3> quat_target_forcing(const std::vector<UnitQuaternion>& q,
                                      const std::vector<Vec3>& omega,
                                      const std::vector<Vec3>& omega_rate, double dt,
                                      Frame frame, const RotationGains& gains, double tau,
                                      double alpha_x, const UnitQuaternion& q0,
                                      const UnitQuaternion& goal) {
  if (q.size() != omega.size() || q.size() != omega_rate.size()) {
    throw InvalidArgument("demo channels differ in length");
  }
  const PhaseParams params{alpha_x, tau};
  params.validate();
  const Eigen::LLT<Mat3> k_inv(gains.K);
  const Vec3 e0 = quat_attractor_error(frame, q0, goal);
  std::vector<Vec3> fd(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double x = phase(static_cast<double>(k) * dt, params);
    const Vec3 accel = tau * tau * omega_rate[k] + tau * gains.D * omega[k];
    fd[k] = k_inv.solve(accel) - quat_attractor_error(frame, q[k], goal) + e0 * x;
  }
  return fd;
}

QuaternionTraining quat_train(const Trajectory& demo, Frame frame, const RotationGains& gains,
                              double tau, const GaussianBasis& basis, TargetRates rates) {
  gains.validate();
  const DerivedChannels& d = demo.derived();
  const std::size_t n = demo.size();
  std::vector<UnitQuaternion> q(n);
  std::vector<Vec3> omega(n), omega_rate(n);
  for (std::size_t k = 0; k < n; ++k) {
    q[k] = demo.pose(k).orientation;
    if (frame == Frame::Body) {
      omega[k] = d.omega_body[k];
      omega_rate[k] = d.omega_body_rate[k];
    } else {
      const Mat3 rot = quat_to_rotmat(q[k]);
      omega[k] = rot * d.omega_body[k];
      omega_rate[k] = rot * d.omega_body_rate[k];
    }
  }
  if (rates == TargetRates::StepMatched) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const UnitQuaternion inc = frame == Frame::Body ? conjugate(q[k]) * q[k + 1]
                                                      : q[k + 1] * conjugate(q[k]);
      omega[k + 1] = 2.0 / demo.dt() * quat_log(inc);
    }
    step_matched(omega, omega_rate, demo.dt());
  }
  const std::vector<Vec3> fd = quat_target_forcing(q, omega, omega_rate, demo.dt(), frame,
                                                   gains, tau, basis.alpha_x(), q.front(),
                                                   q.back());
  Eigen::MatrixXd targets(static_cast<Eigen::Index>(n), 3);
  for (std::size_t k = 0; k < n; ++k) targets.row(static_cast<Eigen::Index>(k)) = fd[k];
  const std::vector<double> xs = phases(n, demo.dt(), {basis.alpha_x(), tau});
  WeightFit fit = fit_weights(xs, targets, basis);
  QuaternionDmp model{frame, gains, tau, basis, fit.weights, q.front(), q.back()};
  return {std::move(model), std::move(fit)};
}

std::vector<QuaternionSample> quat_rollout(const QuaternionDmp& model,
                                           const UnitQuaternion& q0, const Vec3& omega0,
                                           const RolloutOptions<UnitQuaternion>& opts) {
  check_step(opts.dt, opts.duration);
  const double tau = opts.tau.value_or(model.tau);
  const UnitQuaternion goal = opts.goal.value_or(model.goal);
  const PhaseParams params{model.basis.alpha_x(), tau};
  params.validate();
  const Vec3 e0 = quat_attractor_error(model.frame, q0, goal);

  const std::size_t n = sample_count(opts.duration, opts.dt);
  std::vector<QuaternionSample> out;
  out.reserve(n);
  UnitQuaternion q = q0;
  Vec3 omega = tau * omega0;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * opts.dt;
    const double x = phase(t, params);
    const Vec3 f = forcing(x, model.basis, model.weights);
    const Vec3 e = quat_attractor_error(model.frame, q, goal);
    out.push_back({t, x, q, omega / tau, f, e});
    if (k + 1 == n) break;
    omega += opts.dt / tau * (model.gains.K * (e - e0 * x + f) - model.gains.D * omega);
    check_state(omega, t);
    q = model.frame == Frame::Body ? quat_step_body(q, omega / tau, opts.dt)
                                   : quat_step_inertial(q, omega / tau, opts.dt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dual quaternion

std::vector<Vec6> dq_target_forcing(const std::vector<UnitDualQuaternion>& dq,
                                    const std::vector<Vec6>& xi,
                                    const std::vector<Vec6>& xi_rate, double dt,
                                    const PoseGains& gains, double tau, double alpha_x,
                                    const UnitDualQuaternion& start,
                                    const UnitDualQuaternion& goal, RotationError mode) {
  if (dq.size() != xi.size() || dq.size() != xi_rate.size()) {
    throw InvalidArgument("demo channels differ in length");
  }
  const PhaseParams params{alpha_x, tau};
  params.validate();
  const Eigen::LLT<Mat6> k_inv(gains.K);
  const Vec6 e0 = dq_error(start, goal, mode);
  std::vector<Vec6> fd(dq.size());
  for (std::size_t k = 0; k < dq.size(); ++k) {
    const double x = phase(static_cast<double>(k) * dt, params);
    const Vec6 accel = tau * tau * xi_rate[k] + tau * gains.D * xi[k];
    fd[k] = k_inv.solve(accel) - dq_error(dq[k], goal, mode) + e0 * x;
  }
  return fd;
}

DualQuaternionTraining dq_train(const Trajectory& demo, const PoseGains& gains, double tau,
                                const GaussianBasis& basis, RotationError mode,
                                TargetRates rates) {
  gains.validate();
  const DerivedChannels& d = demo.derived();
  const std::size_t n = demo.size();
  std::vector<UnitDualQuaternion> dq(n);
  std::vector<Vec6> xi(n), xi_rate(n);
  for (std::size_t k = 0; k < n; ++k) {
    dq[k] = dq_from_pose(demo.pose(k));
    xi[k] = d.twist[k].vector();
    xi_rate[k] = d.twist_rate[k].vector();
  }
  if (rates == TargetRates::StepMatched) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      xi[k + 1] = 2.0 / demo.dt() * dq_log(conjugate(dq[k]) * dq[k + 1]);
    }
    step_matched(xi, xi_rate, demo.dt());
  }
  const std::vector<Vec6> fd = dq_target_forcing(dq, xi, xi_rate, demo.dt(), gains, tau,
                                                 basis.alpha_x(), dq.front(), dq.back(), mode);
  Eigen::MatrixXd targets(static_cast<Eigen::Index>(n), 6);
  for (std::size_t k = 0; k < n; ++k) targets.row(static_cast<Eigen::Index>(k)) = fd[k];
  const std::vector<double> xs = phases(n, demo.dt(), {basis.alpha_x(), tau});
  WeightFit fit = fit_weights(xs, targets, basis);
  DualQuaternionDmp model{gains, tau, basis, fit.weights, dq.front(), dq.back(), mode};
  return {std::move(model), std::move(fit)};
}

LyapunovValue lyapunov_value(const UnitDualQuaternion& dq, const Vec6& xi,
                             const UnitDualQuaternion& goal, const PoseGains& gains) {
  // Both arguments are unit already; no tolerance check.
  const auto pose_of = [](const UnitDualQuaternion& u) {
    const UnitQuaternion q = u.real();
    return Pose{rotate(q, (2.0 * (conjugate(u.dq().real) * u.dual())).eps), q};
  };
  const Pose pose = pose_of(dq);
  const Pose target = pose_of(goal);
  const Vec3 omega = xi.head<3>();
  const Vec3 v = xi.tail<3>();
  const Quaternion chord = target.orientation.quat() - pose.orientation.quat();
  const double v1 = chord.squared_norm() +
                    0.5 * omega.dot(gains.rotation_stiffness().llt().solve(omega));
  const double v2 = 0.5 * (target.position - pose.position).squaredNorm() +
                    0.5 * v.dot(gains.translation_stiffness().llt().solve(v));
  return {v1 + v2, v1, v2};
}

std::vector<DualQuaternionSample> dq_rollout(const DualQuaternionDmp& model,
                                             const UnitDualQuaternion& dq0, const Twist& xi0,
                                             const RolloutOptions<UnitDualQuaternion>& opts) {
  check_step(opts.dt, opts.duration);
  if (xi0.frame != Frame::Body) throw FrameMismatch("dq_rollout expects a body-frame twist");
  const double tau = opts.tau.value_or(model.tau);
  const UnitDualQuaternion goal = opts.goal.value_or(model.goal);
  const PhaseParams params{model.basis.alpha_x(), tau};
  params.validate();
  const Vec6 e0 = dq_error(dq0, goal, model.error_mode);

  const std::size_t n = sample_count(opts.duration, opts.dt);
  std::vector<DualQuaternionSample> out;
  out.reserve(n);
  UnitDualQuaternion dq = dq0;
  Vec6 xi = tau * xi0.vector();
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * opts.dt;
    const double x = phase(t, params);
    const Vec6 f = forcing(x, model.basis, model.weights);
    const Vec6 e = dq_error(dq, goal, model.error_mode);
    out.push_back({t, x, dq, Twist::from_vector(xi / tau, Frame::Body), f, e,
                   lyapunov_value(dq, xi, goal, model.gains)});
    if (k + 1 == n) break;
    xi += opts.dt / tau * (model.gains.K * (e - e0 * x + f) - model.gains.D * xi);
    check_state(xi, t);
    dq = dq_step_body(dq, Twist::from_vector(xi / tau, Frame::Body), opts.dt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pose-decoupled

PoseDecoupledTraining pose_train(const Trajectory& demo, const PoseDecoupledConfig& cfg) {
  PoseDecoupledConfig config = cfg;
  if (config.tau == 0.0) config.tau = demo.duration();
  const DerivedChannels& d = demo.derived();
  const std::size_t n = demo.size();
  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd y(rows, 3), yd(rows, 3), ydd(rows, 3);
  for (std::size_t k = 0; k < n; ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    y.row(r) = demo.pose(k).position;
    yd.row(r) = d.velocity_inertial[k];
    ydd.row(r) = d.acceleration_inertial[k];
  }
  if (config.rates == TargetRates::StepMatched) {
    std::vector<Vec3> v(n), a;
    v[0] = d.velocity_inertial[0];
    for (std::size_t k = 0; k + 1 < n; ++k) {
      v[k + 1] = (demo.pose(k + 1).position - demo.pose(k).position) / demo.dt();
    }
    step_matched(v, a, demo.dt());
    for (std::size_t k = 0; k < n; ++k) {
      yd.row(static_cast<Eigen::Index>(k)) = v[k];
      ydd.row(static_cast<Eigen::Index>(k)) = a[k];
    }
  }
  const GaussianBasis pos_basis = make_basis(config.scheme, config.position_kernels,
                                             config.alpha_x, config.tau, demo.duration(),
                                             demo.dt());
  const GaussianBasis rot_basis = make_basis(config.scheme, config.orientation_kernels,
                                             config.alpha_x, config.tau, demo.duration(),
                                             demo.dt());
  ClassicalTraining pos = classical_train(
      y, yd, ydd, demo.dt(), config.tau,
      ClassicalGains::from_stiffness(config.position_stiffness, config.position_damping),
      pos_basis);
  QuaternionTraining rot = quat_train(
      demo, Frame::Body,
      RotationGains::scalar(config.orientation_stiffness, config.orientation_damping),
      config.tau, rot_basis, config.rates);
  return {{std::move(pos.model), std::move(rot.model)}, std::move(pos.fit),
          std::move(rot.fit)};
}

std::vector<PoseSample> pose_rollout(const PoseDecoupledDmp& model, const Pose& start,
                                     const RolloutOptions<Pose>& opts) {
  RolloutOptions<Eigen::VectorXd> pos_opts{opts.dt, opts.duration, std::nullopt, opts.tau};
  RolloutOptions<UnitQuaternion> rot_opts{opts.dt, opts.duration, std::nullopt, opts.tau};
  if (opts.goal) {
    pos_opts.goal = Eigen::VectorXd(opts.goal->position);
    rot_opts.goal = opts.goal->orientation;
  }
  const auto pos = classical_rollout(model.position, start.position, pos_opts);
  const auto rot = quat_rollout(model.orientation, start.orientation, Vec3::Zero(), rot_opts);
  std::vector<PoseSample> out(pos.size());
  for (std::size_t k = 0; k < pos.size(); ++k) {
    out[k] = {pos[k].t, pos[k].x, {Vec3(pos[k].y), rot[k].q}, Vec3(pos[k].yd), rot[k].omega};
  }
  return out;
}

}  // namespace dqdmp
