#pragma once

// Uniformly sampled pose trajectories: CSV I/O, numeric differentiation into
// body-frame twist channels, resampling and synthetic maneuver generators.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dqdmp/dualquat.hpp"

namespace dqdmp {

/// Channels obtained by differentiating a trajectory. Every twist is tagged
/// Frame::Body.
struct DerivedChannels {
  std::vector<Vec3> omega_body;
  std::vector<Vec3> omega_body_rate;
  std::vector<Vec3> position_body;       // p^b
  std::vector<Vec3> position_body_rate;  // ṗ^b
  std::vector<Twist> twist;              // ξ^b
  std::vector<Twist> twist_rate;         // ξ̇^b
  std::vector<Vec3> velocity_inertial;       // ṗ^s
  std::vector<Vec3> acceleration_inertial;   // p̈^s
};

class Trajectory {
 public:
  /// Validates uniform spacing (1e-9 dt) and at least two samples, then
  /// enforces sign continuity of the orientation sequence.
  Trajectory(std::vector<double> times, std::vector<Pose> poses);

  std::size_t size() const { return times_.size(); }
  double dt() const { return dt_; }
  double start_time() const { return times_.front(); }
  double duration() const { return times_.back() - times_.front(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Pose>& poses() const { return poses_; }
  const Pose& pose(std::size_t k) const { return poses_[k]; }

  /// Uniform factor applied to positions before training; recorded in the
  /// CSV metadata and undone when rollouts are written out.
  double position_scale() const { return position_scale_; }
  void set_position_scale(double s);
  const std::string& source() const { return source_; }
  void set_source(std::string s) { source_ = std::move(s); }

  bool has_derived() const { return derived_.has_value(); }
  /// Throws std::logic_error when differentiate() has not been applied.
  const DerivedChannels& derived() const;

 private:
  friend Trajectory differentiate(const Trajectory&);

  std::vector<double> times_;
  std::vector<Pose> poses_;
  double dt_{0.0};
  double position_scale_{1.0};
  std::string source_;
  std::optional<DerivedChannels> derived_;
};

/// Parses the `t,px,py,pz,qw,qx,qy,qz` CSV. Lines starting with '#' carry
/// metadata (`# position_scale=<s>`, `# source=<text>`). Quaternions within
/// 1e-3 of unit are renormalized; larger deviations, malformed rows and
/// non-uniform timestamps raise ParseError with the 1-based line number.
Trajectory load_trajectory(std::istream& in);
Trajectory load_trajectory_file(const std::string& path);

/// Writes the CSV with 17 significant digits and '.' as decimal separator.
void save_trajectory(const Trajectory& traj, std::ostream& out);
void save_trajectory_file(const Trajectory& traj, const std::string& path);

/// Central differences (second-order one-sided at the ends):
///   ω^b from ω̃ = 2 q* ⊗ q̇, p^b = vec(q* ⊗ p̃^s ⊗ q), ṗ^b, ξ^b via
///   twist_body_from_demo, ξ̇^b; plus inertial ṗ^s and p̈^s.
/// Throws InvalidArgument for fewer than 4 samples.
Trajectory differentiate(const Trajectory& traj);

/// Linear interpolation on position, shortest-arc on orientation. Samples
/// at t0 + k·new_dt up to the original end time (within 1e-9 new_dt).
Trajectory resample(const Trajectory& traj, double new_dt);

/// Positions multiplied by the trajectory's position scale; the result has
/// scale 1.
Trajectory apply_position_scale(const Trajectory& traj);

/// Vertical loop in the x-z plane with min-jerk timing:
///   θ(u) = 2π(10u³ - 15u⁴ + 6u⁵), u = t/T,
///   p^s = [R sin θ, 0, R(1 - cos θ)], q = quat_exp([0, θ/2, 0]).
Trajectory gen_somersault(double radius, double duration, double dt);

/// Scalar demonstration with analytic derivatives.
struct ScalarDemo {
  double dt{0.0};
  std::vector<double> t, y, yd, ydd;
};

/// y(t) = y0 + (g - y0) s(t/T) with s the min-jerk polynomial.
ScalarDemo gen_min_jerk(double y0, double goal, double duration, double dt);

/// `t,y,yd,ydd` CSV.
void save_scalar_demo(const ScalarDemo& demo, std::ostream& out);
ScalarDemo load_scalar_demo(std::istream& in);

/// Number of samples of a uniform grid over [0, duration].
std::size_t sample_count(double duration, double dt);

/// First derivative of uniformly spaced samples: central differences inside,
/// second-order one-sided stencils at both ends. Needs ≥ 3 samples.
template <typename T>
std::vector<T> differentiate_samples(const std::vector<T>& f, double dt) {
  const std::size_t n = f.size();
  std::vector<T> d(n);
  if (n < 3) return d;
  const double inv2 = 1.0 / (2.0 * dt);
  // End stencils written as differences from the end sample: exact zero on
  // constant input.
  d[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) * inv2;
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) * inv2;
  d[n - 1] = ((f[n - 3] - f[n - 1]) - 4.0 * (f[n - 2] - f[n - 1])) * inv2;
  return d;
}

/// Formats a double with 17 significant digits, locale independent.
std::string format_double(double v);

}  // namespace dqdmp
