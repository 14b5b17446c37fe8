#include "dqdmp/traj.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dqdmp {

namespace {

constexpr const char* kPoseHeader = "t,px,py,pz,qw,qx,qy,qz";
constexpr const char* kScalarHeader = "t,y,yd,ydd";

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() &&
         (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ParseError("invalid number '" + std::string(field) + "'", line_no);
  }
  return v;
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

// Checks uniform spacing; returns the index of the first offending sample or
// 0 when the grid is uniform.
std::size_t first_nonuniform(const std::vector<double>& t, double dt) {
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double expected = t.front() + static_cast<double>(k) * dt;
    if (!(std::abs(t[k] - expected) <= 1e-9 * dt)) return k;
  }
  return 0;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                       std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
  return {buf, ptr};
}

std::size_t sample_count(double duration, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(duration >= 0.0)) throw InvalidArgument("duration must be non-negative");
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

Trajectory::Trajectory(std::vector<double> times, std::vector<Pose> poses)
    : times_(std::move(times)), poses_(std::move(poses)) {
  if (times_.size() != poses_.size()) {
    throw InvalidArgument("times and poses differ in length");
  }
  if (times_.size() < 2) throw InvalidArgument("a trajectory needs at least 2 samples");
  dt_ = (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
  if (!(dt_ > 0.0)) throw InvalidArgument("timestamps must be increasing");
  if (const std::size_t k = first_nonuniform(times_, dt_); k != 0) {
    throw InvalidArgument("non-uniform timestamp at sample " + std::to_string(k));
  }
  for (std::size_t k = 1; k < poses_.size(); ++k) {
    if (dot(poses_[k - 1].orientation, poses_[k].orientation) < 0.0) {
      poses_[k].orientation = -poses_[k].orientation;
    }
  }
}

void Trajectory::set_position_scale(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw InvalidArgument("position scale must be positive");
  }
  position_scale_ = s;
}

const DerivedChannels& Trajectory::derived() const {
  if (!derived_) throw std::logic_error("trajectory has not been differentiated");
  return *derived_;
}

Trajectory load_trajectory(std::istream& in) {
  std::vector<double> times;
  std::vector<Pose> poses;
  std::vector<std::size_t> row_lines;
  double scale = 1.0;
  std::string source;
  bool header_seen = false;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = trim_cr(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      std::string_view meta = sv.substr(1);
      while (!meta.empty() && meta.front() == ' ') meta.remove_prefix(1);
      if (meta.starts_with("position_scale=")) {
        scale = parse_double(meta.substr(15), line_no);
      } else if (meta.starts_with("source=")) {
        source = std::string(meta.substr(7));
      }
      continue;
    }
    if (!header_seen) {
      if (sv != kPoseHeader) {
        throw ParseError(std::string("expected header '") + kPoseHeader + "'", line_no);
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_commas(sv);
    if (fields.size() != 8) {
      throw ParseError("expected 8 fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    double v[8];
    for (int i = 0; i < 8; ++i) v[i] = parse_double(fields[i], line_no);
    const Quaternion q(v[4], v[5], v[6], v[7]);
    if (!(std::abs(q.norm() - 1.0) <= 1e-3)) {
      throw ParseError("quaternion norm " + std::to_string(q.norm()) +
                           " is not unit (row " + std::to_string(times.size() + 1) + ")",
                       line_no);
    }
    times.push_back(v[0]);
    poses.push_back({Vec3(v[1], v[2], v[3]), UnitQuaternion::normalized(q)});
    row_lines.push_back(line_no);
  }
  if (!header_seen) throw ParseError("missing header", line_no);
  if (times.size() < 2) throw ParseError("a trajectory needs at least 2 samples", 0);

  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw ParseError("timestamps must be increasing", row_lines.back());
  if (const std::size_t k = first_nonuniform(times, dt); k != 0) {
    throw ParseError("non-uniform timestamp", row_lines[k]);
  }
  Trajectory traj(std::move(times), std::move(poses));
  traj.set_position_scale(scale);
  traj.set_source(std::move(source));
  return traj;
}

Trajectory load_trajectory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory file '" + path + "'");
  return load_trajectory(in);
}

void save_trajectory(const Trajectory& traj, std::ostream& out) {
  if (!traj.source().empty()) out << "# source=" << traj.source() << '\n';
  if (traj.position_scale() != 1.0) {
    out << "# position_scale=" << format_double(traj.position_scale()) << '\n';
  }
  out << kPoseHeader << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Pose& p = traj.pose(k);
    const Vec4 q = p.orientation.coeffs();
    out << format_double(traj.times()[k]) << ',' << format_double(p.position.x()) << ','
        << format_double(p.position.y()) << ',' << format_double(p.position.z()) << ','
        << format_double(q[0]) << ',' << format_double(q[1]) << ','
        << format_double(q[2]) << ',' << format_double(q[3]) << '\n';
  }
  if (!out) throw Error("failed to write trajectory");
}

void save_trajectory_file(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_trajectory(traj, out);
}

Trajectory differentiate(const Trajectory& traj) {
  const std::size_t n = traj.size();
  if (n < 4) {
    throw InvalidArgument("trajectory too short to differentiate (" + std::to_string(n) +
                          " samples, need 4)");
  }
  const double dt = traj.dt();

  std::vector<Quaternion> q(n);
  std::vector<Vec3> p_s(n);
  for (std::size_t k = 0; k < n; ++k) {
    q[k] = traj.pose(k).orientation.quat();
    p_s[k] = traj.pose(k).position;
  }
  const std::vector<Quaternion> q_dot = differentiate_samples(q, dt);

  DerivedChannels d;
  d.omega_body.resize(n);
  d.position_body.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    d.omega_body[k] = 2.0 * (conjugate(q[k]) * q_dot[k]).eps;
    d.position_body[k] = position_in_body(traj.pose(k));
  }
  d.omega_body_rate = differentiate_samples(d.omega_body, dt);
  d.position_body_rate = differentiate_samples(d.position_body, dt);

  std::vector<Vec6> xi(n);
  d.twist.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    d.twist[k] =
        twist_body_from_demo(d.omega_body[k], d.position_body[k], d.position_body_rate[k]);
    xi[k] = d.twist[k].vector();
  }
  const std::vector<Vec6> xi_dot = differentiate_samples(xi, dt);
  d.twist_rate.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    d.twist_rate[k] = Twist::from_vector(xi_dot[k], Frame::Body);
  }

  d.velocity_inertial = differentiate_samples(p_s, dt);
  d.acceleration_inertial.resize(n);
  const double inv_dt2 = 1.0 / (dt * dt);
  const auto one_sided = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t e) {
    return Vec3((-5.0 * (p_s[b] - p_s[a]) + 4.0 * (p_s[c] - p_s[a]) - (p_s[e] - p_s[a])) *
                inv_dt2);
  };
  d.acceleration_inertial[0] = one_sided(0, 1, 2, 3);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    d.acceleration_inertial[k] = (p_s[k + 1] - 2.0 * p_s[k] + p_s[k - 1]) * inv_dt2;
  }
  d.acceleration_inertial[n - 1] = one_sided(n - 1, n - 2, n - 3, n - 4);

  Trajectory out = traj;
  out.derived_ = std::move(d);
  return out;
}

Trajectory resample(const Trajectory& traj, double new_dt) {
  if (!(new_dt > 0.0)) throw InvalidArgument("new_dt must be positive");
  if (std::abs(new_dt - traj.dt()) <= 1e-12 * traj.dt()) {
    Trajectory copy(traj.times(), traj.poses());
    copy.set_position_scale(traj.position_scale());
    copy.set_source(traj.source());
    return copy;
  }
  const double t0 = traj.start_time();
  const std::size_t count = sample_count(traj.duration(), new_dt);
  const std::size_t last = traj.size() - 1;

  std::vector<double> times(count);
  std::vector<Pose> poses(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = t0 + static_cast<double>(i) * new_dt;
    const double s = (t - t0) / traj.dt();
    const double nearest = std::round(s);
    if (std::abs(s - nearest) <= 1e-9) {
      const auto k = std::min(static_cast<std::size_t>(nearest), last);
      times[i] = traj.times()[k];
      poses[i] = traj.pose(k);
      continue;
    }
    const auto k = std::min(static_cast<std::size_t>(std::floor(s)), last - 1);
    const double u = s - static_cast<double>(k);
    const Pose& a = traj.pose(k);
    const Pose& b = traj.pose(k + 1);
    times[i] = t;
    poses[i].position = (1.0 - u) * a.position + u * b.position;
    poses[i].orientation = slerp(a.orientation, b.orientation, u);
  }
  Trajectory out(std::move(times), std::move(poses));
  out.set_position_scale(traj.position_scale());
  out.set_source(traj.source());
  return out;
}

Trajectory apply_position_scale(const Trajectory& traj) {
  std::vector<Pose> poses = traj.poses();
  for (Pose& p : poses) p.position *= traj.position_scale();
  Trajectory out(traj.times(), std::move(poses));
  out.set_source(traj.source());
  return out;
}

namespace {

struct MinJerk {
  double s, ds, dds;  // derivatives with respect to u
};

MinJerk min_jerk(double u) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  return {10 * u3 - 15 * u3 * u + 6 * u3 * u2, 30 * u2 - 60 * u3 + 30 * u2 * u2,
          60 * u - 180 * u2 + 120 * u3};
}

void check_generator_args(double duration, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(duration > dt)) throw InvalidArgument("duration must exceed dt");
}

}  // namespace

Trajectory gen_somersault(double radius, double duration, double dt) {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  check_generator_args(duration, dt);
  const std::size_t n = sample_count(duration, dt);
  std::vector<double> times(n);
  std::vector<Pose> poses(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double u = std::min(t / duration, 1.0);
    const double theta = 2.0 * std::numbers::pi * min_jerk(u).s;
    times[k] = t;
    poses[k].position = Vec3(radius * std::sin(theta), 0.0, radius * (1.0 - std::cos(theta)));
    poses[k].orientation = quat_exp(Vec3(0.0, 0.5 * theta, 0.0));
  }
  Trajectory traj(std::move(times), std::move(poses));
  traj.set_source("somersault");
  return traj;
}

ScalarDemo gen_min_jerk(double y0, double goal, double duration, double dt) {
  check_generator_args(duration, dt);
  const std::size_t n = sample_count(duration, dt);
  ScalarDemo demo;
  demo.dt = dt;
  demo.t.resize(n);
  demo.y.resize(n);
  demo.yd.resize(n);
  demo.ydd.resize(n);
  const double span = goal - y0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const MinJerk m = min_jerk(std::min(t / duration, 1.0));
    demo.t[k] = t;
    demo.y[k] = y0 + span * m.s;
    demo.yd[k] = span * m.ds / duration;
    demo.ydd[k] = span * m.dds / (duration * duration);
  }
  return demo;
}

void save_scalar_demo(const ScalarDemo& demo, std::ostream& out) {
  out << kScalarHeader << '\n';
  for (std::size_t k = 0; k < demo.t.size(); ++k) {
    out << format_double(demo.t[k]) << ',' << format_double(demo.y[k]) << ','
        << format_double(demo.yd[k]) << ',' << format_double(demo.ydd[k]) << '\n';
  }
  if (!out) throw Error("failed to write scalar demo");
}

ScalarDemo load_scalar_demo(std::istream& in) {
  ScalarDemo demo;
  bool header_seen = false;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = trim_cr(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (!header_seen) {
      if (sv != kScalarHeader) {
        throw ParseError(std::string("expected header '") + kScalarHeader + "'", line_no);
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_commas(sv);
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
    }
    demo.t.push_back(parse_double(fields[0], line_no));
    demo.y.push_back(parse_double(fields[1], line_no));
    demo.yd.push_back(parse_double(fields[2], line_no));
    demo.ydd.push_back(parse_double(fields[3], line_no));
    row_lines.push_back(line_no);
  }
  if (!header_seen) throw ParseError("missing header", line_no);
  if (demo.t.size() < 2) throw ParseError("a demo needs at least 2 samples", 0);
  demo.dt = (demo.t.back() - demo.t.front()) / static_cast<double>(demo.t.size() - 1);
  if (!(demo.dt > 0.0)) throw ParseError("timestamps must be increasing", row_lines.back());
  if (const std::size_t k = first_nonuniform(demo.t, demo.dt); k != 0) {
    throw ParseError("non-uniform timestamp", row_lines[k]);
  }
  return demo;
}

}  // namespace dqdmp
