#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "test_support.hpp"
#include "dqdmp/traj.hpp"

using namespace dqdmp;
using namespace dqdmp::test;

namespace {

std::string to_csv(const Trajectory& t) {
  std::ostringstream out;
  save_trajectory(t, out);
  return out.str();
}

Trajectory from_csv(const std::string& s) {
  std::istringstream in(s);
  return load_trajectory(in);
}

// Analytic pitch rate of the somersault.
double somersault_rate(double t, double duration) {
  const double u = t / duration;
  return 2.0 * M_PI * (30 * u * u - 60 * u * u * u + 30 * u * u * u * u) / duration;
}

double max_rate_error(double dt) {
  const double duration = 18.9;
  const Trajectory demo = differentiate(gen_somersault(50.0, duration, dt));
  double worst = 0.0;
  for (std::size_t k = 0; k < demo.size(); ++k) {
    const Vec3 truth(0.0, somersault_rate(demo.times()[k], duration), 0.0);
    worst = std::max(worst, (demo.derived().omega_body[k] - truth).norm());
  }
  return worst;
}

}  // namespace

TEST_CASE("loading") {
  const Trajectory two = from_csv("t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n0.01,0,0,0,1,0,0,0\n");
  CHECK(two.size() == 2);
  CHECK(two.dt() == doctest::Approx(0.01));
  CHECK(two.position_scale() == 1.0);

  const std::string bad =
      "t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n0.01,0,0,0,0.9,0,0,0\n0.02,0,0,0,1,0,0,0\n";
  try {
    from_csv(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  // Slightly off-unit quaternions are renormalized.
  const Trajectory fixed = from_csv("t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1.0005,0,0,0\n1,0,0,0,1,0,0,0\n");
  CHECK(std::abs(fixed.pose(0).orientation.quat().norm() - 1.0) <= 1e-15);

  CHECK_THROWS_AS(from_csv("t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n"), ParseError);
  CHECK_THROWS_AS(from_csv("0,0,0,0,1,0,0,0\n1,0,0,0,1,0,0,0\n"), ParseError);
  try {
    from_csv("t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n1,0,0,0,1,0,0,0\n2.5,0,0,0,1,0,0,0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 3);
  }
  try {
    from_csv("t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n1,0,zero,0,1,0,0,0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(from_csv("t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1,0,0\n1,0,0,0,1,0,0,0\n"),
                  ParseError);
}

TEST_CASE("sign continuity") {
  const Trajectory t = from_csv(
      "t,px,py,pz,qw,qx,qy,qz\n"
      "0,0,0,0,1,0,0,0\n"
      "1,0,0,0,-0.9950041652780258,-0.09983341664682815,0,0\n"
      "2,0,0,0,0.9800665778412416,0.19866933079506122,0,0\n"
      "3,0,0,0,-0.955336489125606,-0.29552020666133955,0,0\n");
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    CHECK(dot(t.pose(k).orientation, t.pose(k + 1).orientation) >= 0.0);
  }
  CHECK(t.pose(0).orientation.eta() == 1.0);
}

TEST_CASE("round trip") {
  Trajectory g = gen_somersault(50.0, 18.9, 0.01);
  g.set_position_scale(0.02);
  const std::string first = to_csv(g);
  const Trajectory back = from_csv(first);
  CHECK(back.position_scale() == 0.02);
  CHECK(back.source() == g.source());
  CHECK(to_csv(back) == first);
  CHECK(first.find(',') != std::string::npos);
  CHECK(first.find("\nt,px,py,pz,qw,qx,qy,qz\n") != std::string::npos);
  // Generators are deterministic.
  CHECK(to_csv(gen_somersault(50.0, 18.9, 0.01)) == to_csv(gen_somersault(50.0, 18.9, 0.01)));
}

TEST_CASE("differentiation") {
  std::vector<double> t;
  std::vector<Pose> still;
  const Pose p{Vec3(1, -2, 3), quat_exp(Vec3(0.1, 0.2, -0.3))};
  for (int k = 0; k < 10; ++k) {
    t.push_back(k * 0.01);
    still.push_back(p);
  }
  const Trajectory c = differentiate(Trajectory(t, still));
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(c.derived().omega_body[k].norm() <= 1e-12);
    CHECK(c.derived().twist[k].vector().norm() <= 1e-12);
    CHECK(c.derived().twist_rate[k].vector().norm() <= 1e-12);
    CHECK(c.derived().velocity_inertial[k].norm() <= 1e-12);
    CHECK(c.derived().twist[k].frame == Frame::Body);
    CHECK(c.derived().twist_rate[k].frame == Frame::Body);
  }

  // Constant body rate.
  const Vec3 w(0.4, -0.9, 1.3);
  std::vector<Pose> spin;
  for (std::size_t k = 0; k < t.size(); ++k) {
    spin.push_back({Vec3::Zero(), quat_step_body(p.orientation, w, t[k])});
  }
  const Trajectory s = differentiate(Trajectory(t, spin));
  for (const Vec3& r : s.derived().omega_body) CHECK((r - w).cwiseAbs().maxCoeff() <= 1e-4);

  const Trajectory short_one({0.0, 0.01, 0.02}, {p, p, p});
  CHECK_THROWS_AS(differentiate(short_one), InvalidArgument);
  CHECK_THROWS_AS(short_one.derived(), std::logic_error);
}

TEST_CASE("differentiation error is second order") {
  const double coarse = max_rate_error(0.02);
  const double fine = max_rate_error(0.01);
  MESSAGE("max ω error: dt 0.02 " << coarse << ", dt 0.01 " << fine);
  CHECK(coarse / fine >= 3.5);
}

TEST_CASE("somersault generator") {
  const double r = 50.0, duration = 18.9;
  const Trajectory raw = gen_somersault(r, duration, 0.01);
  CHECK(raw.size() == 1891);
  const Trajectory d = differentiate(raw);
  const Pose& first = d.pose(0);
  const Pose& last = d.poses().back();
  CHECK(first.position.norm() <= 1e-12);
  CHECK((last.position - first.position).norm() <= 1e-9);
  CHECK(geodesic_distance(first.orientation, last.orientation) <= 1e-9);
  CHECK(std::abs(somersault_rate(0.0, duration)) == 0.0);
  CHECK(d.derived().omega_body.front().norm() <= 1e-4);
  CHECK(d.derived().omega_body.back().norm() <= 1e-4);

  const Pose& mid = d.pose(945);
  CHECK(std::abs(d.times()[945] - duration / 2) <= 1e-12);
  CHECK((mid.position - Vec3(0, 0, 2 * r)).norm() <= 1e-9);
  CHECK((quat_to_rotmat(mid.orientation) - Vec3(-1, 1, -1).asDiagonal().toDenseMatrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-9);

  // Inertial velocity agrees with the body velocity rotated out. The
  // residual is O(dt²) and proportional to R.
  const auto consistency = [](const Trajectory& t) {
    double worst = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const Vec3 v = quat_to_rotmat(t.pose(k).orientation) * t.derived().twist[k].v;
      worst = std::max(worst, (t.derived().velocity_inertial[k] - v).norm());
    }
    return worst;
  };
  const double at_10 = consistency(differentiate(gen_somersault(10.0, duration, 0.01)));
  const double at_50 = consistency(d);
  const double at_50_fine = consistency(differentiate(gen_somersault(r, duration, 0.005)));
  const double peak_speed = r * somersault_rate(duration / 2, duration);
  MESSAGE("kinematic consistency at 100 Hz: R = 10 " << at_10 << " m/s, R = 50 " << at_50
                                                    << " m/s (peak speed " << peak_speed << ")");
  CHECK(at_10 <= 1e-3);
  CHECK(at_50 <= 1e-4 * peak_speed);
  CHECK(at_50 / at_50_fine >= 3.5);

  // Rates are smooth: no sample spikes above 10× its neighbours.
  const auto& rates = d.derived().twist_rate;
  for (std::size_t k = 1; k + 1 < rates.size(); ++k) {
    const double here = rates[k].vector().norm();
    const double around = std::max(rates[k - 1].vector().norm(), rates[k + 1].vector().norm());
    CHECK(std::isfinite(here));
    CHECK(here <= 10.0 * around + 1e-9);
  }

  CHECK_THROWS_AS(gen_somersault(0.0, 1.0, 0.01), InvalidArgument);
  CHECK_THROWS_AS(gen_somersault(1.0, 0.01, 0.01), InvalidArgument);
  CHECK_THROWS_AS(gen_somersault(1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("resampling") {
  const Trajectory g = gen_somersault(50.0, 18.9, 0.01);
  const Trajectory same = resample(g, 0.01);
  CHECK(to_csv(same) == to_csv(g));

  const Trajectory coarse = resample(g, 0.02);
  CHECK(coarse.size() == 946);
  CHECK(coarse.pose(0).position == g.pose(0).position);
  CHECK(coarse.poses().back().position == g.poses().back().position);
  CHECK(coarse.poses().back().orientation.coeffs() == g.poses().back().orientation.coeffs());

  const Trajectory back = resample(coarse, 0.01);
  REQUIRE(back.size() == g.size());
  double pos = 0.0, rot = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    pos = std::max(pos, (back.pose(k).position - g.pose(k).position).norm());
    rot = std::max(rot, geodesic_distance(back.pose(k).orientation, g.pose(k).orientation));
  }
  MESSAGE("down/up resampling deviation " << pos << " m, " << rot << " rad");
  CHECK(pos < 1e-3);
  CHECK(rot < 1e-3);
}

TEST_CASE("position scale") {
  Trajectory g = gen_somersault(50.0, 18.9, 0.01);
  CHECK_THROWS_AS(g.set_position_scale(0.0), InvalidArgument);
  g.set_position_scale(0.02);
  const Trajectory s = apply_position_scale(g);
  CHECK(s.position_scale() == 1.0);
  CHECK((s.pose(945).position - Vec3(0, 0, 2.0)).norm() <= 1e-12);
}

TEST_CASE("min-jerk generator") {
  const ScalarDemo d = gen_min_jerk(0.5, 2.0, 1.0, 0.01);
  CHECK(d.t.size() == 101);
  CHECK(d.y.front() == 0.5);
  CHECK(std::abs(d.y.back() - 2.0) <= 1e-15);
  CHECK(d.yd.front() == 0.0);
  CHECK(std::abs(d.yd.back()) <= 1e-12);
  CHECK(d.ydd.front() == 0.0);
  CHECK(std::abs(d.y[50] - 1.25) <= 1e-15);

  // ÿ against central differences of ẏ. The difference error is
  // dt²/6·y⁗, so the 1e-6 bar holds for slow motions; check O(dt²) scaling
  // on the fast one.
  const ScalarDemo slow = gen_min_jerk(0.0, 1.0, 10.0, 0.01);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < slow.t.size(); ++k) {
    worst = std::max(worst, std::abs((slow.yd[k + 1] - slow.yd[k - 1]) / 0.02 - slow.ydd[k]));
  }
  CHECK(worst <= 1e-6);
  const auto fast_error = [](double dt) {
    const ScalarDemo f = gen_min_jerk(0.0, 1.0, 1.0, dt);
    double w = 0.0;
    for (std::size_t k = 1; k + 1 < f.t.size(); ++k) {
      w = std::max(w, std::abs((f.yd[k + 1] - f.yd[k - 1]) / (2 * dt) - f.ydd[k]));
    }
    return w;
  };
  CHECK(fast_error(0.01) / fast_error(0.005) >= 3.5);

  const ScalarDemo flat = gen_min_jerk(1.5, 1.5, 1.0, 0.01);
  for (std::size_t k = 0; k < flat.t.size(); ++k) {
    CHECK(flat.y[k] == 1.5);
    CHECK(flat.yd[k] == 0.0);
  }

  std::ostringstream out;
  save_scalar_demo(d, out);
  std::istringstream in(out.str());
  const ScalarDemo loaded = load_scalar_demo(in);
  CHECK(loaded.y == d.y);
  CHECK(loaded.dt == doctest::Approx(0.01));
  CHECK_THROWS_AS(gen_min_jerk(0, 1, 0.01, 0.01), InvalidArgument);
}
