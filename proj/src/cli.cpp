#include "dqdmp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "dqdmp/compare.hpp"
#include "dqdmp/model_io.hpp"

namespace dqdmp {

namespace {

struct GenOptions {
  double radius{50.0};
  double duration{18.9};
  double dt{0.01};
  double from{0.0};
  double to{1.0};
  double position_scale{1.0};
  std::string output;
};

struct TrainOptions {
  std::string demo;
  std::string output;
  std::string variant{"dq"};
  std::string frame{"body"};
  std::string scheme{"A"};
  std::string rates{"step-matched"};
  std::string error{"vec"};
  std::optional<double> alpha_x;
  std::optional<double> tau;
  std::optional<int> kernels;
  std::optional<double> stiffness;
  std::optional<int> position_kernels;
  std::optional<double> position_stiffness;
  std::optional<int> orientation_kernels;
  std::optional<double> orientation_stiffness;
  double alpha_z{25.0};
  double beta_z{6.25};
  double damping_ratio{10.0};
};

struct RolloutCliOptions {
  std::string model;
  std::string output;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<double> tau;
  std::vector<double> goal;
};

struct CompareCliOptions {
  std::string demo;
  std::string output;
  std::string rollouts_prefix;
  std::string scheme{"A"};
  std::string rates{"step-matched"};
};

// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open '" + path + "' for writing");
  fn(file);
  file.close();
  if (!file) throw Error("failed to write '" + path + "'");
}

ScalarDemo load_scalar_demo_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_scalar_demo(in);
}

void report_fit(std::ostream& err, const std::string& label, const WeightFit& fit) {
  const Eigen::VectorXd rel = fit.relative_residual();
  err << label << " fit residual (relative):";
  for (Eigen::Index i = 0; i < rel.size(); ++i) err << ' ' << format_double(rel[i]);
  err << '\n';
}

Model train_model(const TrainOptions& o, std::ostream& err, double& sample_dt,
                  double& position_scale) {
  const KernelScheme scheme = kernel_scheme_from_string(o.scheme);
  const TargetRates rates = target_rates_from_string(o.rates);
  position_scale = 1.0;

  if (o.variant == "classical") {
    const ScalarDemo demo = load_scalar_demo_file(o.demo);
    if (demo.t.size() < 2) throw InvalidArgument("demo too short");
    sample_dt = demo.dt;
    const double duration = demo.t.back() - demo.t.front();
    const double tau = o.tau.value_or(duration);
    const GaussianBasis basis = make_basis(scheme, o.kernels.value_or(30),
                                           o.alpha_x.value_or(1.0), tau, duration, demo.dt);
    ClassicalTraining t = classical_train(demo, tau, {o.alpha_z, o.beta_z}, basis);
    report_fit(err, "classical", t.fit);
    return t.model;
  }

  const Trajectory raw = load_trajectory_file(o.demo);
  position_scale = raw.position_scale();
  const Trajectory demo = differentiate(apply_position_scale(raw));
  sample_dt = demo.dt();

  if (o.variant == "dq") {
    DualQuaternionConfig c;
    c.alpha_x = o.alpha_x.value_or(c.alpha_x);
    c.tau = o.tau.value_or(0.0);
    c.kernels = o.kernels.value_or(c.kernels);
    c.rotation_stiffness = o.orientation_stiffness.value_or(o.stiffness.value_or(1.0));
    c.position_stiffness = o.position_stiffness.value_or(o.stiffness.value_or(1.0));
    c.rotation_damping = damping_for(c.rotation_stiffness, o.damping_ratio);
    c.position_damping = damping_for(c.position_stiffness, o.damping_ratio);
    c.scheme = scheme;
    c.rates = rates;
    if (o.error == "vec") {
      c.error = RotationError::Vec;
    } else if (o.error == "log") {
      c.error = RotationError::Log;
    } else {
      throw InvalidArgument("unknown rotation error '" + o.error + "'");
    }
    DualQuaternionTraining t = train_dual_quaternion(demo, c);
    report_fit(err, "dual-quaternion", t.fit);
    return t.model;
  }
  if (o.variant == "quat") {
    Frame frame;
    if (o.frame == "body") {
      frame = Frame::Body;
    } else if (o.frame == "inertial") {
      frame = Frame::Inertial;
    } else {
      throw InvalidArgument("unknown frame '" + o.frame + "'");
    }
    const double tau = o.tau.value_or(demo.duration());
    const double k = o.stiffness.value_or(1.0);
    const GaussianBasis basis = make_basis(scheme, o.kernels.value_or(50),
                                           o.alpha_x.value_or(0.1), tau, demo.duration(),
                                           demo.dt());
    QuaternionTraining t = quat_train(demo, frame,
                                      RotationGains::scalar(k, damping_for(k, o.damping_ratio)),
                                      tau, basis, rates);
    report_fit(err, "quaternion", t.fit);
    return t.model;
  }
  if (o.variant == "pose") {
    PoseDecoupledConfig c;
    c.alpha_x = o.alpha_x.value_or(c.alpha_x);
    c.tau = o.tau.value_or(0.0);
    c.position_kernels = o.position_kernels.value_or(c.position_kernels);
    c.position_stiffness = o.position_stiffness.value_or(c.position_stiffness);
    c.position_damping = damping_for(c.position_stiffness, o.damping_ratio);
    c.orientation_kernels = o.orientation_kernels.value_or(c.orientation_kernels);
    c.orientation_stiffness = o.orientation_stiffness.value_or(c.orientation_stiffness);
    c.orientation_damping = damping_for(c.orientation_stiffness, o.damping_ratio);
    c.scheme = scheme;
    c.rates = rates;
    PoseDecoupledTraining t = pose_train(demo, c);
    report_fit(err, "position", t.position_fit);
    report_fit(err, "orientation", t.orientation_fit);
    return t.model;
  }
  throw InvalidArgument("unknown variant '" + o.variant + "'");
}

// Goal override: position (3) or position + scalar-first quaternion (7).
Pose parse_pose_goal(const std::vector<double>& g, const Pose& current, double scale) {
  Pose goal = current;
  if (g.size() != 3 && g.size() != 7) {
    throw InvalidArgument("--goal expects px,py,pz or px,py,pz,qw,qx,qy,qz");
  }
  goal.position = Vec3(g[0], g[1], g[2]) * scale;
  if (g.size() == 7) {
    goal.orientation = UnitQuaternion::from_unit(Quaternion{g[3], Vec3(g[4], g[5], g[6])}, 1e-3);
  }
  return goal;
}

void run_rollout(const RolloutCliOptions& o, std::ostream& out) {
  const ModelDocument doc = load_model_file(o.model);
  const double scale = doc.position_scale;

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        double tau0;
        if constexpr (std::is_same_v<T, PoseDecoupledDmp>) {
          tau0 = m.position.tau;
        } else {
          tau0 = m.tau;
        }
        const double tau = o.tau.value_or(tau0);
        const double dt = o.dt.value_or(doc.sample_dt * tau / tau0);
        const double duration = o.duration.value_or(1.5 * tau);
        if (!(dt > 0.0)) throw InvalidArgument("--dt must be positive");

        if constexpr (std::is_same_v<T, ClassicalDmp>) {
          RolloutOptions<Eigen::VectorXd> opts{dt, duration, std::nullopt, tau};
          if (!o.goal.empty()) {
            if (static_cast<int>(o.goal.size()) != m.dims()) {
              throw InvalidArgument("--goal needs " + std::to_string(m.dims()) + " values");
            }
            opts.goal = Eigen::Map<const Eigen::VectorXd>(o.goal.data(), m.dims());
          }
          with_output(o.output, out, [&](std::ostream& s) {
            write_classical_table(classical_rollout(m, m.y0, opts), s);
          });
        } else if constexpr (std::is_same_v<T, QuaternionDmp>) {
          RolloutOptions<UnitQuaternion> opts{dt, duration, std::nullopt, tau};
          if (!o.goal.empty()) {
            if (o.goal.size() != 4) throw InvalidArgument("--goal expects qw,qx,qy,qz");
            opts.goal = UnitQuaternion::from_unit(
                Quaternion{o.goal[0], Vec3(o.goal[1], o.goal[2], o.goal[3])}, 1e-3);
          }
          with_output(o.output, out, [&](std::ostream& s) {
            write_rollout_table(rollout_rows(quat_rollout(m, m.q0, Vec3::Zero(), opts), m.frame),
                                s);
          });
        } else if constexpr (std::is_same_v<T, DualQuaternionDmp>) {
          RolloutOptions<UnitDualQuaternion> opts{dt, duration, std::nullopt, tau};
          if (!o.goal.empty()) {
            opts.goal = dq_from_pose(parse_pose_goal(o.goal, dq_to_pose(m.goal), scale));
          }
          with_output(o.output, out, [&](std::ostream& s) {
            write_rollout_table(
                rollout_rows(dq_rollout(m, m.start, Twist::zero(), opts), scale), s);
          });
        } else {
          RolloutOptions<Pose> opts{dt, duration, std::nullopt, tau};
          const Pose goal{Vec3(m.position.goal), m.orientation.goal};
          if (!o.goal.empty()) opts.goal = parse_pose_goal(o.goal, goal, scale);
          const Pose start{Vec3(m.position.y0), m.orientation.q0};
          with_output(o.output, out, [&](std::ostream& s) {
            write_rollout_table(rollout_rows(pose_rollout(m, start, opts), scale), s);
          });
        }
      },
      doc.model);
}

void print_summary(std::ostream& err, const ModelReport& r) {
  err << r.model << ": position RMSE " << format_double(r.position_rmse)
      << " m, orientation RMSE " << format_double(r.orientation_rmse) << " rad, terminal "
      << format_double(r.terminal_position) << " m / " << format_double(r.terminal_orientation)
      << " rad, consistency residual " << format_double(r.consistency_residual) << " m/s\n";
}

void run_compare(const CompareCliOptions& o, std::ostream& out, std::ostream& err) {
  const Trajectory demo = load_trajectory_file(o.demo);
  CompareConfig config;
  config.dual_quaternion.scheme = config.pose.scheme = kernel_scheme_from_string(o.scheme);
  config.dual_quaternion.rates = config.pose.rates = target_rates_from_string(o.rates);
  const Comparison c = compare_models(demo, config);
  with_output(o.output, out, [&](std::ostream& s) {
    write_comparison({c.pose_report, c.dual_quaternion_report}, s);
  });
  if (!o.rollouts_prefix.empty()) {
    with_output(o.rollouts_prefix + "pose_decoupled.csv", out,
                [&](std::ostream& s) { write_rollout_table(c.pose_rows, s); });
    with_output(o.rollouts_prefix + "dual_quaternion.csv", out,
                [&](std::ostream& s) { write_rollout_table(c.dual_quaternion_rows, s); });
  }
  print_summary(err, c.pose_report);
  print_summary(err, c.dual_quaternion_report);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual quaternion dynamic motion primitives", "dqdmp"};
  app.require_subcommand(1);

  // gen
  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic demonstration");
  gen_cmd->require_subcommand(1);
  CLI::App* som = gen_cmd->add_subcommand("somersault", "Vertical loop with min-jerk timing");
  som->add_option("--radius", gen.radius, "Loop radius (m)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  som->add_option("--duration", gen.duration, "Duration (s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  som->add_option("--dt", gen.dt, "Sample step (s)")->check(CLI::PositiveNumber)->capture_default_str();
  som->add_option("--position-scale", gen.position_scale, "Position scale metadata")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  som->add_option("-o,--output", gen.output, "Output CSV (default: stdout)");
  CLI::App* mj = gen_cmd->add_subcommand("minjerk", "Scalar minimum-jerk demonstration");
  mj->add_option("--from", gen.from, "Start value")->capture_default_str();
  mj->add_option("--to", gen.to, "Goal value")->capture_default_str();
  mj->add_option("--duration", gen.duration, "Duration (s)")->check(CLI::PositiveNumber);
  mj->add_option("--dt", gen.dt, "Sample step (s)")->check(CLI::PositiveNumber)->capture_default_str();
  mj->add_option("-o,--output", gen.output, "Output CSV (default: stdout)");

  // train
  TrainOptions train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model on a demonstration");
  train_cmd->add_option("demo,--demo", train.demo, "Demonstration CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("-o,--output", train.output, "Model file (default: stdout)");
  train_cmd->add_option("--variant", train.variant, "classical | quat | dq | pose")
      ->check(CLI::IsMember({"classical", "quat", "dq", "pose"}))
      ->capture_default_str();
  train_cmd->add_option("--frame", train.frame, "Quaternion DMP frame: body | inertial")
      ->check(CLI::IsMember({"body", "inertial"}))
      ->capture_default_str();
  train_cmd->add_option("--scheme", train.scheme, "Kernel layout: A | B")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
  train_cmd->add_option("--rates", train.rates, "Training velocities: step-matched | central")
      ->check(CLI::IsMember({"step-matched", "central"}))
      ->capture_default_str();
  train_cmd->add_option("--error", train.error, "Dual quaternion rotation error: vec | log")
      ->check(CLI::IsMember({"vec", "log"}))
      ->capture_default_str();
  train_cmd->add_option("--alpha-x", train.alpha_x, "Phase decay rate")->check(CLI::PositiveNumber);
  train_cmd->add_option("--tau", train.tau, "Time scale (s, default: demo duration)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--kernels", train.kernels, "Kernel count")->check(CLI::Range(2, 100000));
  train_cmd->add_option("--stiffness", train.stiffness, "Stiffness for every channel")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--position-kernels", train.position_kernels, "Position kernel count")
      ->check(CLI::Range(2, 100000));
  train_cmd->add_option("--position-stiffness", train.position_stiffness, "Translational stiffness")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--orientation-kernels", train.orientation_kernels,
                        "Orientation kernel count")
      ->check(CLI::Range(2, 100000));
  train_cmd->add_option("--orientation-stiffness", train.orientation_stiffness,
                        "Rotational stiffness")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--damping-ratio", train.damping_ratio, "D = ratio * sqrt(K)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--alpha-z", train.alpha_z, "Classical damping gain")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--beta-z", train.beta_z, "Classical stiffness ratio")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // rollout
  RolloutCliOptions roll;
  CLI::App* roll_cmd = app.add_subcommand("rollout", "Integrate a trained model");
  roll_cmd->add_option("model,--model", roll.model, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  roll_cmd->add_option("-o,--output", roll.output, "Rollout CSV (default: stdout)");
  roll_cmd->add_option("--dt", roll.dt, "Step (s, default: demo step scaled by tau)")
      ->check(CLI::PositiveNumber);
  roll_cmd->add_option("--duration", roll.duration, "Duration (s, default: 1.5 tau)")
      ->check(CLI::NonNegativeNumber);
  roll_cmd->add_option("--tau", roll.tau, "Time scale override (s)")->check(CLI::PositiveNumber);
  roll_cmd->add_option("--goal", roll.goal, "Goal override, comma separated")->delimiter(',');

  // compare
  CompareCliOptions cmp;
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "Compare the dual quaternion and pose-decoupled DMPs");
  cmp_cmd->add_option("demo,--demo", cmp.demo, "Demonstration CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("-o,--output", cmp.output, "Report CSV (default: stdout)");
  cmp_cmd->add_option("--rollouts", cmp.rollouts_prefix,
                      "Write both rollout tables to <prefix>pose_decoupled.csv and "
                      "<prefix>dual_quaternion.csv");
  cmp_cmd->add_option("--scheme", cmp.scheme, "Kernel layout: A | B")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
  cmp_cmd->add_option("--rates", cmp.rates, "Training velocities: step-matched | central")
      ->check(CLI::IsMember({"step-matched", "central"}))
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*som) {
      Trajectory t = gen_somersault(gen.radius, gen.duration, gen.dt);
      t.set_position_scale(gen.position_scale);
      t.set_source("somersault radius=" + format_double(gen.radius) +
                   " duration=" + format_double(gen.duration));
      with_output(gen.output, out, [&](std::ostream& s) { save_trajectory(t, s); });
    } else if (*mj) {
      if (mj->count("--duration") == 0) gen.duration = 1.0;
      const ScalarDemo d = gen_min_jerk(gen.from, gen.to, gen.duration, gen.dt);
      with_output(gen.output, out, [&](std::ostream& s) { save_scalar_demo(d, s); });
    } else if (*train_cmd) {
      double sample_dt = 0.0;
      double scale = 1.0;
      Model model = train_model(train, err, sample_dt, scale);
      const ModelDocument doc{std::move(model), sample_dt, scale};
      with_output(train.output, out, [&](std::ostream& s) { save_model(doc, s); });
    } else if (*roll_cmd) {
      run_rollout(roll, out);
    } else if (*cmp_cmd) {
      run_compare(cmp, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace dqdmp
