#include "dqdmp/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dqdmp {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormatTag = "dqdmp-model";

template <typename Derived>
json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Derived>
json vector_to_json(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                                 const char* what) {
  if (!j.is_array() || (rows >= 0 && static_cast<Eigen::Index>(j.size()) != rows)) {
    throw ParseError(std::string(what) + ": wrong number of rows", 0);
  }
  const auto r = static_cast<Eigen::Index>(j.size());
  const Eigen::Index c = r == 0 ? std::max<Eigen::Index>(cols, 0)
                                : static_cast<Eigen::Index>(j.at(0).size());
  if (cols >= 0 && c != cols) throw ParseError(std::string(what) + ": wrong number of columns", 0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw ParseError(std::string(what) + ": ragged matrix", 0);
    }
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index size, const char* what) {
  if (!j.is_array() || (size >= 0 && static_cast<Eigen::Index>(j.size()) != size)) {
    throw ParseError(std::string(what) + ": wrong length", 0);
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json quat_to_json(const UnitQuaternion& q) { return vector_to_json(q.coeffs()); }

UnitQuaternion quat_from_json(const json& j, const char* what) {
  const Vec4 c = vector_from_json(j, 4, what);
  return UnitQuaternion::from_unit(Quaternion::from_coeffs(c), 1e-6);
}

json dq_to_json(const UnitDualQuaternion& dq) {
  return json{{"real", vector_to_json(dq.dq().real.coeffs())},
              {"dual", vector_to_json(dq.dq().dual.coeffs())}};
}

UnitDualQuaternion dq_from_json(const json& j, const char* what) {
  const Vec4 r = vector_from_json(j.at("real"), 4, what);
  const Vec4 d = vector_from_json(j.at("dual"), 4, what);
  return UnitDualQuaternion::checked({Quaternion::from_coeffs(r), Quaternion::from_coeffs(d)});
}

json basis_to_json(const GaussianBasis& b) {
  return json{{"scheme", to_string(b.scheme())},
              {"n", b.size()},
              {"alpha_x", b.alpha_x()},
              {"centers", b.centers()},
              {"widths", b.widths()}};
}

GaussianBasis basis_from_json(const json& j) {
  GaussianBasis b = GaussianBasis::from_parts(
      kernel_scheme_from_string(j.at("scheme").get<std::string>()),
      j.at("alpha_x").get<double>(), j.at("centers").get<std::vector<double>>(),
      j.at("widths").get<std::vector<double>>());
  if (j.at("n").get<int>() != b.size()) throw ParseError("basis: n does not match centers", 0);
  return b;
}

// Weights are stored dims × N.
Eigen::MatrixXd weights_from_json(const json& j, Eigen::Index dims, const GaussianBasis& b) {
  return matrix_from_json(j, dims, b.size(), "weights").transpose();
}

json classical_to_json(const ClassicalDmp& m) {
  return json{{"tau", m.tau},
              {"gains", {{"alpha_z", m.gains.alpha_z}, {"beta_z", m.gains.beta_z}}},
              {"basis", basis_to_json(m.basis)},
              {"weights", matrix_to_json(m.weights.transpose())},
              {"y0", vector_to_json(m.y0)},
              {"goal", vector_to_json(m.goal)}};
}

ClassicalDmp classical_from_json(const json& j) {
  ClassicalGains gains{j.at("gains").at("alpha_z").get<double>(),
                       j.at("gains").at("beta_z").get<double>()};
  gains.validate();
  GaussianBasis basis = basis_from_json(j.at("basis"));
  Eigen::VectorXd goal = vector_from_json(j.at("goal"), -1, "goal");
  Eigen::VectorXd y0 = vector_from_json(j.at("y0"), goal.size(), "y0");
  Eigen::MatrixXd w = weights_from_json(j.at("weights"), goal.size(), basis);
  const double tau = j.at("tau").get<double>();
  PhaseParams{basis.alpha_x(), tau}.validate();
  return {gains, tau, basis, std::move(w), std::move(y0), std::move(goal)};
}

json quaternion_to_json(const QuaternionDmp& m) {
  return json{{"frame", to_string(m.frame)},
              {"tau", m.tau},
              {"gains", {{"K", matrix_to_json(m.gains.K)}, {"D", matrix_to_json(m.gains.D)}}},
              {"basis", basis_to_json(m.basis)},
              {"weights", matrix_to_json(m.weights.transpose())},
              {"q0", quat_to_json(m.q0)},
              {"goal", quat_to_json(m.goal)}};
}

Frame frame_from_string(const std::string& s) {
  if (s == to_string(Frame::Body)) return Frame::Body;
  if (s == to_string(Frame::Inertial)) return Frame::Inertial;
  throw ParseError("unknown frame '" + s + "'", 0);
}

QuaternionDmp quaternion_from_json(const json& j) {
  RotationGains gains{matrix_from_json(j.at("gains").at("K"), 3, 3, "K"),
                      matrix_from_json(j.at("gains").at("D"), 3, 3, "D")};
  gains.validate();
  GaussianBasis basis = basis_from_json(j.at("basis"));
  Eigen::MatrixXd w = weights_from_json(j.at("weights"), 3, basis);
  const double tau = j.at("tau").get<double>();
  PhaseParams{basis.alpha_x(), tau}.validate();
  return {frame_from_string(j.at("frame").get<std::string>()),
          gains,
          tau,
          basis,
          std::move(w),
          quat_from_json(j.at("q0"), "q0"),
          quat_from_json(j.at("goal"), "goal")};
}

const char* to_string(RotationError e) { return e == RotationError::Vec ? "vec" : "log"; }

RotationError rotation_error_from_string(const std::string& s) {
  if (s == "vec") return RotationError::Vec;
  if (s == "log") return RotationError::Log;
  throw ParseError("unknown rotation error '" + s + "'", 0);
}

json dual_quaternion_to_json(const DualQuaternionDmp& m) {
  return json{{"frame", to_string(Frame::Body)},
              {"tau", m.tau},
              {"error", to_string(m.error_mode)},
              {"gains", {{"K", matrix_to_json(m.gains.K)}, {"D", matrix_to_json(m.gains.D)}}},
              {"basis", basis_to_json(m.basis)},
              {"weights", matrix_to_json(m.weights.transpose())},
              {"start", dq_to_json(m.start)},
              {"goal", dq_to_json(m.goal)}};
}

DualQuaternionDmp dual_quaternion_from_json(const json& j) {
  if (j.at("frame").get<std::string>() != to_string(Frame::Body)) {
    throw ParseError("dual quaternion models are body-frame only", 0);
  }
  PoseGains gains{matrix_from_json(j.at("gains").at("K"), 6, 6, "K"),
                  matrix_from_json(j.at("gains").at("D"), 6, 6, "D")};
  gains.validate();
  GaussianBasis basis = basis_from_json(j.at("basis"));
  Eigen::MatrixXd w = weights_from_json(j.at("weights"), 6, basis);
  const double tau = j.at("tau").get<double>();
  PhaseParams{basis.alpha_x(), tau}.validate();
  return {gains,
          tau,
          basis,
          std::move(w),
          dq_from_json(j.at("start"), "start"),
          dq_from_json(j.at("goal"), "goal"),
          rotation_error_from_string(j.at("error").get<std::string>())};
}

json model_to_json(const Model& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ClassicalDmp>) {
          return classical_to_json(m);
        } else if constexpr (std::is_same_v<T, QuaternionDmp>) {
          return quaternion_to_json(m);
        } else if constexpr (std::is_same_v<T, DualQuaternionDmp>) {
          return dual_quaternion_to_json(m);
        } else {
          return json{{"position", classical_to_json(m.position)},
                      {"orientation", quaternion_to_json(m.orientation)}};
        }
      },
      model);
}

Model model_from_json(const std::string& variant, const json& j) {
  if (variant == "classical") return classical_from_json(j);
  if (variant == "quaternion") return quaternion_from_json(j);
  if (variant == "dual-quaternion") return dual_quaternion_from_json(j);
  if (variant == "pose-decoupled") {
    PoseDecoupledDmp m{classical_from_json(j.at("position")),
                       quaternion_from_json(j.at("orientation"))};
    if (m.position.dims() != 3) throw ParseError("pose-decoupled position must be 3-D", 0);
    return m;
  }
  throw ParseError("unknown model variant '" + variant + "'", 0);
}

}  // namespace

const char* variant_name(const Model& model) {
  switch (model.index()) {
    case 0: return "classical";
    case 1: return "quaternion";
    case 2: return "dual-quaternion";
    default: return "pose-decoupled";
  }
}

void save_model(const ModelDocument& doc, std::ostream& out) {
  json j{{"format", kFormatTag},
         {"version", kModelFormatVersion},
         {"variant", variant_name(doc.model)},
         {"sample_dt", doc.sample_dt},
         {"position_scale", doc.position_scale},
         {"model", model_to_json(doc.model)}};
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed to write model");
}

void save_model_file(const ModelDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_model(doc, out);
}

ModelDocument load_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid model document: ") + e.what(), 0);
  }
  try {
    if (j.at("format").get<std::string>() != kFormatTag) {
      throw ParseError("not a model document", 0);
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError("unsupported model format version " + std::to_string(version), 0);
    }
    const double scale = j.at("position_scale").get<double>();
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ParseError("invalid position_scale", 0);
    const double dt = j.at("sample_dt").get<double>();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParseError("invalid sample_dt", 0);
    return {model_from_json(j.at("variant").get<std::string>(), j.at("model")), dt, scale};
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid model document: ") + e.what(), 0);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid model document: ") + e.what(), 0);
  }
}

ModelDocument load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_model(in);
}

}  // namespace dqdmp
