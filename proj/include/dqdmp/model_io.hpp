#pragma once

// JSON model documents. Every document carries a format tag, a version and a
// variant tag; doubles are written in shortest round-trip form, so
// save → load → save reproduces the same bytes.

#include <iosfwd>
#include <string>
#include <variant>

#include "dqdmp/dmp.hpp"

namespace dqdmp {

using Model = std::variant<ClassicalDmp, QuaternionDmp, DualQuaternionDmp, PoseDecoupledDmp>;

inline constexpr int kModelFormatVersion = 1;

/// "classical", "quaternion", "dual-quaternion" or "pose-decoupled".
const char* variant_name(const Model& model);

/// A model together with the sampling step and position scale of the demo it
/// was trained on.
struct ModelDocument {
  Model model;
  double sample_dt{0.01};
  double position_scale{1.0};
};

void save_model(const ModelDocument& doc, std::ostream& out);
void save_model_file(const ModelDocument& doc, const std::string& path);

/// Throws ParseError for malformed documents, unknown versions or variants,
/// and for gains, bases or boundary poses that violate their invariants.
ModelDocument load_model(std::istream& in);
ModelDocument load_model_file(const std::string& path);

}  // namespace dqdmp
