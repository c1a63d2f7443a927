#pragma once

#include <string>

#include <json.hpp>

#include "basinlab/continuation.hpp"
#include "basinlab/deform.hpp"
#include "basinlab/local_models.hpp"

namespace basinlab {

using Json = nlohmann::json;

/// {"degree": d, "critical_points": [[re, im], ...], "origin_image": [re, im]}.
/// Coefficients are never written; they are re-derived on load.
Json to_json(const MarkedPolynomial& f);
MarkedPolynomial polynomial_from_json(const Json& j);

/// {"base": {"poles", "residues", "heights": [a, c, b], "slits", "sigma",
///  "central_leaf_singular"}, "degree", "representative", "marked_angle",
///  "critical_value_angles"}.
Json to_json(const LocalModelSurface& base);
Json to_json(const PointedLocalModelMap& lm);
LocalModelSurface surface_from_json(const Json& j);
PointedLocalModelMap local_model_from_json(const Json& j);

/// {"status", "status_s", "branch_parameters", "steps": [{"s", "polynomial", "residual"}]}.
Json to_json(const LiftedPath& path);

/// {"steps": [{"h", "polynomial", "min_critical_height", "residual", "epsilon"}],
///  "branch_events": [{"height", "zero", "candidates", "chosen", "policy"}]}.
Json to_json(const DeformationPath& path);

/// {"epsilon", "rotation_index", "verdict", "coverage", "distortion", "defect",
///  "samples": [{"f": [re, im], "g": [re, im], "distortion"}]}.
Json to_json(const ConjugacyReport& report);

/// Reads and parses a JSON file; throws ParseError.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace basinlab
