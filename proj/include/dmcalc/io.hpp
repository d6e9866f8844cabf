#pragma once

#include <json.hpp>
#include <string>

#include "dmcalc/bayes.hpp"
#include "dmcalc/conditional.hpp"
#include "dmcalc/em_invert.hpp"
#include "dmcalc/tensor.hpp"

namespace dmcalc::io {

using json = nlohmann::ordered_json;

/// Matrix document {"n": int, "data": [n*n row-major reals]} plus optional
/// "kind" ("density" | "observable" | "projector") and "dims" for joints.
json matrix_to_json(const SpectralMatrix& m, const std::string& kind = "");
SpectralMatrix matrix_from_json(const json& j);  // applies symmetrize_build

json density_to_json(const Density& d);
Density density_from_json(const json& j);

json joint_to_json(const JointDensity& j);
JointDensity joint_from_json(const json& j);

json unit_vector_to_json(const UnitVector& u);
UnitVector unit_vector_from_json(const json& j);

json conditional_to_json(const FullConditional& c);
FullConditional conditional_from_json(const json& j);

json bayes_update_to_json(const BayesUpdate& u);
json inversion_result_to_json(const InversionResult& r);

json load_json(const std::string& path);
void save_json(const json& doc, const std::string& path);

}  // namespace dmcalc::io
