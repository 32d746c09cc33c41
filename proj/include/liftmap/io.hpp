#pragma once

#include <json.hpp>

#include "liftmap/model.hpp"

namespace liftmap {

// Model file format:
//   { "num_vars": N,
//     "features": [ {"scope":[u] or [u,v], "table":[...], "weight": w, "tie_cell": k}, ... ] }
Model model_from_json(const nlohmann::json& j);
nlohmann::ordered_json model_to_json(const Model& m);

Model load_model_file(const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace liftmap
