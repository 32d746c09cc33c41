#include "liftmap/io.hpp"

#include <fstream>
#include <sstream>

namespace liftmap {

using nlohmann::json;

Model model_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("model json: top level must be an object");
  if (!j.contains("num_vars") || !j["num_vars"].is_number_integer())
    throw ValidationError("model json: missing integer field 'num_vars'");
  if (!j.contains("features") || !j["features"].is_array())
    throw ValidationError("model json: missing array field 'features'");

  int num_vars = j["num_vars"].get<int>();
  std::vector<Feature> feats;
  for (size_t i = 0; i < j["features"].size(); ++i) {
    const json& jf = j["features"][i];
    auto fail = [&](const std::string& msg) {
      throw ValidationError("model json: feature " + std::to_string(i) + ": " + msg);
    };
    if (!jf.is_object()) fail("must be an object");
    for (const char* key : {"scope", "table", "weight", "tie_cell"})
      if (!jf.contains(key)) fail(std::string("missing field '") + key + "'");
    Feature f;
    if (!jf["scope"].is_array()) fail("'scope' must be an array");
    for (const json& s : jf["scope"]) {
      if (!s.is_number_integer()) fail("'scope' entries must be integers");
      f.scope.push_back(s.get<int>());
    }
    if (!jf["table"].is_array()) fail("'table' must be an array");
    for (const json& t : jf["table"]) {
      if (!t.is_number()) fail("'table' entries must be numbers");
      f.table.push_back(t.get<double>());
    }
    if (!jf["weight"].is_number()) fail("'weight' must be a number");
    f.weight = jf["weight"].get<double>();
    if (!jf["tie_cell"].is_number_integer()) fail("'tie_cell' must be an integer");
    f.tie_cell = jf["tie_cell"].get<int>();
    feats.push_back(std::move(f));
  }
  return Model::make(num_vars, std::move(feats));
}

nlohmann::ordered_json model_to_json(const Model& m) {
  nlohmann::ordered_json j;
  j["num_vars"] = m.num_vars;
  j["features"] = nlohmann::ordered_json::array();
  for (const Feature& f : m.features) {
    nlohmann::ordered_json jf;
    jf["scope"] = f.scope;
    jf["table"] = f.table;
    jf["weight"] = f.weight;
    jf["tie_cell"] = f.tie_cell;
    j["features"].push_back(std::move(jf));
  }
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Model load_model_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("model json: " + std::string(e.what()));
  }
  return model_from_json(j);
}

}  // namespace liftmap
