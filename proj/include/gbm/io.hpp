#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "gbm/core.hpp"
#include "gbm/mechanism.hpp"

namespace gbm {

using Json = nlohmann::ordered_json;

/// Named parameter presets accepted by the CLI.
inline Parameters preset_parameters(const std::string& name) {
  if (name == "paper") return validate_parameters(1.4844, 1.1854, 0.7932);
  if (name == "nisan-ronen") return nr_baseline_params();
  throw ValidationError("unknown preset '" + name + "' (use paper or nisan-ronen)");
}

inline Json instance_to_json(const Instance& instance) {
  Json doc;
  doc["t"] = instance.times;
  return doc;
}

inline Instance instance_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("t")) {
    throw ValidationError("instance file must be an object with a \"t\" matrix");
  }
  const Json& t = doc["t"];
  if (!t.is_array()) {
    throw ValidationError("\"t\" must be an array of machine rows");
  }
  std::vector<std::vector<double>> raw;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Json& row = t[i];
    if (!row.is_array()) {
      throw ValidationError("t[" + std::to_string(i) + "] is not an array");
    }
    std::vector<double> entries;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].is_number()) {
        throw ValidationError("entry (machine " + std::to_string(i + 1) + ", task " +
                              std::to_string(j + 1) + ") is not a number");
      }
      entries.push_back(row[j].get<double>());
    }
    raw.push_back(std::move(entries));
  }
  return validate_instance(raw);
}

inline Json parameters_to_json(const Parameters& params) {
  Json doc;
  doc["alpha"] = params.alpha;
  doc["beta"] = params.beta;
  doc["r"] = params.r;
  return doc;
}

inline Parameters parameters_from_json(const Json& doc) {
  for (const char* key : {"alpha", "beta", "r"}) {
    if (!doc.contains(key) || !doc[key].is_number()) {
      throw ValidationError(std::string("parameters need a numeric \"") + key + "\"");
    }
  }
  return validate_parameters(doc["alpha"].get<double>(), doc["beta"].get<double>(),
                             doc["r"].get<double>());
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(load_json_file(path));
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline Parameters load_parameters(const std::string& path) {
  return parameters_from_json(load_json_file(path));
}

}  // namespace gbm
