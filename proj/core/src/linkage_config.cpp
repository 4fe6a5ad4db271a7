#include "lips/linkage_config.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "lips/errors.hpp"

namespace lips {

namespace {

using nlohmann::json;

constexpr const char* kKnownKeys[] = {"L1", "L2", "r1", "a1", "a2",
                                      "p1_neutral", "p2_neutral", "q_limits",
                                      "chi_limits"};

const json& require_key(const json& root, const char* key) {
  const auto it = root.find(key);
  if (it == root.end()) {
    throw SchemaError(std::string("geometry config is missing key '") + key +
                      "'");
  }
  return *it;
}

double as_number(const json& value, const char* key) {
  if (!value.is_number()) {
    throw SchemaError(std::string("geometry key '") + key +
                      "' must be a number");
  }
  return value.get<double>();
}

Eigen::Vector3d as_vec3(const json& value, const char* key) {
  if (!value.is_array() || value.size() != 3) {
    throw SchemaError(std::string("geometry key '") + key +
                      "' must be an array of three numbers");
  }
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    v[i] = as_number(value[i], key);
  }
  return v;
}

Eigen::Vector2d as_interval(const json& value, const char* key) {
  if (!value.is_array() || value.size() != 2) {
    throw SchemaError(std::string("geometry key '") + key +
                      "' must be an array of two numbers");
  }
  return {as_number(value[0], key), as_number(value[1], key)};
}

}  // namespace

AnkleGeometry load_linkage_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw SyntaxError(std::string("geometry config is not valid JSON: ") +
                      err.what());
  }
  if (!root.is_object()) {
    throw SchemaError("geometry config must be a JSON object");
  }
  for (const auto& item : root.items()) {
    bool known = false;
    for (const char* key : kKnownKeys) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw SchemaError("unknown geometry key '" + item.key() + "'");
    }
  }

  AnkleGeometry geom;
  geom.l1 = as_number(require_key(root, "L1"), "L1");
  geom.r1 = as_number(require_key(root, "r1"), "r1");
  geom.a1 = as_number(require_key(root, "a1"), "a1");
  geom.a2 = as_number(require_key(root, "a2"), "a2");
  geom.p1_neutral = as_vec3(require_key(root, "p1_neutral"), "p1_neutral");
  geom.p2_neutral = as_vec3(require_key(root, "p2_neutral"), "p2_neutral");
  geom.q_limits = as_interval(require_key(root, "q_limits"), "q_limits");

  const json& chi_limits = require_key(root, "chi_limits");
  if (!chi_limits.is_array() || chi_limits.size() != 2) {
    throw SchemaError(
        "geometry key 'chi_limits' must be [[phi_min, phi_max], "
        "[theta_min, theta_max]]");
  }
  geom.phi_limits = as_interval(chi_limits[0], "chi_limits");
  geom.theta_limits = as_interval(chi_limits[1], "chi_limits");

  const json& l2 = require_key(root, "L2");
  if (l2.is_string()) {
    if (l2.get<std::string>() != "auto") {
      throw SchemaError("geometry key 'L2' must be a number or \"auto\"");
    }
    geom.l2 = auto_rod_length(geom, 1);
    const double other = auto_rod_length(geom, 2);
    if (std::abs(other - geom.l2) > 1e-9) {
      std::ostringstream msg;
      msg << "L2=\"auto\" is ambiguous: side 1 closes at " << geom.l2
          << " but side 2 needs " << other;
      throw InvalidGeometry(msg.str());
    }
  } else {
    geom.l2 = as_number(l2, "L2");
  }

  validate_geometry(geom);
  return geom;
}

std::string dump_linkage_config(const AnkleGeometry& geom) {
  json root;
  root["L1"] = geom.l1;
  root["L2"] = geom.l2;
  root["r1"] = geom.r1;
  root["a1"] = geom.a1;
  root["a2"] = geom.a2;
  root["p1_neutral"] = {geom.p1_neutral.x(), geom.p1_neutral.y(),
                        geom.p1_neutral.z()};
  root["p2_neutral"] = {geom.p2_neutral.x(), geom.p2_neutral.y(),
                        geom.p2_neutral.z()};
  root["q_limits"] = {geom.q_limits[0], geom.q_limits[1]};
  root["chi_limits"] = {{geom.phi_limits[0], geom.phi_limits[1]},
                        {geom.theta_limits[0], geom.theta_limits[1]}};
  return root.dump(2) + "\n";
}

}  // namespace lips
