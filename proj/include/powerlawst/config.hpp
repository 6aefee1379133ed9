#pragma once

// Lattice configuration documents: {"d": int, "extents": [int...], "alpha": float, "prefactor": float}.

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "powerlawst/core_model.hpp"

namespace powerlawst {

/// Raised for malformed configuration documents (unknown keys, wrong types).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LatticeConfig {
  int d = 1;
  std::vector<long> extents;
  double alpha = 3.0;
  double prefactor = 1.0;

  [[nodiscard]] Lattice lattice() const { return Lattice(d, extents); }
  [[nodiscard]] CouplingModel model() const {
    CouplingModel m{alpha, prefactor};
    m.validate();
    return m;
  }
};

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }
}

inline LatticeConfig lattice_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"d", "extents", "alpha", "prefactor"});
  LatticeConfig c;
  try {
    c.d = j.at("d").get<int>();
    c.extents = j.at("extents").get<std::vector<long>>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("prefactor")) c.prefactor = j.at("prefactor").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad lattice configuration: ") + e.what());
  }
  return c;
}

inline nlohmann::json to_json(const LatticeConfig& c) {
  return {{"d", c.d}, {"extents", c.extents}, {"alpha", c.alpha}, {"prefactor", c.prefactor}};
}

}  // namespace powerlawst
