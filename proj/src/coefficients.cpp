#include "boa/coefficients.hpp"

#include <json.hpp>

namespace boa {

std::vector<CoefficientSet> parse_coefficient_sets(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("coefficient file: ") + e.what());
  }
  if (!doc.contains("coefficient_sets") || !doc["coefficient_sets"].is_array()) {
    throw ConfigError("coefficient file: missing \"coefficient_sets\" array");
  }
  std::vector<CoefficientSet> sets;
  for (const auto& entry : doc["coefficient_sets"]) {
    CoefficientSet set;
    set.name = entry.at("name").get<std::string>();
    set.description = entry.value("description", "");
    set.coefficients.alpha = entry.at("alpha").get<std::vector<double>>();
    if (entry.contains("beta")) {
      set.coefficients.beta = entry["beta"].get<std::vector<double>>();
      set.has_beta = true;
    } else {
      set.coefficients.beta.assign(set.coefficients.alpha.size(), MixCoefficients::kInitialValue);
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

const std::vector<CoefficientSet>& shipped_coefficient_sets() {
  static const std::vector<CoefficientSet> sets = parse_coefficient_sets(bundled_coefficients_json());
  return sets;
}

const CoefficientSet& shipped_coefficient_set(std::string_view name) {
  for (const auto& set : shipped_coefficient_sets()) {
    if (set.name == name) return set;
  }
  throw ConfigError("unknown coefficient set '" + std::string(name) + "'");
}

}  // namespace boa
