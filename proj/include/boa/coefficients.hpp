#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "boa/sampling.hpp"

namespace boa {

// A named set of learned (or initial) mixing weights.
struct CoefficientSet {
  std::string name;
  std::string description;
  MixCoefficients coefficients;
  bool has_beta = false;
};

// Text of data/coefficients.json as compiled into the library.
std::string_view bundled_coefficients_json();

// Parses a {"coefficient_sets": [...]} document. Sets without "beta" get the
// initial value for every upsampling stage.
std::vector<CoefficientSet> parse_coefficient_sets(std::string_view json_text);

const std::vector<CoefficientSet>& shipped_coefficient_sets();
// Throws ConfigError for unknown names.
const CoefficientSet& shipped_coefficient_set(std::string_view name);

}  // namespace boa
