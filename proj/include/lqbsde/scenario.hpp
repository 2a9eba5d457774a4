#pragma once

#include <cstddef>
#include <istream>
#include <string>

#include "lqbsde/model.hpp"

namespace lqbsde {

// Raw scenario as read from a `key = value` file, before validation.
struct Scenario {
  CoefficientSet coefficients;
  TerminalCondition terminal;
  InformationPattern pattern = InformationPattern::SymmetricW2;
  double horizon = 1.0;
  std::size_t steps = 1024;
  bool steps_given = false;
};

// Lines are `key = value`; `#` starts a comment. Throws ParseError naming the
// line and key for unknown keys or malformed values.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

ValidatedModel validate(const Scenario& scenario);

}  // namespace lqbsde
