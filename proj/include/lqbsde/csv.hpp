#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

namespace lqbsde {

// Shortest round-trip-safe rendering with 17 significant digits.
inline std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

inline void write_field(std::ostream& out, double value) { out << ',' << format_real(value); }

inline void write_field(std::ostream& out, const std::optional<double>& value) {
  out << ',';
  if (value) out << format_real(*value);
}

}  // namespace lqbsde
