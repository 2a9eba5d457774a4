#include "lqbsde/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <vector>

#include "lqbsde/errors.hpp"

namespace lqbsde {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(const std::string& text, std::size_t line, const std::string& key) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ParseError(line, key, "expected a number, got '" + text + "'");
  return value;
}

Coefficient to_coefficient(const std::string& text, std::size_t line, const std::string& key) {
  if (text.rfind("table:", 0) != 0) return to_double(text, line, key);
  std::vector<std::pair<double, double>> knots;
  for (const auto& item : split(text.substr(6), ',')) {
    const auto tv = split(item, ':');
    if (tv.size() != 2) throw ParseError(line, key, "table entries must be t:v");
    knots.emplace_back(to_double(tv[0], line, key), to_double(tv[1], line, key));
  }
  try {
    return Coefficient::table(std::move(knots));
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, key, e.what());
  }
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  auto& cs = sc.coefficients;
  const std::map<std::string, Coefficient*> functions{
      {"a", &cs.a},   {"b1", &cs.b1}, {"b2", &cs.b2}, {"f1", &cs.f1}, {"f2", &cs.f2},
      {"c", &cs.c},   {"k1", &cs.k1}, {"k2", &cs.k2}, {"n1", &cs.n1}, {"n2", &cs.n2},
      {"l1", &cs.l1}, {"l2", &cs.l2}, {"m1", &cs.m1}, {"m2", &cs.m2}};
  const std::map<std::string, double*> constants{
      {"r1", &cs.r1}, {"r2", &cs.r2}, {"h1", &cs.h1}, {"h2", &cs.h2}, {"T", &sc.horizon}};

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, text, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));

    if (auto it = functions.find(key); it != functions.end()) {
      *it->second = to_coefficient(value, line, key);
    } else if (auto jt = constants.find(key); jt != constants.end()) {
      *jt->second = to_double(value, line, key);
    } else if (key == "steps") {
      const double n = to_double(value, line, key);
      if (n < 2 || n != static_cast<double>(static_cast<std::size_t>(n)))
        throw ParseError(line, key, "steps must be an integer >= 2");
      sc.steps = static_cast<std::size_t>(n);
      sc.steps_given = true;
    } else if (key == "pattern") {
      const auto p = parse_pattern(value);
      if (!p) throw ParseError(line, key, "unknown pattern '" + value + "'");
      sc.pattern = *p;
    } else if (key == "xi") {
      const auto parts = split(value, ',');
      if (parts.size() != 3) throw ParseError(line, key, "xi needs c0,c1,c2");
      sc.terminal = {to_double(parts[0], line, key), to_double(parts[1], line, key),
                     to_double(parts[2], line, key)};
    } else {
      throw ParseError(line, key, "unknown key");
    }
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, path, "cannot open scenario file");
  return parse_scenario(in);
}

ValidatedModel validate(const Scenario& scenario) {
  return validate(scenario.coefficients, scenario.terminal, scenario.pattern,
                  TimeGrid(scenario.horizon, scenario.steps));
}

}  // namespace lqbsde
