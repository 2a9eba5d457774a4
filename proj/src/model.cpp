#include "lqbsde/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lqbsde/errors.hpp"

namespace lqbsde {

TimeGrid::TimeGrid(double horizon, std::size_t steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / static_cast<double>(steps)) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw OutOfRange("time grid horizon must be positive and finite");
  if (steps < 2) throw OutOfRange("time grid needs at least 2 steps");
}

Coefficient::Coefficient(double value) : times_{0.0}, values_{value} {}

Coefficient Coefficient::table(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw std::invalid_argument("coefficient table has no knots");
  std::sort(knots.begin(), knots.end());
  Coefficient out;
  out.times_.clear();
  out.values_.clear();
  for (const auto& [t, v] : knots) {
    if (!out.times_.empty() && t == out.times_.back())
      throw std::invalid_argument("coefficient table has repeated knot time");
    out.times_.push_back(t);
    out.values_.push_back(v);
  }
  return out;
}

double Coefficient::operator()(double t) const {
  if (times_.size() == 1 || t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

std::string_view to_string(InformationPattern pattern) {
  switch (pattern) {
    case InformationPattern::SymmetricW2: return "symmetric_w2";
    case InformationPattern::FullVsW2: return "full_vs_w2";
    case InformationPattern::W1VsW2: return "w1_vs_w2";
  }
  return "unknown";
}

std::optional<InformationPattern> parse_pattern(std::string_view text) {
  if (text == "symmetric_w2" || text == "i") return InformationPattern::SymmetricW2;
  if (text == "full_vs_w2" || text == "ii") return InformationPattern::FullVsW2;
  if (text == "w1_vs_w2" || text == "iii") return InformationPattern::W1VsW2;
  return std::nullopt;
}

CoefficientSample ValidatedModel::at(double t) const {
  const auto& s = coefficients_;
  return {s.a(t),  s.b1(t), s.b2(t), s.f1(t), s.f2(t), s.c(t),  s.k1(t),
          s.k2(t), s.n1(t), s.n2(t), s.l1(t), s.l2(t), s.m1(t), s.m2(t)};
}

namespace {

bool relatively_equal(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

}  // namespace

ValidatedModel validate(const CoefficientSet& coefficients, const TerminalCondition& terminal,
                        InformationPattern pattern, const TimeGrid& grid) {
  constexpr double kTol = 1e-12;
  if (!(coefficients.r1 >= 0.0) || !(coefficients.r2 >= 0.0))
    throw NonpositiveWeight("r1 and r2 must be nonnegative");
  for (double v : {coefficients.r1, coefficients.r2, coefficients.h1, coefficients.h2,
                   terminal.c0, terminal.c1, terminal.c2})
    if (!std::isfinite(v)) throw OutOfRange("nonfinite constant in model data");

  const ValidatedModel model(coefficients, terminal, pattern, grid);
  bool f2_nonzero = false;
  for (std::size_t k = 0; k < grid.points(); ++k) {
    const CoefficientSample& s = model.node(k);
    for (double v : {s.a, s.b1, s.b2, s.f1, s.f2, s.c, s.k1, s.k2, s.n1, s.n2, s.l1, s.l2,
                     s.m1, s.m2})
      if (!std::isfinite(v))
        throw OutOfRange("nonfinite coefficient at grid point " + std::to_string(k));
    if (!(s.l1 > 0.0) || !(s.l2 > 0.0) || !(s.m1 > 0.0) || !(s.m2 > 0.0))
      throw NonpositiveWeight("l and m weights must be positive (grid point " +
                              std::to_string(k) + ")");
    if (!relatively_equal(s.gain1(), s.gain2(), kTol))
      throw AssumptionViolation("A1", k, "b1^2/m1 != b2^2/m2");
    if (s.f1 != 0.0) throw AssumptionViolation("A1", k, "f1 != 0");
    if (s.f2 != 0.0) {
      f2_nonzero = true;
      if (pattern == InformationPattern::W1VsW2) throw AssumptionViolation("A2", k, "f2 != 0");
    }
  }
  if (f2_nonzero && (coefficients.r1 == 0.0 || coefficients.r2 == 0.0))
    throw SingularRatio("patterns with f2 != 0 need r1 > 0 and r2 > 0");
  return model;
}

ValidatedModel with_grid(const ValidatedModel& model, const TimeGrid& grid) {
  return validate(model.coefficients(), model.terminal(), model.pattern(), grid);
}

ValidatedModel with_pattern(const ValidatedModel& model, InformationPattern pattern) {
  return validate(model.coefficients(), model.terminal(), pattern, model.grid());
}

ValidatedModel with_terminal(const ValidatedModel& model, const TerminalCondition& terminal) {
  return validate(model.coefficients(), terminal, model.pattern(), model.grid());
}

CoefficientSample sample_coefficients(const ValidatedModel& model, double t) {
  if (!(t >= 0.0 && t <= model.grid().horizon()))
    throw OutOfRange("time " + std::to_string(t) + " outside [0, T]");
  return model.at(t);
}

double conditional_terminal(const TerminalCondition& terminal, std::optional<double> observed,
                            ConditioningMode mode) {
  switch (mode) {
    case ConditioningMode::GivenW1: return terminal.c0 + terminal.c1 * observed.value();
    case ConditioningMode::GivenW2: return terminal.c0 + terminal.c2 * observed.value();
    case ConditioningMode::Mean: return terminal.c0;
  }
  return terminal.c0;
}

}  // namespace lqbsde
