#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lqbsde {

// Uniform grid t_k = k*T/N, k = 0..N. The last node is T exactly.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t points() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return dt_; }
  double time(std::size_t k) const noexcept {
    return k == steps_ ? horizon_ : static_cast<double>(k) * dt_;
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
};

// A deterministic function of time: a constant, or a table of knots with
// linear interpolation (held flat outside the knot range).
class Coefficient {
 public:
  Coefficient(double value = 0.0);  // NOLINT(google-explicit-constructor)
  static Coefficient table(std::vector<std::pair<double, double>> knots);

  double operator()(double t) const;
  bool is_constant() const noexcept { return times_.size() == 1; }
  const std::vector<double>& knot_times() const noexcept { return times_; }
  const std::vector<double>& knot_values() const noexcept { return values_; }

  friend bool operator==(const Coefficient&, const Coefficient&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

struct CoefficientSet {
  Coefficient a, b1, b2, f1, f2, c;
  Coefficient k1, k2, n1, n2;
  Coefficient l1{1.0}, l2{1.0}, m1{1.0}, m2{1.0};
  double r1 = 0.0, r2 = 0.0;
  double h1 = 0.0, h2 = 0.0;

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;
};

// xi = c0 + c1 w1(T) + c2 w2(T)
struct TerminalCondition {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;

  double value(double w1_T, double w2_T) const noexcept { return c0 + c1 * w1_T + c2 * w2_T; }
  bool is_deterministic() const noexcept { return c1 == 0.0 && c2 == 0.0; }

  friend bool operator==(const TerminalCondition&, const TerminalCondition&) = default;
};

enum class InformationPattern { SymmetricW2, FullVsW2, W1VsW2 };

std::string_view to_string(InformationPattern pattern);
// Accepts "symmetric_w2"/"i", "full_vs_w2"/"ii", "w1_vs_w2"/"iii".
std::optional<InformationPattern> parse_pattern(std::string_view text);

struct CoefficientSample {
  double a, b1, b2, f1, f2, c, k1, k2, n1, n2, l1, l2, m1, m2;

  double gain1() const noexcept { return b1 * b1 / m1; }
  double gain2() const noexcept { return b2 * b2 / m2; }
  // b1 n1 + b2 n2 + c, the control-target part of the state drift.
  double offset_drift() const noexcept { return b1 * n1 + b2 * n2 + c; }

  friend bool operator==(const CoefficientSample&, const CoefficientSample&) = default;
};

class ValidatedModel {
 public:
  const CoefficientSet& coefficients() const noexcept { return coefficients_; }
  const TerminalCondition& terminal() const noexcept { return terminal_; }
  InformationPattern pattern() const noexcept { return pattern_; }
  const TimeGrid& grid() const noexcept { return grid_; }

  // Unchecked evaluation; t is expected inside [0, T].
  CoefficientSample at(double t) const;
  // Cached values at grid node k.
  const CoefficientSample& node(std::size_t k) const noexcept { return nodes_[k]; }

  friend bool operator==(const ValidatedModel&, const ValidatedModel&) = default;

 private:
  friend ValidatedModel validate(const CoefficientSet&, const TerminalCondition&,
                                 InformationPattern, const TimeGrid&);
  ValidatedModel(CoefficientSet coefficients, TerminalCondition terminal,
                 InformationPattern pattern, TimeGrid grid)
      : coefficients_(std::move(coefficients)),
        terminal_(terminal),
        pattern_(pattern),
        grid_(grid) {
    nodes_.reserve(grid_.points());
    for (std::size_t k = 0; k < grid_.points(); ++k) nodes_.push_back(at(grid_.time(k)));
  }

  CoefficientSet coefficients_;
  TerminalCondition terminal_;
  InformationPattern pattern_;
  TimeGrid grid_;
  std::vector<CoefficientSample> nodes_;
};

ValidatedModel validate(const CoefficientSet& coefficients, const TerminalCondition& terminal,
                        InformationPattern pattern, const TimeGrid& grid);

// Same model on a different grid or pattern, revalidated.
ValidatedModel with_grid(const ValidatedModel& model, const TimeGrid& grid);
ValidatedModel with_pattern(const ValidatedModel& model, InformationPattern pattern);
ValidatedModel with_terminal(const ValidatedModel& model, const TerminalCondition& terminal);

// Throws OutOfRange for t outside [0, T].
CoefficientSample sample_coefficients(const ValidatedModel& model, double t);

enum class ConditioningMode { GivenW1, GivenW2, Mean };

// E(xi | w_j(t) = observed). `observed` is ignored in Mean mode.
double conditional_terminal(const TerminalCondition& terminal, std::optional<double> observed,
                            ConditioningMode mode);

}  // namespace lqbsde
