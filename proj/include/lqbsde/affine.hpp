#pragma once

#include <cstddef>
#include <optional>

#include "lqbsde/brownian.hpp"
#include "lqbsde/grid_function.hpp"
#include "lqbsde/model.hpp"
#include "lqbsde/riccati.hpp"

namespace lqbsde {

// value(t) = p(t) + q1(t) w1(t) + q2(t) w2(t). For a BSDE solution, q1 and q2
// are the martingale-representation integrands z1, z2.
struct AffineState {
  GridFunction p, q1, q2;

  double value(std::size_t k, double w1, double w2) const noexcept {
    return p[k] + q1[k] * w1 + q2[k] * w2;
  }
  double value(std::size_t k, const BrownianPath& path) const noexcept {
    return value(k, path.w1[k], path.w2[k]);
  }
};

// Closed-loop state under the feedback laws of the model's pattern, for an
// affine terminal condition.
struct ClosedLoopStates {
  GridFunction mean;                 // E y
  AffineState y;                     // the state itself
  AffineState ytilde;                // E(y | F^{w2})
  std::optional<AffineState> yhat;   // E(y | F^{w1}), w1-vs-w2 pattern only
};

// Patterns i and ii: one backward fourth-order sweep of the joint linear
// system for the coefficients of y and its w2 filter.
// Pattern iii: delegates to propagate_affine.
ClosedLoopStates closed_loop_states(const ValidatedModel& model, const RiccatiSolution& riccati);

// w1-vs-w2 pattern: E y by kernel quadrature with GammaBar, the w1 filter with
// Xi, the w2 filter with Psi; y's coefficients then solve linear ODEs driven by
// the conditional expectation of its drift. Throws PatternMismatch otherwise.
ClosedLoopStates propagate_affine(const ValidatedModel& model, const RiccatiSolution& riccati);

}  // namespace lqbsde
