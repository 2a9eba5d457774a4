#pragma once

#include <cmath>

#include "lqbsde/model.hpp"

// Scenarios shared by the unit tests and the acceptance binary.
namespace fixtures {

using lqbsde::CoefficientSet;
using lqbsde::InformationPattern;
using lqbsde::TerminalCondition;
using lqbsde::TimeGrid;
using lqbsde::ValidatedModel;

// a = 0, b = m = l = 1, r = 0: alpha(t) = -sqrt2 tanh(sqrt2 t).
inline CoefficientSet tanh_coefficients() {
  CoefficientSet cs;
  cs.b1 = 1.0;
  cs.b2 = 1.0;
  return cs;
}

// Same with r1 = r2 = 1: alpha(t) = -sqrt2 coth(sqrt2 t + ln(1 + sqrt2)).
inline CoefficientSet coth_coefficients() {
  CoefficientSet cs = tanh_coefficients();
  cs.r1 = 1.0;
  cs.r2 = 1.0;
  return cs;
}

inline double tanh_alpha(double t) { return -std::sqrt(2.0) * std::tanh(std::sqrt(2.0) * t); }

inline double coth_alpha(double t) {
  return -std::sqrt(2.0) / std::tanh(std::sqrt(2.0) * t + std::log(1.0 + std::sqrt(2.0)));
}

// Constant coefficients, asymmetric players, f2 = 0. Valid for all patterns.
inline CoefficientSet generic_coefficients() {
  CoefficientSet cs;
  cs.a = 0.2;
  cs.b1 = 1.0;
  cs.m1 = 1.0;
  cs.b2 = 0.5;
  cs.m2 = 0.25;
  cs.c = 0.1;
  cs.k1 = 0.5;
  cs.k2 = -0.3;
  cs.n1 = 0.2;
  cs.n2 = -0.1;
  cs.l1 = 1.0;
  cs.l2 = 0.5;
  cs.r1 = 0.5;
  cs.r2 = 1.0;
  cs.h1 = 0.3;
  cs.h2 = -0.2;
  return cs;
}

inline TerminalCondition generic_terminal() { return {1.0, 0.8, 0.6}; }

// Time-varying tables on top of the generic data.
inline CoefficientSet table_coefficients() {
  CoefficientSet cs = generic_coefficients();
  cs.a = lqbsde::Coefficient::table({{0.0, 0.1}, {1.0, 0.3}});
  cs.k1 = lqbsde::Coefficient::table({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.5}});
  cs.l2 = lqbsde::Coefficient::table({{0.0, 0.4}, {1.0, 0.8}});
  cs.c = lqbsde::Coefficient::table({{0.0, -0.1}, {1.0, 0.2}});
  return cs;
}

// Volatility f2 != 0 in the state equation (patterns i and ii only).
inline CoefficientSet diffusive_coefficients() {
  CoefficientSet cs;
  cs.a = 0.1;
  cs.b1 = 1.0;
  cs.m1 = 1.0;
  cs.b2 = 2.0;
  cs.m2 = 4.0;
  cs.f2 = 0.4;
  cs.c = 0.05;
  cs.k1 = 0.2;
  cs.k2 = 0.2;
  cs.n1 = 0.1;
  cs.n2 = 0.2;
  cs.l1 = 1.0;
  cs.l2 = 1.0;
  cs.r1 = 0.5;
  cs.r2 = 0.5;
  cs.h1 = 0.1;
  cs.h2 = 0.1;
  return cs;
}

inline TerminalCondition diffusive_terminal() { return {0.5, 0.7, 0.4}; }

inline ValidatedModel make(const CoefficientSet& cs, const TerminalCondition& xi,
                           InformationPattern pattern, std::size_t steps, double horizon = 1.0) {
  return lqbsde::validate(cs, xi, pattern, TimeGrid(horizon, steps));
}

}  // namespace fixtures
