#include "lqbsde/stochastic.hpp"

#include <cmath>

#include "lqbsde/errors.hpp"

namespace lqbsde {

std::vector<double> forward_sde(const ValidatedModel& model, const BrownianPath& path,
                                std::span<const double> y, Adjoint which) {
  const TimeGrid& grid = model.grid();
  if (!(path.grid == grid) || y.size() != grid.points())
    throw GridMismatch("forward_sde inputs do not share the model grid");
  const bool first = which == Adjoint::X1;
  const auto& cs = model.coefficients();
  const double r = first ? cs.r1 : cs.r2;
  const double h = first ? cs.h1 : cs.h2;
  const double dt = grid.dt();

  std::vector<double> x(grid.points());
  x[0] = -r * (y[0] - h);
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const CoefficientSample& s = model.node(k);
    const double weight = first ? s.l1 : s.l2;
    const double target = first ? s.k1 : s.k2;
    x[k + 1] = x[k] + (s.a * x[k] - weight * (y[k] - target)) * dt +
               x[k] * (s.f1 * path.dw1[k] + s.f2 * path.dw2[k]);
  }
  return x;
}

AffineNoise AffineNoise::zero(std::size_t points) {
  const std::vector<double> z(points, 0.0);
  return {z, z, z, z};
}

BackwardSolution backward_bsde_affine(const ValidatedModel& model, const BrownianPath& path,
                                      double terminal, const AffineDrift& drift,
                                      const AffineNoise& noise) {
  const TimeGrid& grid = model.grid();
  const std::size_t n = grid.points();
  if (!(path.grid == grid))
    throw GridMismatch("backward_bsde_affine path grid differs from the model grid");
  for (const auto* v : {&drift.slope, &drift.offset, &noise.slope1, &noise.offset1,
                        &noise.slope2, &noise.offset2})
    if (v->size() != n) throw GridMismatch("drift or noise spec length differs from the grid");

  const double half = 0.5 * grid.dt();
  BackwardSolution out{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  out.value[n - 1] = terminal;
  for (std::size_t k = n - 1; k-- > 0;) {
    const double next = out.value[k + 1];
    const double dw1 = path.dw1[k];
    const double dw2 = path.dw2[k];
    const double rhs = next + half * (drift.slope[k + 1] * next + drift.offset[k + 1] +
                                      drift.offset[k]) -
                       noise.offset1[k] * dw1 - noise.offset2[k] * dw2;
    const double lhs = 1.0 - half * drift.slope[k] + noise.slope1[k] * dw1 + noise.slope2[k] * dw2;
    const double v = rhs / lhs;
    if (!(std::abs(v) <= 1e12)) throw BlowUp("backward BSDE value", k);
    out.value[k] = v;
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.z1[k] = noise.slope1[k] * out.value[k] + noise.offset1[k];
    out.z2[k] = noise.slope2[k] * out.value[k] + noise.offset2[k];
  }
  return out;
}

}  // namespace lqbsde
