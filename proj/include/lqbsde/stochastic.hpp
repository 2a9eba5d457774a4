#pragma once

#include <span>
#include <vector>

#include "lqbsde/brownian.hpp"
#include "lqbsde/model.hpp"

namespace lqbsde {

enum class Adjoint { X1, X2 };

// Euler-Maruyama for dx_i = [a x_i - l_i (y - k_i)] dt + f1 x_i dw1 + f2 x_i dw2
// with x_i(0) = -r_i (y(0) - h_i).
std::vector<double> forward_sde(const ValidatedModel& model, const BrownianPath& path,
                                std::span<const double> y, Adjoint which);

// Drift D(t_k, v) = slope[k] * v + offset[k] of -dv = D dt - z1 dw1 - z2 dw2.
struct AffineDrift {
  std::vector<double> slope, offset;
};

// z_j(t_k, v) = slope_j[k] * v + offset_j[k].
struct AffineNoise {
  std::vector<double> slope1, offset1, slope2, offset2;
  static AffineNoise zero(std::size_t points);
};

struct BackwardSolution {
  std::vector<double> value, z1, z2;
};

// Backward sweep from value(T) = terminal. Each step solves
//   v_k = v_{k+1} + dt/2 (D(t_k, v_k) + D(t_{k+1}, v_{k+1})) - z(t_k, v_k) . dw_k
// for v_k: trapezoidal drift, integrand at the left node so the stochastic
// sum is an Ito sum. All arrays hold one value per grid node.
BackwardSolution backward_bsde_affine(const ValidatedModel& model, const BrownianPath& path,
                                      double terminal, const AffineDrift& drift,
                                      const AffineNoise& noise);

}  // namespace lqbsde
