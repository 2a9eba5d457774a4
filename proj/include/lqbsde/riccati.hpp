#pragma once

#include <iosfwd>
#include <optional>
#include <utility>

#include "lqbsde/grid_function.hpp"
#include "lqbsde/model.hpp"

namespace lqbsde {

// Gains of the affine feedback laws, all integrated forward from t = 0.
//   alpha   aggregate Riccati gain, alpha = alpha1 + alpha2
//   beta    aggregate offset,       beta  = beta1 + beta2
//   gamma*  player-1 gains with full information (patterns ii and iii)
//   tau*    player-2 gains under the w1-vs-w2 pattern
struct RiccatiSolution {
  TimeGrid grid;
  GridFunction alpha, alpha1, alpha2;
  GridFunction beta, beta1, beta2;
  std::optional<GridFunction> gamma1, gamma2, gamma3;
  std::optional<GridFunction> tau1, tau2, tau3;

  bool has_gamma() const noexcept { return gamma1.has_value(); }
  bool has_tau() const noexcept { return tau1.has_value(); }
};

struct GammaGains {
  GridFunction gamma1, gamma2, gamma3;
};

struct TauGains {
  GridFunction tau1, tau2, tau3;
};

GridFunction solve_standard_alpha(const ValidatedModel& model);
std::pair<GridFunction, GridFunction> solve_alpha_components(const ValidatedModel& model,
                                                             const GridFunction& alpha);
GridFunction solve_beta_aggregate(const ValidatedModel& model, const GridFunction& alpha);
std::pair<GridFunction, GridFunction> solve_beta_components(const ValidatedModel& model,
                                                            const GridFunction& alpha1,
                                                            const GridFunction& alpha2,
                                                            const GridFunction& beta);
GammaGains solve_gamma(const ValidatedModel& model, const RiccatiSolution& so_far);
// Throws PatternMismatch unless the pattern is W1VsW2.
TauGains solve_tau(const ValidatedModel& model, const RiccatiSolution& so_far);

// Everything the model's information pattern needs.
RiccatiSolution solve_riccati(const ValidatedModel& model);

// Max absolute residual of the coupled equations for (alpha1, beta1) and
// (alpha2, beta2), using the stored derivatives.
struct CoupledResiduals {
  double alpha1 = 0.0, beta1 = 0.0, alpha2 = 0.0, beta2 = 0.0;
  double max() const noexcept;
};

CoupledResiduals coupled_residuals(const ValidatedModel& model, const RiccatiSolution& solution);

// Max |alpha1 + alpha2 - alpha| and |beta1 + beta2 - beta|.
std::pair<double, double> decomposition_gaps(const RiccatiSolution& solution);

void write_riccati_csv(std::ostream& out, const RiccatiSolution& solution);

}  // namespace lqbsde
