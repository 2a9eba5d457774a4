#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "lqbsde/affine.hpp"
#include "lqbsde/brownian.hpp"
#include "lqbsde/model.hpp"
#include "lqbsde/riccati.hpp"

namespace lqbsde {

// One path of the equilibrium. Arrays hold one value per grid node; an empty
// array marks a quantity the pattern does not define.
//   x1, x2          the adjoints as the pattern defines them (pattern ii: x1
//                   from the full-information feedback formula)
//   adjoint1/2      the adjoint SDEs integrated forward along y
struct PathRealization {
  InformationPattern pattern = InformationPattern::SymmetricW2;
  std::vector<double> y, ytilde, yhat, ymean;
  std::vector<double> x1, x2, x1tilde, x2tilde, x1hat;
  std::vector<double> z1, z2, z2tilde;
  std::vector<double> u1, u2;
  std::vector<double> adjoint1, adjoint2;
};

// Shares the deterministic part of the equilibrium (gains and affine state
// coefficients) across paths. Holds references to `model` and `riccati`.
class EquilibriumReconstructor {
 public:
  EquilibriumReconstructor(const ValidatedModel& model, const RiccatiSolution& riccati);

  const ValidatedModel& model() const noexcept { return model_; }
  const RiccatiSolution& riccati() const noexcept { return riccati_; }
  const ClosedLoopStates& states() const noexcept { return states_; }

  PathRealization realize(const BrownianPath& path) const;

 private:
  PathRealization realize_symmetric(const BrownianPath& path, bool full_info) const;
  PathRealization realize_independent(const BrownianPath& path) const;

  const ValidatedModel& model_;
  const RiccatiSolution& riccati_;
  ClosedLoopStates states_;
};

// Each throws PatternMismatch when the model's pattern differs.
std::vector<PathRealization> reconstruct_case_i(const ValidatedModel& model,
                                                const RiccatiSolution& riccati,
                                                const BrownianPathBatch& batch,
                                                unsigned threads = 1);
std::vector<PathRealization> reconstruct_case_ii(const ValidatedModel& model,
                                                 const RiccatiSolution& riccati,
                                                 const BrownianPathBatch& batch,
                                                 unsigned threads = 1);
std::vector<PathRealization> reconstruct_case_iii(const ValidatedModel& model,
                                                  const RiccatiSolution& riccati,
                                                  const BrownianPathBatch& batch,
                                                  unsigned threads = 1);
// Dispatches on the model's pattern.
std::vector<PathRealization> reconstruct(const ValidatedModel& model,
                                         const RiccatiSolution& riccati,
                                         const BrownianPathBatch& batch, unsigned threads = 1);

// Streams paths 0..count-1 of `seed` through the reconstructor without
// keeping them. `body(index, path, realization)` runs on worker threads and
// must only write to per-index slots.
void for_each_realization(
    const EquilibriumReconstructor& reconstructor, std::uint64_t seed, std::size_t count,
    unsigned threads,
    const std::function<void(std::size_t, const BrownianPath&, const PathRealization&)>& body);

// u_i = (b_i / m_i) * (player i's estimate of x_i) + n_i, from the stored
// filtered adjoints.
std::pair<std::vector<double>, std::vector<double>> open_loop_controls(
    const ValidatedModel& model, const PathRealization& realization);

// The z2 integrand as printed for patterns i and ii:
//   i   f2 y + f2 beta1 / alpha1
//   ii  f2 y + f2 gamma3 / gamma1 - f2 (gamma2 / gamma1) (beta2 / alpha2)
// Zero when f2 = 0. Throws SingularRatio on a zero denominator.
std::vector<double> printed_z2(const ValidatedModel& model, const RiccatiSolution& riccati,
                               const PathRealization& realization);

// sup over t > 0 of |beta1/alpha1 - beta2/alpha2|.
double ratio_gap(const RiccatiSolution& riccati);

// `path,t,y,ytilde,yhat,ymean,x1,x2,x1tilde,x2tilde,x1hat,z1,z2,u1,u2`.
void write_realization_csv(std::ostream& out, const TimeGrid& grid,
                           std::span<const PathRealization> realizations);

}  // namespace lqbsde
