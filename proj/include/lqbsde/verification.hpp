#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lqbsde/equilibrium.hpp"
#include "lqbsde/model.hpp"
#include "lqbsde/riccati.hpp"

namespace lqbsde {

struct PathCost {
  double J1 = 0.0, J2 = 0.0;
};

struct CostReport {
  double J1 = 0.0, J2 = 0.0;
  double SE1 = 0.0, SE2 = 0.0;
  std::size_t paths = 0;
};

// Half of: trapezoid over the grid of l_i (y - k_i)^2 + m_i (u_i - n_i)^2,
// plus r_i (y(0) - h_i)^2.
PathCost path_cost(const ValidatedModel& model, const PathRealization& realization);
CostReport mc_cost(const ValidatedModel& model, std::span<const PathRealization> realizations);
CostReport mc_cost(const EquilibriumReconstructor& reconstructor, std::uint64_t seed,
                   std::size_t count, unsigned threads = 1);

// A perturbation v_i = u_i + eps * phi. Only deterministic directions are
// supported; `stochastic` marks a request for a path-dependent one.
struct Direction {
  std::string name;
  std::function<double(double)> phi;
  bool stochastic = false;
};

struct StationarityPoint {
  double eps = 0.0;
  double dJ = 0.0;  // path mean of J_i(u + eps phi) - J_i(u)
  double se = 0.0;
};

struct StationarityReport {
  int player = 1;
  std::string direction;
  // dJ/deps at 0 from the exact linear response of y, with its SE.
  double lambda = 0.0, lambda_se = 0.0;
  // The same derivative through the adjoint: E int (m (u - n) - b x) phi dt.
  double theta = 0.0, theta_se = 0.0;
  // Curvature: the exact eps^2 coefficient (deterministic) and the fitted one.
  double kappa = 0.0, kappa_fit = 0.0, lambda_fit = 0.0;
  double fit_residual = 0.0;  // max relative misfit of kappa eps^2 + lambda eps
  std::vector<StationarityPoint> table;
};

// The response of y to a deterministic control shift is deterministic:
// -d dy = (a dy + b_i phi) dt, dy(T) = 0. Throws NotAdapted for a stochastic
// direction.
StationarityReport perturbation_test(const EquilibriumReconstructor& reconstructor, int player,
                                     const Direction& direction, std::span<const double> epsilons,
                                     std::uint64_t seed, std::size_t count, unsigned threads = 1);

struct FilterPoint {
  std::size_t node = 0;
  double mean = 0.0, se = 0.0;  // inner Monte Carlo mean of x1 and its SE
  double predicted = 0.0;       // alpha1 ytilde + beta1 on the fixed w2 path
};

// Fixes w2 from path `outer` of `seed`, draws `inner` w1 paths from the inner
// substream, and averages x1 at the checkpoints. Symmetric pattern only.
std::vector<FilterPoint> filter_check(const EquilibriumReconstructor& reconstructor,
                                      std::uint64_t seed, std::uint64_t outer, std::size_t inner,
                                      std::span<const std::size_t> checkpoints,
                                      unsigned threads = 1);

struct OracleResult {
  std::vector<double> u1, u2;  // at step midpoints
  std::vector<double> y;       // at nodes
  double J1 = 0.0, J2 = 0.0;
};

// Discrete open-loop Nash point of the noise-free game: controls constant on
// each step, implicit-midpoint state recursion, trapezoid state cost and
// midpoint control cost. The two first-order conditions form one block linear
// system. Needs c1 = c2 = 0 and f1 = f2 = 0; throws SingularSystem when the
// system is rank-deficient.
OracleResult deterministic_oracle(const ValidatedModel& model);

struct OracleComparison {
  double u1_gap = 0.0, u2_gap = 0.0;      // sup over midpoints
  double J1_rel = 0.0, J2_rel = 0.0;      // relative cost gaps
  double max() const noexcept;
};

// Formula controls averaged to midpoints against the oracle.
OracleComparison compare_with_oracle(const ValidatedModel& model, const PathRealization& formula,
                                     const OracleResult& oracle);

struct InformationValue {
  double J1_symmetric = 0.0, SE_symmetric = 0.0;
  double J1_full = 0.0, SE_full = 0.0;
  double difference = 0.0, difference_se = 0.0;  // paired: J1(ii) - J1(i)
  double u2_gap = 0.0;                           // sup over paths and nodes
};

// Both reconstructions on the same paths. The model's own pattern is ignored.
InformationValue information_value(const ValidatedModel& model, std::uint64_t seed,
                                   std::size_t count, unsigned threads = 1);

// Ordered `key=value` lines.
class Report {
 public:
  void add(std::string key, double value);
  void add(std::string key, const std::string& value);
  void write(std::ostream& out) const;
  const std::vector<std::pair<std::string, std::string>>& lines() const noexcept { return lines_; }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

}  // namespace lqbsde
