#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "lqbsde/brownian.hpp"
#include "lqbsde/grid_function.hpp"
#include "lqbsde/model.hpp"
#include "lqbsde/riccati.hpp"

namespace lqbsde {

// Exponential kernels K(t, s) = exp(int_t^s g) of the closed-form linear BSDE
// solutions. Rates g:
//   Gamma     a + b1^2/m1 alpha    (times the f2 stochastic exponential)
//   GammaBar  a + b1^2/m1 alpha
//   Xi        a + b1^2/m1 gamma1
//   Psi       a + b2^2/m2 tau1
//   Upsilon   a + b1^2/m1 gamma1   (times the f2 stochastic exponential)
enum class KernelKind { Gamma, GammaBar, Xi, Psi, Upsilon };

class IntegratingFactorKernel {
 public:
  using Function = std::function<double(double)>;

  // `noise` holds f2 at the grid nodes for the stochastic kinds, empty otherwise.
  IntegratingFactorKernel(KernelKind kind, TimeGrid grid, Function rate, std::vector<double> noise);

  KernelKind kind() const noexcept { return kind_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  bool is_stochastic() const noexcept { return !noise_.empty(); }

  // int_0^t g, Simpson per step; off-grid points add a Simpson panel from the
  // node below.
  double log_integral(double t) const;
  // exp(int_t^s g): the whole kernel for deterministic kinds, its conditional
  // mean for the stochastic ones.
  double mean(std::size_t from, std::size_t to) const noexcept {
    return std::exp(log_nodes_[to] - log_nodes_[from]);
  }
  double mean_between(double t, double s) const { return std::exp(log_integral(s) - log_integral(t)); }

  // Pathwise kernel between nodes: the mean times
  // exp(sum f2 dw2 - 1/2 sum f2^2 dt) with left-endpoint sums.
  double evaluate(std::size_t from, std::size_t to, const BrownianPath& path) const;

  // P(t_k) = mean(t_k, T) * terminal + int_{t_k}^T mean(t_k, s) forcing(s) ds,
  // Simpson per step. Derivatives at the nodes follow from P' = -g P - forcing.
  GridFunction convolve_backward(double terminal, const Function& forcing) const;

 private:
  KernelKind kind_;
  TimeGrid grid_;
  Function rate_;
  std::vector<double> noise_;
  std::vector<double> log_nodes_;
};

// The kernel reads `model` and `riccati` by reference; both must outlive it.
// Throws PatternMismatch when the gains the kind needs are absent.
IntegratingFactorKernel make_kernel(KernelKind kind, const ValidatedModel& model,
                                    const RiccatiSolution& riccati);

}  // namespace lqbsde
