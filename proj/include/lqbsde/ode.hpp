#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lqbsde/errors.hpp"
#include "lqbsde/grid_function.hpp"
#include "lqbsde/model.hpp"

namespace lqbsde {

enum class Sweep { Forward, Backward };

template <std::size_t D>
using OdeState = std::array<double, D>;

// Classical fourth-order Runge-Kutta with step dt on `grid`, started at t = 0
// (Forward) or t = T (Backward). `rhs(t, y)` returns dy/dt. The returned
// grid functions carry rhs values at the nodes as derivatives. Any component
// leaving [-1e12, 1e12] throws BlowUp at the first offending node.
template <std::size_t D, class Rhs>
std::array<GridFunction, D> integrate_rk4(const TimeGrid& grid, OdeState<D> start, Rhs&& rhs,
                                          Sweep sweep, const std::string& name) {
  constexpr double kLimit = 1e12;
  const std::size_t n = grid.points();
  std::array<std::vector<double>, D> values;
  std::array<std::vector<double>, D> derivs;
  for (std::size_t d = 0; d < D; ++d) {
    values[d].assign(n, 0.0);
    derivs[d].assign(n, 0.0);
  }
  auto store = [&](std::size_t k, const OdeState<D>& y, const OdeState<D>& dy) {
    for (std::size_t d = 0; d < D; ++d) {
      if (!(std::abs(y[d]) <= kLimit)) throw BlowUp(name, k);
      values[d][k] = y[d];
      derivs[d][k] = dy[d];
    }
  };
  auto axpy = [](const OdeState<D>& y, double h, const OdeState<D>& k) {
    OdeState<D> out;
    for (std::size_t d = 0; d < D; ++d) out[d] = y[d] + h * k[d];
    return out;
  };

  const bool forward = sweep == Sweep::Forward;
  const double h = forward ? grid.dt() : -grid.dt();
  std::size_t k = forward ? 0 : grid.steps();
  OdeState<D> y = start;
  OdeState<D> k1 = rhs(grid.time(k), y);
  store(k, y, k1);
  for (std::size_t step = 0; step < grid.steps(); ++step) {
    const double t = grid.time(k);
    const double t_mid = t + 0.5 * h;
    const std::size_t next = forward ? k + 1 : k - 1;
    const OdeState<D> k2 = rhs(t_mid, axpy(y, 0.5 * h, k1));
    const OdeState<D> k3 = rhs(t_mid, axpy(y, 0.5 * h, k2));
    const OdeState<D> k4 = rhs(grid.time(next), axpy(y, h, k3));
    for (std::size_t d = 0; d < D; ++d)
      y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    k = next;
    k1 = rhs(grid.time(k), y);
    store(k, y, k1);
  }

  return [&]<std::size_t... I>(std::index_sequence<I...>) {
    return std::array<GridFunction, D>{
        GridFunction(grid, std::move(values[I]), std::move(derivs[I]))...};
  }(std::make_index_sequence<D>{});
}

}  // namespace lqbsde
