#pragma once

#include <cstddef>
#include <vector>

#include "lqbsde/model.hpp"

namespace lqbsde {

// Nodal values plus nodal derivatives of a smooth function on a TimeGrid.
// Off-grid evaluation uses the cubic Hermite interpolant, which keeps a
// fourth-order integrator fourth order when it reads earlier solutions at
// half steps.
class GridFunction {
 public:
  GridFunction(TimeGrid grid, std::vector<double> values, std::vector<double> derivatives);
  static GridFunction zero(const TimeGrid& grid);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double derivative(std::size_t k) const noexcept { return derivs_[k]; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& derivatives() const noexcept { return derivs_; }

  double at(double t) const;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
  std::vector<double> derivs_;
};

}  // namespace lqbsde
