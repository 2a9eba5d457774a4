#include "lqbsde/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "lqbsde/errors.hpp"

namespace lqbsde {

GridFunction::GridFunction(TimeGrid grid, std::vector<double> values,
                           std::vector<double> derivatives)
    : grid_(grid), values_(std::move(values)), derivs_(std::move(derivatives)) {
  if (values_.size() != grid_.points() || derivs_.size() != grid_.points())
    throw GridMismatch("grid function length does not match grid");
}

GridFunction GridFunction::zero(const TimeGrid& grid) {
  return {grid, std::vector<double>(grid.points(), 0.0), std::vector<double>(grid.points(), 0.0)};
}

double GridFunction::at(double t) const {
  const double h = grid_.dt();
  const double pos = std::clamp(t / h, 0.0, static_cast<double>(grid_.steps()));
  const auto k = std::min(static_cast<std::size_t>(pos), grid_.steps() - 1);
  const double s = pos - static_cast<double>(k);
  if (s == 0.0) return values_[k];
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * values_[k] + h10 * h * derivs_[k] + h01 * values_[k + 1] +
         h11 * h * derivs_[k + 1];
}

}  // namespace lqbsde
