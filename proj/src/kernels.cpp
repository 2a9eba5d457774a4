#include "lqbsde/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "lqbsde/errors.hpp"

namespace lqbsde {

IntegratingFactorKernel::IntegratingFactorKernel(KernelKind kind, TimeGrid grid, Function rate,
                                                 std::vector<double> noise)
    : kind_(kind), grid_(grid), rate_(std::move(rate)), noise_(std::move(noise)) {
  if (!noise_.empty() && noise_.size() != grid_.points())
    throw GridMismatch("kernel noise loading length differs from the grid");
  log_nodes_.assign(grid_.points(), 0.0);
  const double h = grid_.dt();
  for (std::size_t k = 0; k < grid_.steps(); ++k) {
    const double t = grid_.time(k);
    const double t1 = grid_.time(k + 1);
    log_nodes_[k + 1] =
        log_nodes_[k] + h / 6.0 * (rate_(t) + 4.0 * rate_(0.5 * (t + t1)) + rate_(t1));
  }
}

double IntegratingFactorKernel::log_integral(double t) const {
  const double pos = std::clamp(t / grid_.dt(), 0.0, static_cast<double>(grid_.steps()));
  const auto k = static_cast<std::size_t>(pos);
  const double tk = grid_.time(k);
  if (t <= tk) return log_nodes_[k];
  return log_nodes_[k] + (t - tk) / 6.0 * (rate_(tk) + 4.0 * rate_(0.5 * (tk + t)) + rate_(t));
}

double IntegratingFactorKernel::evaluate(std::size_t from, std::size_t to,
                                         const BrownianPath& path) const {
  double log_value = log_nodes_[to] - log_nodes_[from];
  for (std::size_t j = from; j < to && !noise_.empty(); ++j)
    log_value += noise_[j] * path.dw2[j] - 0.5 * noise_[j] * noise_[j] * grid_.dt();
  return std::exp(log_value);
}

GridFunction IntegratingFactorKernel::convolve_backward(double terminal,
                                                        const Function& forcing) const {
  const std::size_t n = grid_.points();
  std::vector<double> value(n);
  std::vector<double> deriv(n);
  const double h = grid_.dt();
  value[n - 1] = terminal;
  for (std::size_t k = n - 1; k-- > 0;) {
    const double t = grid_.time(k);
    const double t1 = grid_.time(k + 1);
    const double tm = 0.5 * (t + t1);
    const double base = log_nodes_[k];
    const double k_mid = std::exp(log_integral(tm) - base);
    const double k_end = std::exp(log_nodes_[k + 1] - base);
    value[k] = k_end * value[k + 1] +
               h / 6.0 * (forcing(t) + 4.0 * k_mid * forcing(tm) + k_end * forcing(t1));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid_.time(k);
    deriv[k] = -rate_(t) * value[k] - forcing(t);
  }
  return {grid_, std::move(value), std::move(deriv)};
}

IntegratingFactorKernel make_kernel(KernelKind kind, const ValidatedModel& model,
                                    const RiccatiSolution& riccati) {
  const TimeGrid& grid = model.grid();
  std::vector<double> noise;
  if (kind == KernelKind::Gamma || kind == KernelKind::Upsilon) {
    noise.resize(grid.points());
    for (std::size_t k = 0; k < grid.points(); ++k) noise[k] = model.node(k).f2;
  }
  auto gains = [&](const std::optional<GridFunction>& g, const char* what) -> const GridFunction& {
    if (!g) throw PatternMismatch(std::string("kernel needs the ") + what + " gains");
    return *g;
  };
  switch (kind) {
    case KernelKind::Gamma:
    case KernelKind::GammaBar:
      return {kind, grid,
              [&model, &alpha = riccati.alpha](double t) {
                const auto s = model.at(t);
                return s.a + s.gain1() * alpha.at(t);
              },
              std::move(noise)};
    case KernelKind::Xi:
    case KernelKind::Upsilon: {
      const GridFunction& gamma1 = gains(riccati.gamma1, "gamma");
      return {kind, grid,
              [&model, &gamma1](double t) {
                const auto s = model.at(t);
                return s.a + s.gain1() * gamma1.at(t);
              },
              std::move(noise)};
    }
    case KernelKind::Psi: {
      const GridFunction& tau1 = gains(riccati.tau1, "tau");
      return {kind, grid,
              [&model, &tau1](double t) {
                const auto s = model.at(t);
                return s.a + s.gain2() * tau1.at(t);
              },
              std::move(noise)};
    }
  }
  throw PatternMismatch("unknown kernel kind");
}

}  // namespace lqbsde
