#include "lqbsde/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lqbsde/csv.hpp"
#include "lqbsde/errors.hpp"
#include "lqbsde/parallel.hpp"

namespace lqbsde {

Mat2 Mat2::inverse() const {
  const double d = det();
  const double scale = std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  if (!(std::abs(d) > 1e-14 * scale * scale)) throw SingularMatrix("2x2 matrix is singular");
  return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

bool is_orthogonal(const Mat2& sigma, double tol) {
  const Mat2 p = sigma * sigma.transpose();
  return std::abs(p.a11 - 1.0) <= tol && std::abs(p.a12) <= tol && std::abs(p.a21) <= tol &&
         std::abs(p.a22 - 1.0) <= tol;
}

GirsanovScenario make_girsanov_scenario(GirsanovScenario::Function h,
                                        GirsanovScenario::Function hbar1,
                                        GirsanovScenario::Function hbar2, const Mat2& sigma,
                                        bool orthogonal, double delta1, double delta2) {
  if (orthogonal && !is_orthogonal(sigma))
    throw AssumptionViolation("orthogonal sigma", 0, "sigma sigma^T differs from the identity");
  return {std::move(h), std::move(hbar1), std::move(hbar2), sigma, sigma.inverse(), orthogonal,
          delta1, delta2};
}

GirsanovScenario builtin_girsanov_scenario() {
  const double angle = 0.6;
  const Mat2 rotation{std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle)};
  return make_girsanov_scenario([](double, double x) { return 0.8 * std::tanh(x); },
                                [](double t, double x) { return 0.5 + 0.3 * std::sin(x + t); },
                                [](double, double x) { return -0.4 * std::cos(x); }, rotation,
                                true, 0.7, 0.5);
}

std::vector<double> driftless_signal(const GirsanovScenario& s, const BrownianPath& path) {
  std::vector<double> x(path.grid.points());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = s.delta1 * path.w1[k] + s.delta2 * path.w2[k];
  return x;
}

namespace {

void check_signal(const BrownianPath& path, std::span<const double> x) {
  if (x.size() != path.grid.points()) throw GridMismatch("signal path length differs from the grid");
}

}  // namespace

DensityPath density_rho1(const GirsanovScenario& s, const BrownianPath& path,
                         std::span<const double> x) {
  check_signal(path, x);
  const TimeGrid& grid = path.grid;
  const double dt = grid.dt();
  DensityPath out{std::vector<double>(grid.points()), std::vector<double>(grid.points())};
  double log_rho = 0.0, log_inv = 0.0;
  out.rho[0] = out.rho_inv[0] = 1.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double h = s.h(grid.time(k), x[k]);
    const double dW2 = h * dt + path.dw2[k];
    log_rho += -h * path.dw2[k] - 0.5 * h * h * dt;
    log_inv += h * dW2 - 0.5 * h * h * dt;
    out.rho[k + 1] = std::exp(log_rho);
    out.rho_inv[k + 1] = std::exp(log_inv);
  }
  return out;
}

DensityPath density_rho2(const GirsanovScenario& s, const BrownianPath& path,
                         std::span<const double> x) {
  check_signal(path, x);
  const TimeGrid& grid = path.grid;
  const double dt = grid.dt();
  DensityPath out{std::vector<double>(grid.points()), std::vector<double>(grid.points())};
  double log_rho = 0.0, log_inv = 0.0;
  out.rho[0] = out.rho_inv[0] = 1.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double t = grid.time(k);
    const auto c = s.cbar(t, x[k]);
    const double hb1 = s.hbar1(t, x[k]), hb2 = s.hbar2(t, x[k]);
    const auto noise = s.sigma.apply(path.dw1[k], path.dw2[k]);
    const double dW1 = hb1 * dt + noise[0], dW2 = hb2 * dt + noise[1];
    const auto sdW = s.sigmabar.apply(dW1, dW2);
    const double norm2 = c[0] * c[0] + c[1] * c[1];
    log_rho += -(c[0] * path.dw1[k] + c[1] * path.dw2[k]) - 0.5 * norm2 * dt;
    log_inv += c[0] * sdW[0] + c[1] * sdW[1] - 0.5 * norm2 * dt;
    out.rho[k + 1] = std::exp(log_rho);
    out.rho_inv[k + 1] = std::exp(log_inv);
  }
  return out;
}

double ObservationTransform::bsde_shift_single(const GirsanovScenario& s, double t, double x,
                                               double z2) const {
  return s.h(t, x) * z2;
}

double ObservationTransform::signal_shift_single(const GirsanovScenario& s, double t,
                                                 double x) const {
  return -s.delta2 * s.h(t, x);
}

double ObservationTransform::bsde_shift_pair(const GirsanovScenario& s, double t, double x,
                                             double Z1, double Z2) const {
  const auto c = s.cbar(t, x);
  const auto z = to_original(Z1, Z2);
  return c[0] * z[0] + c[1] * z[1];
}

double ObservationTransform::signal_shift_pair(const GirsanovScenario& s, double t,
                                               double x) const {
  const auto c = s.cbar(t, x);
  return -s.delta1 * c[0] - s.delta2 * c[1];
}

std::array<double, 2> ObservationTransform::signal_loadings(const GirsanovScenario& s) const {
  const Mat2& sb = s.sigmabar;
  return {sb.a11 * s.delta1 + sb.a21 * s.delta2, sb.a12 * s.delta1 + sb.a22 * s.delta2};
}

ObservationTransform transform_observation(const GirsanovScenario& s) {
  const Mat2 sb = s.sigma.inverse();
  const double d = sb.det();
  if (d == 0.0) throw SingularMatrix("inverse observation matrix is singular");
  ObservationTransform out;
  out.forward = sb.transpose();
  out.inverse = {sb.a22 / d, -sb.a21 / d, -sb.a12 / d, sb.a11 / d};
  return out;
}

MartingaleCheck martingale_check(const GirsanovScenario& s, const TimeGrid& grid,
                                 std::uint64_t seed, std::size_t count, unsigned threads) {
  std::vector<double> r1(count), r2(count), err(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto path = sample_path(grid, seed, i);
    const auto x = driftless_signal(s, path);
    const auto d1 = density_rho1(s, path, x);
    const auto d2 = density_rho2(s, path, x);
    double e = 0.0;
    for (std::size_t k = 0; k < grid.points(); ++k) {
      e = std::max(e, std::abs(d1.rho[k] * d1.rho_inv[k] - 1.0));
      e = std::max(e, std::abs(d2.rho[k] * d2.rho_inv[k] - 1.0));
    }
    r1[i] = d1.rho.back();
    r2[i] = d2.rho.back();
    err[i] = e;
  });
  MartingaleCheck out;
  const auto e1 = estimate_mean(r1), e2 = estimate_mean(r2);
  out.rho1_mean = e1.mean;
  out.rho1_se = e1.se;
  out.rho2_mean = e2.mean;
  out.rho2_se = e2.se;
  out.reciprocal_error = err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
  return out;
}

void write_girsanov_csv(std::ostream& out, const GirsanovScenario& s, const TimeGrid& grid,
                        std::uint64_t seed, std::size_t count) {
  out << "path,t,rho1,rho2\n";
  for (std::size_t p = 0; p < count; ++p) {
    const auto path = sample_path(grid, seed, p);
    const auto x = driftless_signal(s, path);
    const auto d1 = density_rho1(s, path, x);
    const auto d2 = density_rho2(s, path, x);
    for (std::size_t k = 0; k < grid.points(); ++k) {
      out << p << ',' << format_real(grid.time(k));
      write_field(out, d1.rho[k]);
      write_field(out, d2.rho[k]);
      out << '\n';
    }
  }
}

}  // namespace lqbsde
