#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "lqbsde/affine.hpp"
#include "lqbsde/brownian.hpp"
#include "lqbsde/errors.hpp"
#include "lqbsde/kernels.hpp"
#include "lqbsde/ode.hpp"
#include "lqbsde/parallel.hpp"
#include "lqbsde/riccati.hpp"
#include "lqbsde/rng.hpp"
#include "lqbsde/stochastic.hpp"

using namespace lqbsde;
using fixtures::make;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-15));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-14));
  for (double p : {1e-300, 1e-12, 1e-5, 0.01, 0.2, 0.4999, 0.7, 0.95, 1 - 1e-9})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
  for (double p : {0.001, 0.01, 0.2, 0.4999})
    CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1 - p)).epsilon(1e-12));
  CHECK(open_unit_interval(0) > 0.0);
  CHECK(open_unit_interval(~0ull) < 1.0);
}

TEST_CASE("brownian paths are reproducible and independent") {
  const TimeGrid grid(1.0, 64);
  const auto a = sample_path(grid, 7, 3);
  const auto b = sample_path(grid, 7, 3);
  CHECK(a.dw1 == b.dw1);
  CHECK(a.dw2 == b.dw2);
  CHECK(a.w1[0] == 0.0);
  CHECK(sample_path(grid, 7, 4).dw1 != a.dw1);
  CHECK(sample_path(grid, 8, 3).dw1 != a.dw1);
  CHECK(sample_path(grid, 7, 3, Substream::Inner).dw1 != a.dw1);

  // A batch is the concatenation of single paths.
  const auto batch = sample_brownian(grid, 7, 5);
  CHECK(batch.paths[3].dw2 == a.dw2);

  // Moments of w(T) over many paths.
  const std::size_t count = 20000;
  std::vector<double> sq1(count), sq2(count), cross(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto p = sample_path(TimeGrid(1.0, 8), 11, i);
    sq1[i] = p.w1.back() * p.w1.back();
    sq2[i] = p.w2.back() * p.w2.back();
    cross[i] = p.w1.back() * p.w2.back();
  }
  for (const auto* v : {&sq1, &sq2}) {
    const auto est = estimate_mean(*v);
    CHECK(std::abs(est.mean - 1.0) <= 3 * est.se);
  }
  const auto c = estimate_mean(cross);
  CHECK(std::abs(c.mean) <= 3 * c.se);
}

TEST_CASE("coarsened paths sum fine increments") {
  const TimeGrid coarse(1.0, 16);
  const auto fine = sample_path(TimeGrid(1.0, 64), 5, 2);
  const auto direct = sample_path_coarsened(coarse, 4, 5, 2);
  const auto summed = coarsen(fine, 4);
  for (std::size_t k = 0; k <= 16; ++k) {
    CHECK(direct.w1[k] == doctest::Approx(fine.w1[4 * k]).epsilon(1e-14));
    CHECK(summed.w2[k] == doctest::Approx(fine.w2[4 * k]).epsilon(1e-14));
  }
  const auto other = sample_path(TimeGrid(1.0, 64), 5, 9);
  const auto spliced = splice_w1(fine, other);
  CHECK(spliced.dw1 == other.dw1);
  CHECK(spliced.dw2 == fine.dw2);
}

TEST_CASE("forward adjoint matches geometric brownian motion") {
  auto cs = fixtures::diffusive_coefficients();
  cs.k1 = 0.0;
  const std::size_t steps = 4096;
  const auto m = make(cs, fixtures::diffusive_terminal(), InformationPattern::SymmetricW2, steps);
  const auto path = sample_path(m.grid(), 3, 0);
  // y = k1 = 0 removes the forcing: x = x0 exp((a - f2^2/2) t + f2 w2).
  const std::vector<double> y(m.grid().points(), 0.0);
  const auto x = forward_sde(m, path, y, Adjoint::X1);
  const double x0 = -cs.r1 * (0.0 - cs.h1);
  CHECK(x[0] == doctest::Approx(x0));
  double err = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = m.grid().time(k);
    const double exact = x0 * std::exp((0.1 - 0.08) * t + 0.4 * path.w2[k]);
    err = std::max(err, std::abs(x[k] - exact));
  }
  CHECK(err < 5e-3);
  CHECK_THROWS_AS(forward_sde(m, sample_path(TimeGrid(1.0, 8), 3, 0), y, Adjoint::X1),
                  GridMismatch);
}

TEST_CASE("backward sweep on deterministic problems") {
  const std::size_t steps = 1000;
  const auto m = make(fixtures::generic_coefficients(), {5.0, 0.0, 0.0},
                      InformationPattern::SymmetricW2, steps);
  const auto path = sample_path(m.grid(), 1, 0);
  const std::size_t n = m.grid().points();
  const auto zero = AffineNoise::zero(n);

  const auto flat = backward_bsde_affine(m, path, 5.0, {std::vector<double>(n, 0.0),
                                                        std::vector<double>(n, 0.0)},
                                         zero);
  for (double v : flat.value) CHECK(v == 5.0);

  // -dv = -v dt, v(1) = 1: v(0) = exp(-1).
  const auto decay = backward_bsde_affine(m, path, 1.0, {std::vector<double>(n, -1.0),
                                                         std::vector<double>(n, 0.0)},
                                          zero);
  CHECK(decay.value.back() == 1.0);
  CHECK(std::abs(decay.value[0] - std::exp(-1.0)) < 1e-3);
  CHECK(std::abs(decay.value[0] - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("backward sweep recovers an affine BSDE pathwise") {
  // -dv = c dt - q dw1 with v(T) = q w1(T): v = q w1 + c (T - t).
  const std::size_t steps = 200;
  const auto m = make(fixtures::generic_coefficients(), {0.0, 0.7, 0.0},
                      InformationPattern::SymmetricW2, steps);
  const auto path = sample_path(m.grid(), 9, 4);
  const std::size_t n = m.grid().points();
  AffineNoise noise = AffineNoise::zero(n);
  noise.offset1.assign(n, 0.7);
  const auto sol = backward_bsde_affine(
      m, path, 0.7 * path.w1.back(), {std::vector<double>(n, 0.0), std::vector<double>(n, 0.3)},
      noise);
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(sol.value[k] ==
          doctest::Approx(0.7 * path.w1[k] + 0.3 * (1.0 - m.grid().time(k))).epsilon(1e-12));
    CHECK(sol.z1[k] == 0.7);
  }
}

TEST_CASE("kernel convolution agrees with its linear ODE") {
  const auto m = make(fixtures::table_coefficients(), fixtures::generic_terminal(),
                      InformationPattern::W1VsW2, 400);
  const auto ric = solve_riccati(m);
  auto forcing = [](double t) { return std::sin(3 * t) + 0.2; };
  for (auto kind : {KernelKind::GammaBar, KernelKind::Xi, KernelKind::Psi}) {
    const auto kernel = make_kernel(kind, m, ric);
    const auto conv = kernel.convolve_backward(0.9, forcing);
    auto rate = [&](double t) {
      const auto s = m.at(t);
      if (kind == KernelKind::GammaBar) return s.a + s.gain1() * ric.alpha.at(t);
      if (kind == KernelKind::Xi) return s.a + s.gain1() * ric.gamma1->at(t);
      return s.a + s.gain2() * ric.tau1->at(t);
    };
    const auto [ode] = integrate_rk4<1>(
        m.grid(), {0.9},
        [&](double t, const OdeState<1>& v) {
          return OdeState<1>{-rate(t) * v[0] - forcing(t)};
        },
        Sweep::Backward, "reference");
    for (std::size_t k = 0; k <= 400; k += 40) CHECK(conv[k] == doctest::Approx(ode[k]).epsilon(1e-9));
    CHECK(kernel.mean(0, 400) ==
          doctest::Approx(std::exp(kernel.log_integral(1.0) - kernel.log_integral(0.0))));
    CHECK(kernel.mean_between(0.3, 0.3) == 1.0);
  }
  const auto sym = make(fixtures::generic_coefficients(), fixtures::generic_terminal(),
                        InformationPattern::SymmetricW2, 50);
  CHECK_THROWS_AS(make_kernel(KernelKind::Xi, sym, solve_riccati(sym)), PatternMismatch);
}

TEST_CASE("stochastic kernel carries the f2 exponential") {
  const auto m = make(fixtures::diffusive_coefficients(), fixtures::diffusive_terminal(),
                      InformationPattern::SymmetricW2, 100);
  const auto ric = solve_riccati(m);
  const auto gamma = make_kernel(KernelKind::Gamma, m, ric);
  const auto gbar = make_kernel(KernelKind::GammaBar, m, ric);
  CHECK(gamma.is_stochastic());
  CHECK_FALSE(gbar.is_stochastic());
  const auto path = sample_path(m.grid(), 2, 0);
  const double expected =
      gbar.mean(10, 60) * std::exp(0.4 * (path.w2[60] - path.w2[10]) - 0.5 * 0.16 * 0.5);
  CHECK(gamma.evaluate(10, 60, path) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("affine states with zero dynamics") {
  CoefficientSet cs;
  cs.b1 = 0.0;
  cs.b2 = 0.0;
  for (auto pattern : {InformationPattern::SymmetricW2, InformationPattern::FullVsW2,
                       InformationPattern::W1VsW2}) {
    const auto m = make(cs, {0.4, 1.5, -0.5}, pattern, 100);
    const auto st = closed_loop_states(m, solve_riccati(m));
    for (std::size_t k = 0; k <= 100; k += 10) {
      CHECK(st.mean[k] == doctest::Approx(0.4));
      CHECK(st.y.q1[k] == doctest::Approx(1.5));
      CHECK(st.y.q2[k] == doctest::Approx(-0.5));
      CHECK(st.ytilde.q1[k] == 0.0);
      CHECK(st.ytilde.q2[k] == doctest::Approx(-0.5));
    }
    CHECK(st.yhat.has_value() == (pattern == InformationPattern::W1VsW2));
  }
}

TEST_CASE("filters are consistent with the state") {
  for (auto pattern : {InformationPattern::SymmetricW2, InformationPattern::FullVsW2,
                       InformationPattern::W1VsW2}) {
    const auto m = make(fixtures::table_coefficients(), fixtures::generic_terminal(), pattern, 400);
    const auto st = closed_loop_states(m, solve_riccati(m));
    for (std::size_t k = 0; k <= 400; k += 20) {
      // Conditioning on w2 keeps the mean and the w2 loading of y.
      CHECK(st.ytilde.p[k] == doctest::Approx(st.mean[k]).epsilon(1e-9));
      CHECK(st.ytilde.q2[k] == doctest::Approx(st.y.q2[k]).epsilon(1e-9));
      CHECK(st.y.p[k] == doctest::Approx(st.mean[k]).epsilon(1e-9));
      if (st.yhat) {
        CHECK(st.yhat->p[k] == doctest::Approx(st.mean[k]).epsilon(1e-9));
        CHECK(st.yhat->q1[k] == doctest::Approx(st.y.q1[k]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("w1 filter solves its linear ODE") {
  const auto m = make(fixtures::table_coefficients(), fixtures::generic_terminal(),
                      InformationPattern::W1VsW2, 400);
  const auto ric = solve_riccati(m);
  const auto st = propagate_affine(m, ric);
  const auto [p_ref] = integrate_rk4<1>(
      m.grid(), {1.0},
      [&](double t, const OdeState<1>& v) {
        const auto s = m.at(t);
        const double drive = (s.gain2() * ric.alpha2.at(t) + s.gain1() * ric.gamma2->at(t)) *
                                 st.mean.at(t) +
                             s.gain1() * ric.gamma3->at(t) + s.gain2() * ric.beta2.at(t) +
                             s.offset_drift();
        return OdeState<1>{-(s.a + s.gain1() * ric.gamma1->at(t)) * v[0] - drive};
      },
      Sweep::Backward, "reference");
  for (std::size_t k = 0; k <= 400; k += 40)
    CHECK(st.yhat->p[k] == doctest::Approx(p_ref[k]).epsilon(1e-10));
  const auto sym = make(fixtures::generic_coefficients(), fixtures::generic_terminal(),
                        InformationPattern::SymmetricW2, 50);
  CHECK_THROWS_AS(propagate_affine(sym, solve_riccati(sym)), PatternMismatch);
}

TEST_CASE("w2 filter at time zero matches the integrating-factor formula") {
  // Constant data, f2 = 0: alpha in closed form, beta by a fine Heun sweep.
  const auto cs = fixtures::generic_coefficients();
  const auto m = make(cs, fixtures::generic_terminal(), InformationPattern::SymmetricW2, 512);
  const auto st = closed_loop_states(m, solve_riccati(m));

  const double a = 0.2, B = 1.0, L = 1.5, G = 1.0 * 0.2 + 0.5 * -0.1 + 0.1;
  const double lk = 1.0 * 0.5 + 0.5 * -0.3;
  const double disc = std::sqrt(4 * a * a + 4 * B * L);
  const double rp = (-2 * a + disc) / (2 * B), rm = (-2 * a - disc) / (2 * B);
  const double y0 = -1.5;
  auto alpha = [&](double t) {
    const double e = (y0 - rp) / (y0 - rm) * std::exp(B * (rp - rm) * t);
    return (rp - rm * e) / (1 - e);
  };
  const std::size_t fine = 200000;
  const long double h = 1.0L / fine;
  long double beta = 0.5L * 0.3L + 1.0L * -0.2L, log_k = 0.0L, integral = 0.0L;
  auto beta_rate = [&](long double t, long double b) {
    const long double al = alpha(static_cast<double>(t));
    return (a + B * al) * b + G * al + lk;
  };
  auto growth = [&](long double t) { return a + B * alpha(static_cast<double>(t)); };
  for (std::size_t j = 0; j < fine; ++j) {
    const long double t = j * h;
    const long double f0 = B * beta + G;
    const long double k1 = beta_rate(t, beta);
    const long double bn = beta + h * k1;
    const long double beta_next = beta + 0.5L * h * (k1 + beta_rate(t + h, bn));
    const long double log_next = log_k + 0.5L * h * (growth(t) + growth(t + h));
    integral += 0.5L * h * (std::exp(log_k) * f0 + std::exp(log_next) * (B * beta_next + G));
    beta = beta_next;
    log_k = log_next;
  }
  const double oracle = static_cast<double>(std::exp(log_k) * 1.0L + integral);
  CHECK(st.ytilde.p[0] == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("backward sweep reproduces the closed-loop state") {
  const auto m = make(fixtures::diffusive_coefficients(), fixtures::diffusive_terminal(),
                      InformationPattern::SymmetricW2, 1024);
  const auto ric = solve_riccati(m);
  const auto st = closed_loop_states(m, ric);
  const std::size_t n = m.grid().points();
  const auto path = sample_path(m.grid(), 42, 0);
  AffineDrift drift{std::vector<double>(n), std::vector<double>(n)};
  AffineNoise noise = AffineNoise::zero(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = m.node(k);
    const double yt = st.ytilde.value(k, path);
    drift.slope[k] = s.a;
    drift.offset[k] = s.gain1() * (ric.alpha1[k] * yt + ric.beta1[k]) +
                      s.gain2() * (ric.alpha2[k] * yt + ric.beta2[k]) + s.f2 * st.y.q2[k] +
                      s.offset_drift();
    noise.offset1[k] = st.y.q1[k];
    noise.offset2[k] = st.y.q2[k];
  }
  const auto xi = fixtures::diffusive_terminal();
  const auto sol = backward_bsde_affine(m, path, xi.value(path.w1.back(), path.w2.back()), drift,
                                        noise);
  double err = 0.0;
  for (std::size_t k = 0; k < n; ++k) err = std::max(err, std::abs(sol.value[k] - st.y.value(k, path)));
  CHECK(err < 1e-3);
}
