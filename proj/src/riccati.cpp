#include "lqbsde/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lqbsde/csv.hpp"
#include "lqbsde/errors.hpp"
#include "lqbsde/ode.hpp"

namespace lqbsde {

GridFunction solve_standard_alpha(const ValidatedModel& model) {
  const auto& cs = model.coefficients();
  auto rhs = [&](double t, const OdeState<1>& y) {
    const CoefficientSample s = model.at(t);
    const double alpha = y[0];
    return OdeState<1>{s.gain1() * alpha * alpha + (2 * s.a + s.f2 * s.f2) * alpha -
                       (s.l1 + s.l2)};
  };
  auto [alpha] = integrate_rk4<1>(model.grid(), {-(cs.r1 + cs.r2)}, rhs, Sweep::Forward, "alpha");
  return alpha;
}

std::pair<GridFunction, GridFunction> solve_alpha_components(const ValidatedModel& model,
                                                             const GridFunction& alpha) {
  const auto& cs = model.coefficients();
  auto rhs = [&](double t, const OdeState<2>& y) {
    const CoefficientSample s = model.at(t);
    const double agg = alpha.at(t);
    const double rate = 2 * s.a + s.f2 * s.f2;
    return OdeState<2>{(rate + s.gain1() * agg) * y[0] - s.l1,
                       (rate + s.gain2() * agg) * y[1] - s.l2};
  };
  auto [a1, a2] =
      integrate_rk4<2>(model.grid(), {-cs.r1, -cs.r2}, rhs, Sweep::Forward, "alpha components");
  return {std::move(a1), std::move(a2)};
}

GridFunction solve_beta_aggregate(const ValidatedModel& model, const GridFunction& alpha) {
  const auto& cs = model.coefficients();
  auto rhs = [&](double t, const OdeState<1>& y) {
    const CoefficientSample s = model.at(t);
    const double agg = alpha.at(t);
    return OdeState<1>{(s.a + s.gain1() * agg + s.f2 * s.f2) * y[0] + s.offset_drift() * agg +
                       s.l1 * s.k1 + s.l2 * s.k2};
  };
  auto [beta] = integrate_rk4<1>(model.grid(), {cs.r1 * cs.h1 + cs.r2 * cs.h2}, rhs,
                                 Sweep::Forward, "beta");
  return beta;
}

std::pair<GridFunction, GridFunction> solve_beta_components(const ValidatedModel& model,
                                                            const GridFunction& alpha1,
                                                            const GridFunction& alpha2,
                                                            const GridFunction& beta) {
  const auto& cs = model.coefficients();
  auto rhs = [&](double t, const OdeState<2>& y) {
    const CoefficientSample s = model.at(t);
    const double a1 = alpha1.at(t);
    const double a2 = alpha2.at(t);
    const double agg = beta.at(t);
    const double rate = s.a + s.f2 * s.f2;
    return OdeState<2>{
        rate * y[0] + s.gain2() * a1 * agg + s.offset_drift() * a1 + s.l1 * s.k1,
        rate * y[1] + s.gain1() * a2 * agg + s.offset_drift() * a2 + s.l2 * s.k2};
  };
  auto [b1, b2] = integrate_rk4<2>(model.grid(), {cs.r1 * cs.h1, cs.r2 * cs.h2}, rhs,
                                   Sweep::Forward, "beta components");
  return {std::move(b1), std::move(b2)};
}

GammaGains solve_gamma(const ValidatedModel& model, const RiccatiSolution& so_far) {
  if (model.pattern() == InformationPattern::SymmetricW2)
    throw PatternMismatch("gamma gains belong to the full-information patterns");
  const auto& cs = model.coefficients();
  auto rhs = [&](double t, const OdeState<3>& g) {
    const CoefficientSample s = model.at(t);
    const double B1 = s.gain1();
    const double B2 = s.gain2();
    const double f2sq = s.f2 * s.f2;
    const double alpha = so_far.alpha.at(t);
    const double alpha2 = so_far.alpha2.at(t);
    const double beta = so_far.beta.at(t);
    const double beta2 = so_far.beta2.at(t);
    const double drift = s.offset_drift();
    return OdeState<3>{
        B1 * g[0] * g[0] + (2 * s.a + f2sq) * g[0] - s.l1,
        (2 * s.a + B1 * alpha + f2sq + B1 * g[0]) * g[1] + B2 * alpha2 * g[0],
        (s.a + f2sq + B1 * g[0]) * g[2] + (drift + B2 * beta2) * g[0] +
            (drift + B1 * beta) * g[1] + s.l1 * s.k1};
  };
  auto [g1, g2, g3] = integrate_rk4<3>(model.grid(), {-cs.r1, 0.0, cs.r1 * cs.h1}, rhs,
                                       Sweep::Forward, "gamma");
  return {std::move(g1), std::move(g2), std::move(g3)};
}

TauGains solve_tau(const ValidatedModel& model, const RiccatiSolution& so_far) {
  if (model.pattern() != InformationPattern::W1VsW2)
    throw PatternMismatch("tau gains belong to the w1-vs-w2 pattern");
  const auto& cs = model.coefficients();
  auto rhs = [&](double t, const OdeState<3>& g) {
    const CoefficientSample s = model.at(t);
    const double B1 = s.gain1();
    const double B2 = s.gain2();
    const double alpha = so_far.alpha.at(t);
    const double alpha1 = so_far.alpha1.at(t);
    const double beta = so_far.beta.at(t);
    const double beta1 = so_far.beta1.at(t);
    const double drift = s.offset_drift();
    return OdeState<3>{B2 * g[0] * g[0] + 2 * s.a * g[0] - s.l2,
                       (2 * s.a + B1 * alpha + B2 * g[0]) * g[1] + B1 * alpha1 * g[0],
                       (s.a + B2 * g[0]) * g[2] + (drift + B1 * beta1) * g[0] +
                           (drift + B1 * beta) * g[1] + s.l2 * s.k2};
  };
  auto [t1, t2, t3] =
      integrate_rk4<3>(model.grid(), {-cs.r2, 0.0, cs.r2 * cs.h2}, rhs, Sweep::Forward, "tau");
  return {std::move(t1), std::move(t2), std::move(t3)};
}

RiccatiSolution solve_riccati(const ValidatedModel& model) {
  GridFunction alpha = solve_standard_alpha(model);
  auto [alpha1, alpha2] = solve_alpha_components(model, alpha);
  GridFunction beta = solve_beta_aggregate(model, alpha);
  auto [beta1, beta2] = solve_beta_components(model, alpha1, alpha2, beta);
  RiccatiSolution out{model.grid(),     std::move(alpha), std::move(alpha1), std::move(alpha2),
                      std::move(beta),  std::move(beta1), std::move(beta2),  std::nullopt,
                      std::nullopt,     std::nullopt,     std::nullopt,      std::nullopt,
                      std::nullopt};
  if (model.pattern() != InformationPattern::SymmetricW2) {
    GammaGains g = solve_gamma(model, out);
    out.gamma1 = std::move(g.gamma1);
    out.gamma2 = std::move(g.gamma2);
    out.gamma3 = std::move(g.gamma3);
  }
  if (model.pattern() == InformationPattern::W1VsW2) {
    TauGains g = solve_tau(model, out);
    out.tau1 = std::move(g.tau1);
    out.tau2 = std::move(g.tau2);
    out.tau3 = std::move(g.tau3);
  }
  return out;
}

double CoupledResiduals::max() const noexcept { return std::max({alpha1, beta1, alpha2, beta2}); }

CoupledResiduals coupled_residuals(const ValidatedModel& model, const RiccatiSolution& sol) {
  CoupledResiduals r;
  const TimeGrid& grid = sol.grid;
  for (std::size_t k = 1; k < grid.steps(); ++k) {
    const CoefficientSample s = model.at(grid.time(k));
    const double B1 = s.gain1();
    const double B2 = s.gain2();
    const double f2sq = s.f2 * s.f2;
    const double drift = s.offset_drift();
    const double a1 = sol.alpha1[k];
    const double a2 = sol.alpha2[k];
    const double b1 = sol.beta1[k];
    const double b2 = sol.beta2[k];
    const double res_a1 =
        sol.alpha1.derivative(k) - B1 * a1 * a1 - (2 * s.a + f2sq) * a1 - B2 * a1 * a2 + s.l1;
    const double res_b1 = sol.beta1.derivative(k) - (s.a + B1 * a1 + f2sq) * b1 -
                          B2 * a1 * b2 - drift * a1 - s.l1 * s.k1;
    const double res_a2 =
        sol.alpha2.derivative(k) - B2 * a2 * a2 - (2 * s.a + f2sq) * a2 - B1 * a1 * a2 + s.l2;
    const double res_b2 = sol.beta2.derivative(k) - (s.a + B2 * a2 + f2sq) * b2 -
                          B1 * a2 * b1 - drift * a2 - s.l2 * s.k2;
    r.alpha1 = std::max(r.alpha1, std::abs(res_a1));
    r.beta1 = std::max(r.beta1, std::abs(res_b1));
    r.alpha2 = std::max(r.alpha2, std::abs(res_a2));
    r.beta2 = std::max(r.beta2, std::abs(res_b2));
  }
  return r;
}

std::pair<double, double> decomposition_gaps(const RiccatiSolution& sol) {
  double ga = 0.0;
  double gb = 0.0;
  for (std::size_t k = 0; k < sol.grid.points(); ++k) {
    ga = std::max(ga, std::abs(sol.alpha1[k] + sol.alpha2[k] - sol.alpha[k]));
    gb = std::max(gb, std::abs(sol.beta1[k] + sol.beta2[k] - sol.beta[k]));
  }
  return {ga, gb};
}

void write_riccati_csv(std::ostream& out, const RiccatiSolution& sol) {
  out << "t,alpha1,beta1,alpha2,beta2,alpha,beta,gamma1,gamma2,gamma3,tau1,tau2,tau3\n";
  auto opt = [](const std::optional<GridFunction>& f, std::size_t k) -> std::optional<double> {
    if (!f) return std::nullopt;
    return (*f)[k];
  };
  for (std::size_t k = 0; k < sol.grid.points(); ++k) {
    out << format_real(sol.grid.time(k));
    for (double v : {sol.alpha1[k], sol.beta1[k], sol.alpha2[k], sol.beta2[k], sol.alpha[k],
                     sol.beta[k]})
      write_field(out, v);
    for (const auto* f : {&sol.gamma1, &sol.gamma2, &sol.gamma3, &sol.tau1, &sol.tau2, &sol.tau3})
      write_field(out, opt(*f, k));
    out << '\n';
  }
}

}  // namespace lqbsde
