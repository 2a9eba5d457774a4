#include "lqbsde/affine.hpp"

#include "lqbsde/errors.hpp"
#include "lqbsde/kernels.hpp"
#include "lqbsde/ode.hpp"

namespace lqbsde {

ClosedLoopStates closed_loop_states(const ValidatedModel& model, const RiccatiSolution& ric) {
  if (model.pattern() == InformationPattern::W1VsW2) return propagate_affine(model, ric);
  const bool full_info = model.pattern() == InformationPattern::FullVsW2;
  if (full_info && !ric.has_gamma()) throw PatternMismatch("pattern ii needs the gamma gains");

  // State: filter (p~, q~2) and state (p, q1, q2).
  auto rhs = [&](double t, const OdeState<5>& v) {
    const CoefficientSample s = model.at(t);
    const double B1 = s.gain1();
    const double B2 = s.gain2();
    const double G = s.offset_drift();
    const double alpha = ric.alpha.at(t);
    const double alpha1 = ric.alpha1.at(t);
    const double alpha2 = ric.alpha2.at(t);
    const double beta = ric.beta.at(t);
    const double beta2 = ric.beta2.at(t);
    const auto [pt, qt2, p, q1, q2] = v;
    const double gt = s.a + B1 * alpha;
    OdeState<5> d{};
    d[0] = -(gt * pt + s.f2 * qt2 + B1 * beta + G);
    d[1] = -gt * qt2;
    if (!full_info) {
      const double beta1 = ric.beta1.at(t);
      d[2] = -(s.a * p + B1 * (alpha1 * pt + beta1) + B2 * (alpha2 * pt + beta2) + s.f2 * q2 + G);
      d[3] = -s.a * q1;
      d[4] = -(s.a * q2 + (B1 * alpha1 + B2 * alpha2) * qt2);
    } else {
      const double g1 = ric.gamma1->at(t);
      const double g2 = ric.gamma2->at(t);
      const double g3 = ric.gamma3->at(t);
      const double gy = s.a + B1 * g1;
      const double cross = B1 * g2 + B2 * alpha2;
      d[2] = -(gy * p + cross * pt + B1 * g3 + B2 * beta2 + s.f2 * q2 + G);
      d[3] = -gy * q1;
      d[4] = -(gy * q2 + cross * qt2);
    }
    return d;
  };
  const auto& xi = model.terminal();
  auto [pt, qt2, p, q1, q2] = integrate_rk4<5>(model.grid(), {xi.c0, xi.c2, xi.c0, xi.c1, xi.c2},
                                               rhs, Sweep::Backward, "closed-loop state");
  GridFunction mean = p;
  return {std::move(mean),
          AffineState{std::move(p), std::move(q1), std::move(q2)},
          AffineState{std::move(pt), GridFunction::zero(model.grid()), std::move(qt2)},
          std::nullopt};
}

ClosedLoopStates propagate_affine(const ValidatedModel& model, const RiccatiSolution& ric) {
  if (model.pattern() != InformationPattern::W1VsW2 || !ric.has_tau())
    throw PatternMismatch("propagate_affine needs the w1-vs-w2 pattern");
  const auto& xi = model.terminal();
  const TimeGrid& grid = model.grid();
  const auto& gamma1 = *ric.gamma1;
  const auto& gamma2 = *ric.gamma2;
  const auto& gamma3 = *ric.gamma3;
  const auto& tau1 = *ric.tau1;
  const auto& tau2 = *ric.tau2;
  const auto& tau3 = *ric.tau3;
  auto none = [](double) { return 0.0; };

  const auto gamma_bar = make_kernel(KernelKind::GammaBar, model, ric);
  GridFunction mean = gamma_bar.convolve_backward(xi.c0, [&](double t) {
    const auto s = model.at(t);
    return s.gain1() * ric.beta.at(t) + s.offset_drift();
  });

  const auto xi_kernel = make_kernel(KernelKind::Xi, model, ric);
  GridFunction p_hat = xi_kernel.convolve_backward(xi.c0, [&](double t) {
    const auto s = model.at(t);
    return (s.gain2() * ric.alpha2.at(t) + s.gain1() * gamma2.at(t)) * mean.at(t) +
           s.gain1() * gamma3.at(t) + s.gain2() * ric.beta2.at(t) + s.offset_drift();
  });
  GridFunction q_hat = xi_kernel.convolve_backward(xi.c1, none);

  const auto psi = make_kernel(KernelKind::Psi, model, ric);
  GridFunction p_tilde = psi.convolve_backward(xi.c0, [&](double t) {
    const auto s = model.at(t);
    return (s.gain2() * tau2.at(t) + s.gain1() * ric.alpha1.at(t)) * mean.at(t) +
           s.gain1() * ric.beta1.at(t) + s.gain2() * tau3.at(t) + s.offset_drift();
  });
  GridFunction q_tilde = psi.convolve_backward(xi.c2, none);

  auto rhs = [&](double t, const OdeState<3>& v) {
    const CoefficientSample s = model.at(t);
    const double B1 = s.gain1();
    const double B2 = s.gain2();
    const double ey = mean.at(t);
    const double x1_hat = gamma1.at(t) * p_hat.at(t) + gamma2.at(t) * ey + gamma3.at(t);
    const double x2_tilde = tau1.at(t) * p_tilde.at(t) + tau2.at(t) * ey + tau3.at(t);
    return OdeState<3>{-(s.a * v[0] + B1 * x1_hat + B2 * x2_tilde + s.offset_drift()),
                       -(s.a * v[1] + B1 * gamma1.at(t) * q_hat.at(t)),
                       -(s.a * v[2] + B2 * tau1.at(t) * q_tilde.at(t))};
  };
  auto [p, q1, q2] =
      integrate_rk4<3>(grid, {xi.c0, xi.c1, xi.c2}, rhs, Sweep::Backward, "case iii state");

  return {std::move(mean),
          AffineState{std::move(p), std::move(q1), std::move(q2)},
          AffineState{std::move(p_tilde), GridFunction::zero(grid), std::move(q_tilde)},
          AffineState{std::move(p_hat), std::move(q_hat), GridFunction::zero(grid)}};
}

}  // namespace lqbsde
