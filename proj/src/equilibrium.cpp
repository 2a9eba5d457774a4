#include "lqbsde/equilibrium.hpp"

#include <cmath>
#include <ostream>

#include "lqbsde/csv.hpp"
#include "lqbsde/errors.hpp"
#include "lqbsde/parallel.hpp"
#include "lqbsde/stochastic.hpp"

namespace lqbsde {

EquilibriumReconstructor::EquilibriumReconstructor(const ValidatedModel& model,
                                                   const RiccatiSolution& riccati)
    : model_(model), riccati_(riccati), states_(closed_loop_states(model, riccati)) {}

PathRealization EquilibriumReconstructor::realize(const BrownianPath& path) const {
  if (!(path.grid == model_.grid())) throw GridMismatch("path grid differs from the model grid");
  switch (model_.pattern()) {
    case InformationPattern::SymmetricW2:
      return realize_symmetric(path, false);
    case InformationPattern::FullVsW2:
      return realize_symmetric(path, true);
    case InformationPattern::W1VsW2:
      return realize_independent(path);
  }
  throw PatternMismatch("unknown information pattern");
}

PathRealization EquilibriumReconstructor::realize_symmetric(const BrownianPath& path,
                                                            bool full_info) const {
  const std::size_t n = model_.grid().points();
  const auto& ric = riccati_;
  const auto& xi = model_.terminal();
  const double w1T = path.w1.back();
  const double w2T = path.w2.back();

  PathRealization out;
  out.pattern = model_.pattern();
  out.ymean = states_.mean.values();

  // w2 filter of y.
  AffineDrift filter_drift{std::vector<double>(n), std::vector<double>(n)};
  AffineNoise filter_noise = AffineNoise::zero(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = model_.node(k);
    filter_drift.slope[k] = s.a + s.gain1() * ric.alpha[k];
    filter_drift.offset[k] = s.f2 * states_.ytilde.q2[k] + s.gain1() * ric.beta[k] + s.offset_drift();
    filter_noise.offset2[k] = states_.ytilde.q2[k];
  }
  auto filter = backward_bsde_affine(model_, path, conditional_terminal(xi, w2T, ConditioningMode::GivenW2),
                                     filter_drift, filter_noise);
  out.ytilde = std::move(filter.value);
  out.z2tilde = std::move(filter.z2);

  out.x1tilde.resize(n);
  out.x2tilde.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.x1tilde[k] = ric.alpha1[k] * out.ytilde[k] + ric.beta1[k];
    out.x2tilde[k] = ric.alpha2[k] * out.ytilde[k] + ric.beta2[k];
  }

  AffineDrift drift{std::vector<double>(n), std::vector<double>(n)};
  AffineNoise noise = AffineNoise::zero(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = model_.node(k);
    const double rest = s.f2 * states_.y.q2[k] + s.offset_drift();
    if (!full_info) {
      drift.slope[k] = s.a;
      drift.offset[k] = s.gain1() * out.x1tilde[k] + s.gain2() * out.x2tilde[k] + rest;
    } else {
      drift.slope[k] = s.a + s.gain1() * (*ric.gamma1)[k];
      drift.offset[k] = (s.gain1() * (*ric.gamma2)[k] + s.gain2() * ric.alpha2[k]) * out.ytilde[k] +
                        s.gain1() * (*ric.gamma3)[k] + s.gain2() * ric.beta2[k] + rest;
    }
    noise.offset1[k] = states_.y.q1[k];
    noise.offset2[k] = states_.y.q2[k];
  }
  auto state = backward_bsde_affine(model_, path, xi.value(w1T, w2T), drift, noise);
  out.y = std::move(state.value);
  out.z1 = std::move(state.z1);
  out.z2 = std::move(state.z2);

  out.adjoint1 = forward_sde(model_, path, out.y, Adjoint::X1);
  out.adjoint2 = forward_sde(model_, path, out.y, Adjoint::X2);
  if (full_info) {
    out.x1.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      out.x1[k] = (*ric.gamma1)[k] * out.y[k] + (*ric.gamma2)[k] * out.ytilde[k] + (*ric.gamma3)[k];
  } else {
    out.x1 = out.adjoint1;
  }
  out.x2 = out.adjoint2;

  out.u1.resize(n);
  out.u2.resize(n);
  const auto& first = full_info ? out.x1 : out.x1tilde;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = model_.node(k);
    out.u1[k] = s.b1 / s.m1 * first[k] + s.n1;
    out.u2[k] = s.b2 / s.m2 * out.x2tilde[k] + s.n2;
  }
  return out;
}

PathRealization EquilibriumReconstructor::realize_independent(const BrownianPath& path) const {
  const std::size_t n = model_.grid().points();
  const auto& ric = riccati_;
  const auto& yhat = *states_.yhat;

  PathRealization out;
  out.pattern = model_.pattern();
  out.ymean = states_.mean.values();
  out.y.resize(n);
  out.ytilde.resize(n);
  out.yhat.resize(n);
  out.x1hat.resize(n);
  out.x2tilde.resize(n);
  out.z1 = states_.y.q1.values();
  out.z2 = states_.y.q2.values();
  out.z2tilde = states_.ytilde.q2.values();
  for (std::size_t k = 0; k < n; ++k) {
    out.y[k] = states_.y.value(k, path);
    out.ytilde[k] = states_.ytilde.value(k, path);
    out.yhat[k] = yhat.value(k, path);
    const double ey = out.ymean[k];
    out.x1hat[k] = (*ric.gamma1)[k] * out.yhat[k] + (*ric.gamma2)[k] * ey + (*ric.gamma3)[k];
    out.x2tilde[k] = (*ric.tau1)[k] * out.ytilde[k] + (*ric.tau2)[k] * ey + (*ric.tau3)[k];
  }
  out.adjoint1 = forward_sde(model_, path, out.y, Adjoint::X1);
  out.adjoint2 = forward_sde(model_, path, out.y, Adjoint::X2);
  out.x1 = out.adjoint1;
  out.x2 = out.adjoint2;

  out.u1.resize(n);
  out.u2.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = model_.node(k);
    out.u1[k] = s.b1 / s.m1 * out.x1hat[k] + s.n1;
    out.u2[k] = s.b2 / s.m2 * out.x2tilde[k] + s.n2;
  }
  return out;
}

namespace {

std::vector<PathRealization> reconstruct_batch(const ValidatedModel& model,
                                               const RiccatiSolution& riccati,
                                               const BrownianPathBatch& batch, unsigned threads) {
  if (!(batch.grid == model.grid())) throw GridMismatch("batch grid differs from the model grid");
  const EquilibriumReconstructor rec(model, riccati);
  std::vector<PathRealization> out(batch.paths.size());
  parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = rec.realize(batch.paths[i]); });
  return out;
}

void require_pattern(const ValidatedModel& model, InformationPattern expected) {
  if (model.pattern() != expected)
    throw PatternMismatch("reconstruction for " + std::string(to_string(expected)) +
                          " called on a " + std::string(to_string(model.pattern())) + " model");
}

}  // namespace

std::vector<PathRealization> reconstruct_case_i(const ValidatedModel& model,
                                                const RiccatiSolution& riccati,
                                                const BrownianPathBatch& batch, unsigned threads) {
  require_pattern(model, InformationPattern::SymmetricW2);
  return reconstruct_batch(model, riccati, batch, threads);
}

std::vector<PathRealization> reconstruct_case_ii(const ValidatedModel& model,
                                                 const RiccatiSolution& riccati,
                                                 const BrownianPathBatch& batch, unsigned threads) {
  require_pattern(model, InformationPattern::FullVsW2);
  return reconstruct_batch(model, riccati, batch, threads);
}

std::vector<PathRealization> reconstruct_case_iii(const ValidatedModel& model,
                                                  const RiccatiSolution& riccati,
                                                  const BrownianPathBatch& batch,
                                                  unsigned threads) {
  require_pattern(model, InformationPattern::W1VsW2);
  return reconstruct_batch(model, riccati, batch, threads);
}

std::vector<PathRealization> reconstruct(const ValidatedModel& model,
                                         const RiccatiSolution& riccati,
                                         const BrownianPathBatch& batch, unsigned threads) {
  return reconstruct_batch(model, riccati, batch, threads);
}

void for_each_realization(
    const EquilibriumReconstructor& reconstructor, std::uint64_t seed, std::size_t count,
    unsigned threads,
    const std::function<void(std::size_t, const BrownianPath&, const PathRealization&)>& body) {
  const TimeGrid& grid = reconstructor.model().grid();
  parallel_for(count, threads, [&](std::size_t i) {
    const BrownianPath path = sample_path(grid, seed, i);
    body(i, path, reconstructor.realize(path));
  });
}

std::pair<std::vector<double>, std::vector<double>> open_loop_controls(
    const ValidatedModel& model, const PathRealization& r) {
  const std::vector<double>* first = &r.x1tilde;
  if (r.pattern == InformationPattern::FullVsW2) first = &r.x1;
  if (r.pattern == InformationPattern::W1VsW2) first = &r.x1hat;
  const std::size_t n = model.grid().points();
  std::vector<double> u1(n), u2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = model.node(k);
    u1[k] = s.b1 / s.m1 * (*first)[k] + s.n1;
    u2[k] = s.b2 / s.m2 * r.x2tilde[k] + s.n2;
  }
  return {std::move(u1), std::move(u2)};
}

namespace {

double guarded_ratio(double num, double den, const char* what) {
  if (den == 0.0) throw SingularRatio(std::string(what) + " has a zero denominator");
  return num / den;
}

}  // namespace

std::vector<double> printed_z2(const ValidatedModel& model, const RiccatiSolution& ric,
                               const PathRealization& r) {
  if (r.pattern == InformationPattern::W1VsW2)
    throw PatternMismatch("no printed z2 form for the w1-vs-w2 pattern");
  const std::size_t n = model.grid().points();
  std::vector<double> z(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double f2 = model.node(k).f2;
    if (f2 == 0.0) continue;
    if (r.pattern == InformationPattern::SymmetricW2) {
      z[k] = f2 * r.y[k] + f2 * guarded_ratio(ric.beta1[k], ric.alpha1[k], "beta1/alpha1");
    } else {
      const double g1 = (*ric.gamma1)[k];
      z[k] = f2 * r.y[k] + f2 * guarded_ratio((*ric.gamma3)[k], g1, "gamma3/gamma1") -
             f2 * guarded_ratio((*ric.gamma2)[k], g1, "gamma2/gamma1") *
                 guarded_ratio(ric.beta2[k], ric.alpha2[k], "beta2/alpha2");
    }
  }
  return z;
}

double ratio_gap(const RiccatiSolution& ric) {
  double gap = 0.0;
  for (std::size_t k = 1; k < ric.grid.points(); ++k) {
    if (ric.alpha1[k] == 0.0 || ric.alpha2[k] == 0.0) continue;
    gap = std::max(gap, std::abs(ric.beta1[k] / ric.alpha1[k] - ric.beta2[k] / ric.alpha2[k]));
  }
  return gap;
}

void write_realization_csv(std::ostream& out, const TimeGrid& grid,
                           std::span<const PathRealization> realizations) {
  out << "path,t,y,ytilde,yhat,ymean,x1,x2,x1tilde,x2tilde,x1hat,z1,z2,u1,u2\n";
  for (std::size_t p = 0; p < realizations.size(); ++p) {
    const auto& r = realizations[p];
    for (std::size_t k = 0; k < grid.points(); ++k) {
      out << p << ',' << format_real(grid.time(k));
      for (const auto* v : {&r.y, &r.ytilde, &r.yhat, &r.ymean, &r.x1, &r.x2, &r.x1tilde,
                            &r.x2tilde, &r.x1hat, &r.z1, &r.z2, &r.u1, &r.u2}) {
        out << ',';
        if (!v->empty()) out << format_real((*v)[k]);
      }
      out << '\n';
    }
  }
}

}  // namespace lqbsde
