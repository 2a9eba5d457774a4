#include "lqbsde/verification.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lqbsde/csv.hpp"
#include "lqbsde/errors.hpp"
#include "lqbsde/ode.hpp"
#include "lqbsde/parallel.hpp"

namespace lqbsde {

namespace {

// Trapezoid weights on the grid.
std::vector<double> trapezoid_weights(const TimeGrid& grid) {
  std::vector<double> w(grid.points(), grid.dt());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

struct PlayerData {
  double b, m, l, k, n;
};

PlayerData player_at(const CoefficientSample& s, int player) {
  if (player == 1) return {s.b1, s.m1, s.l1, s.k1, s.n1};
  return {s.b2, s.m2, s.l2, s.k2, s.n2};
}

}  // namespace

PathCost path_cost(const ValidatedModel& model, const PathRealization& r) {
  const auto w = trapezoid_weights(model.grid());
  const auto& cs = model.coefficients();
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto& s = model.node(k);
    const double e1 = r.y[k] - s.k1, e2 = r.y[k] - s.k2;
    const double d1 = r.u1[k] - s.n1, d2 = r.u2[k] - s.n2;
    s1 += w[k] * (s.l1 * e1 * e1 + s.m1 * d1 * d1);
    s2 += w[k] * (s.l2 * e2 * e2 + s.m2 * d2 * d2);
  }
  const double i1 = r.y[0] - cs.h1, i2 = r.y[0] - cs.h2;
  return {0.5 * (s1 + cs.r1 * i1 * i1), 0.5 * (s2 + cs.r2 * i2 * i2)};
}

namespace {

CostReport summarize(const std::vector<double>& j1, const std::vector<double>& j2) {
  const auto e1 = estimate_mean(j1);
  const auto e2 = estimate_mean(j2);
  return {e1.mean, e2.mean, e1.se, e2.se, j1.size()};
}

}  // namespace

CostReport mc_cost(const ValidatedModel& model, std::span<const PathRealization> realizations) {
  std::vector<double> j1(realizations.size()), j2(realizations.size());
  for (std::size_t i = 0; i < realizations.size(); ++i) {
    const auto c = path_cost(model, realizations[i]);
    j1[i] = c.J1;
    j2[i] = c.J2;
  }
  return summarize(j1, j2);
}

CostReport mc_cost(const EquilibriumReconstructor& rec, std::uint64_t seed, std::size_t count,
                   unsigned threads) {
  std::vector<double> j1(count), j2(count);
  for_each_realization(rec, seed, count, threads,
                       [&](std::size_t i, const BrownianPath&, const PathRealization& r) {
                         const auto c = path_cost(rec.model(), r);
                         j1[i] = c.J1;
                         j2[i] = c.J2;
                       });
  return summarize(j1, j2);
}

StationarityReport perturbation_test(const EquilibriumReconstructor& rec, int player,
                                     const Direction& direction, std::span<const double> epsilons,
                                     std::uint64_t seed, std::size_t count, unsigned threads) {
  if (direction.stochastic)
    throw NotAdapted("perturbation directions must be deterministic functions of time");
  if (player != 1 && player != 2) throw OutOfRange("player must be 1 or 2");
  const ValidatedModel& model = rec.model();
  const TimeGrid& grid = model.grid();
  const std::size_t n = grid.points();
  const auto& cs = model.coefficients();
  const double r = player == 1 ? cs.r1 : cs.r2;
  const double h = player == 1 ? cs.h1 : cs.h2;
  const auto w = trapezoid_weights(grid);

  const auto [response] = integrate_rk4<1>(
      grid, {0.0},
      [&](double t, const OdeState<1>& v) {
        const auto s = model.at(t);
        return OdeState<1>{-(s.a * v[0] + player_at(s, player).b * direction.phi(t))};
      },
      Sweep::Backward, "perturbation response");
  std::vector<double> phi(n);
  for (std::size_t k = 0; k < n; ++k) phi[k] = direction.phi(grid.time(k));

  StationarityReport out;
  out.player = player;
  out.direction = direction.name;
  {
    double quad = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto p = player_at(model.node(k), player);
      quad += w[k] * (p.l * response[k] * response[k] + p.m * phi[k] * phi[k]);
    }
    out.kappa = 0.5 * (quad + r * response[0] * response[0]);
  }

  const std::size_t ne = epsilons.size();
  std::vector<double> lambda(count), theta(count);
  std::vector<std::vector<double>> dj(ne, std::vector<double>(count));
  for_each_realization(rec, seed, count, threads,
                       [&](std::size_t i, const BrownianPath&, const PathRealization& real) {
    const auto& u = player == 1 ? real.u1 : real.u2;
    const auto& x = player == 1 ? real.adjoint1 : real.adjoint2;
    double lin = 0.0, adj = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto p = player_at(model.node(k), player);
      lin += w[k] * (p.l * (real.y[k] - p.k) * response[k] + p.m * (u[k] - p.n) * phi[k]);
      adj += w[k] * (p.m * (u[k] - p.n) - p.b * x[k]) * phi[k];
    }
    lambda[i] = lin + r * (real.y[0] - h) * response[0];
    theta[i] = adj;
    for (std::size_t e = 0; e < ne; ++e) {
      const double eps = epsilons[e];
      double diff = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto p = player_at(model.node(k), player);
        const double ey = real.y[k] - p.k, eu = u[k] - p.n;
        const double ey1 = ey + eps * response[k], eu1 = eu + eps * phi[k];
        diff += w[k] * (p.l * (ey1 * ey1 - ey * ey) + p.m * (eu1 * eu1 - eu * eu));
      }
      const double e0 = real.y[0] - h, e01 = e0 + eps * response[0];
      dj[e][i] = 0.5 * (diff + r * (e01 * e01 - e0 * e0));
    }
  });

  const auto le = estimate_mean(lambda);
  const auto te = estimate_mean(theta);
  out.lambda = le.mean;
  out.lambda_se = le.se;
  out.theta = te.mean;
  out.theta_se = te.se;
  for (std::size_t e = 0; e < ne; ++e) {
    const auto est = estimate_mean(dj[e]);
    out.table.push_back({epsilons[e], est.mean, est.se});
  }

  // Least squares for dJ = kappa eps^2 + lambda eps.
  double s44 = 0.0, s33 = 0.0, s22 = 0.0, s2y = 0.0, s1y = 0.0, scale = 0.0;
  for (const auto& pt : out.table) {
    const double e = pt.eps;
    s44 += e * e * e * e;
    s33 += e * e * e;
    s22 += e * e;
    s2y += e * e * pt.dJ;
    s1y += e * pt.dJ;
    scale = std::max(scale, std::abs(pt.dJ));
  }
  const double det = s44 * s22 - s33 * s33;
  if (det != 0.0) {
    out.kappa_fit = (s2y * s22 - s1y * s33) / det;
    out.lambda_fit = (s44 * s1y - s33 * s2y) / det;
  }
  for (const auto& pt : out.table) {
    const double fit = out.kappa_fit * pt.eps * pt.eps + out.lambda_fit * pt.eps;
    if (scale > 0.0) out.fit_residual = std::max(out.fit_residual, std::abs(fit - pt.dJ) / scale);
  }
  return out;
}

std::vector<FilterPoint> filter_check(const EquilibriumReconstructor& rec, std::uint64_t seed,
                                      std::uint64_t outer, std::size_t inner,
                                      std::span<const std::size_t> checkpoints, unsigned threads) {
  const ValidatedModel& model = rec.model();
  if (model.pattern() != InformationPattern::SymmetricW2)
    throw PatternMismatch("filter check needs the symmetric w2 pattern");
  const TimeGrid& grid = model.grid();
  for (std::size_t k : checkpoints)
    if (k >= grid.points()) throw OutOfRange("filter checkpoint beyond the grid");

  const BrownianPath fixed = sample_path(grid, seed, outer);
  const PathRealization base = rec.realize(fixed);
  const auto& ric = rec.riccati();

  std::vector<std::vector<double>> samples(checkpoints.size(), std::vector<double>(inner));
  parallel_for(inner, threads, [&](std::size_t j) {
    const auto path = splice_w1(fixed, sample_path(grid, seed, j, Substream::Inner));
    const auto r = rec.realize(path);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) samples[c][j] = r.x1[checkpoints[c]];
  });

  std::vector<FilterPoint> out;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const std::size_t k = checkpoints[c];
    const auto est = estimate_mean(samples[c]);
    out.push_back({k, est.mean, est.se, ric.alpha1[k] * base.ytilde[k] + ric.beta1[k]});
  }
  return out;
}

OracleResult deterministic_oracle(const ValidatedModel& model) {
  const auto& xi = model.terminal();
  if (!xi.is_deterministic()) throw PatternMismatch("the oracle needs a deterministic terminal value");
  const TimeGrid& grid = model.grid();
  const std::size_t steps = grid.steps();
  const std::size_t n = grid.points();
  const double dt = grid.dt();
  for (std::size_t k = 0; k < n; ++k)
    if (model.node(k).f1 != 0.0 || model.node(k).f2 != 0.0)
      throw PatternMismatch("the oracle needs f1 = f2 = 0");

  std::vector<CoefficientSample> mid(steps);
  for (std::size_t j = 0; j < steps; ++j) mid[j] = model.at(grid.time(j) + 0.5 * dt);

  // y_j (1 - dt a/2) = y_{j+1} (1 + dt a/2) + dt (b1 u1_j + b2 u2_j + c).
  std::vector<double> carry(steps), lead(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double den = 1.0 - 0.5 * dt * mid[j].a;
    carry[j] = (1.0 + 0.5 * dt * mid[j].a) / den;
    lead[j] = dt / den;
  }
  Eigen::VectorXd free = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  free[static_cast<Eigen::Index>(steps)] = xi.c0;
  for (std::size_t j = steps; j-- > 0;)
    free[static_cast<Eigen::Index>(j)] =
        carry[j] * free[static_cast<Eigen::Index>(j + 1)] + lead[j] * mid[j].c;

  const auto N = static_cast<Eigen::Index>(steps);
  const auto P = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd S1 = Eigen::MatrixXd::Zero(P, N), S2 = Eigen::MatrixXd::Zero(P, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    S1(j, j) = lead[ju] * mid[ju].b1;
    S2(j, j) = lead[ju] * mid[ju].b2;
    for (Eigen::Index k = j; k-- > 0;) {
      const double f = carry[static_cast<std::size_t>(k)];
      S1(k, j) = f * S1(k + 1, j);
      S2(k, j) = f * S2(k + 1, j);
    }
  }

  const auto w = trapezoid_weights(grid);
  const auto& cs = model.coefficients();
  Eigen::VectorXd q1(P), q2(P), s1 = Eigen::VectorXd::Zero(P), s2 = Eigen::VectorXd::Zero(P);
  for (Eigen::Index k = 0; k < P; ++k) {
    const auto& s = model.node(static_cast<std::size_t>(k));
    const double wk = w[static_cast<std::size_t>(k)];
    q1[k] = wk * s.l1;
    q2[k] = wk * s.l2;
    s1[k] = wk * s.l1 * s.k1;
    s2[k] = wk * s.l2 * s.k2;
  }
  q1[0] += cs.r1;
  q2[0] += cs.r2;
  s1[0] += cs.r1 * cs.h1;
  s2[0] += cs.r2 * cs.h2;
  Eigen::VectorXd m1(N), m2(N), n1(N), n2(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const auto& s = mid[static_cast<std::size_t>(j)];
    m1[j] = dt * s.m1;
    m2[j] = dt * s.m2;
    n1[j] = s.n1;
    n2[j] = s.n2;
  }

  const Eigen::MatrixXd Q1S1 = q1.asDiagonal() * S1, Q1S2 = q1.asDiagonal() * S2;
  const Eigen::MatrixXd Q2S1 = q2.asDiagonal() * S1, Q2S2 = q2.asDiagonal() * S2;
  Eigen::MatrixXd A(2 * N, 2 * N);
  A.topLeftCorner(N, N) = S1.transpose() * Q1S1;
  A.topRightCorner(N, N) = S1.transpose() * Q1S2;
  A.bottomLeftCorner(N, N) = S2.transpose() * Q2S1;
  A.bottomRightCorner(N, N) = S2.transpose() * Q2S2;
  A.topLeftCorner(N, N).diagonal() += m1;
  A.bottomRightCorner(N, N).diagonal() += m2;
  Eigen::VectorXd rhs(2 * N);
  rhs.head(N) = S1.transpose() * (s1 - q1.cwiseProduct(free)) + m1.cwiseProduct(n1);
  rhs.tail(N) = S2.transpose() * (s2 - q2.cwiseProduct(free)) + m2.cwiseProduct(n2);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw SingularSystem("oracle first-order system is rank-deficient");
  const Eigen::VectorXd u = lu.solve(rhs);
  const Eigen::VectorXd y = free + S1 * u.head(N) + S2 * u.tail(N);

  OracleResult out;
  out.u1.assign(u.data(), u.data() + N);
  out.u2.assign(u.data() + N, u.data() + 2 * N);
  out.y.assign(y.data(), y.data() + P);
  double c1 = 0.0, c2 = 0.0;
  for (Eigen::Index k = 0; k < P; ++k) {
    const auto& s = model.node(static_cast<std::size_t>(k));
    const double wk = w[static_cast<std::size_t>(k)];
    c1 += wk * s.l1 * (y[k] - s.k1) * (y[k] - s.k1);
    c2 += wk * s.l2 * (y[k] - s.k2) * (y[k] - s.k2);
  }
  for (Eigen::Index j = 0; j < N; ++j) {
    c1 += m1[j] * (u[j] - n1[j]) * (u[j] - n1[j]);
    c2 += m2[j] * (u[N + j] - n2[j]) * (u[N + j] - n2[j]);
  }
  c1 += cs.r1 * (y[0] - cs.h1) * (y[0] - cs.h1);
  c2 += cs.r2 * (y[0] - cs.h2) * (y[0] - cs.h2);
  out.J1 = 0.5 * c1;
  out.J2 = 0.5 * c2;
  return out;
}

double OracleComparison::max() const noexcept {
  return std::max({u1_gap, u2_gap, J1_rel, J2_rel});
}

OracleComparison compare_with_oracle(const ValidatedModel& model, const PathRealization& formula,
                                     const OracleResult& oracle) {
  OracleComparison out;
  for (std::size_t j = 0; j < oracle.u1.size(); ++j) {
    const double f1 = 0.5 * (formula.u1[j] + formula.u1[j + 1]);
    const double f2 = 0.5 * (formula.u2[j] + formula.u2[j + 1]);
    out.u1_gap = std::max(out.u1_gap, std::abs(f1 - oracle.u1[j]));
    out.u2_gap = std::max(out.u2_gap, std::abs(f2 - oracle.u2[j]));
  }
  const auto cost = path_cost(model, formula);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  out.J1_rel = oracle.J1 == 0.0 && cost.J1 == 0.0 ? 0.0 : rel(cost.J1, oracle.J1);
  out.J2_rel = oracle.J2 == 0.0 && cost.J2 == 0.0 ? 0.0 : rel(cost.J2, oracle.J2);
  return out;
}

InformationValue information_value(const ValidatedModel& model, std::uint64_t seed,
                                   std::size_t count, unsigned threads) {
  const auto mi = with_pattern(model, InformationPattern::SymmetricW2);
  const auto mii = with_pattern(model, InformationPattern::FullVsW2);
  const auto ri = solve_riccati(mi);
  const auto rii = solve_riccati(mii);
  const EquilibriumReconstructor reci(mi, ri), recii(mii, rii);

  std::vector<double> ji(count), jii(count), diff(count), gap(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto path = sample_path(mi.grid(), seed, i);
    const auto a = reci.realize(path);
    const auto b = recii.realize(path);
    ji[i] = path_cost(mi, a).J1;
    jii[i] = path_cost(mii, b).J1;
    diff[i] = jii[i] - ji[i];
    double g = 0.0;
    for (std::size_t k = 0; k < a.u2.size(); ++k) g = std::max(g, std::abs(a.u2[k] - b.u2[k]));
    gap[i] = g;
  });
  InformationValue out;
  const auto ei = estimate_mean(ji), eii = estimate_mean(jii), ed = estimate_mean(diff);
  out.J1_symmetric = ei.mean;
  out.SE_symmetric = ei.se;
  out.J1_full = eii.mean;
  out.SE_full = eii.se;
  out.difference = ed.mean;
  out.difference_se = ed.se;
  out.u2_gap = gap.empty() ? 0.0 : *std::max_element(gap.begin(), gap.end());
  return out;
}

void Report::add(std::string key, double value) { lines_.emplace_back(std::move(key), format_real(value)); }

void Report::add(std::string key, const std::string& value) {
  lines_.emplace_back(std::move(key), value);
}

void Report::write(std::ostream& out) const {
  for (const auto& [k, v] : lines_) out << k << '=' << v << '\n';
}

}  // namespace lqbsde
