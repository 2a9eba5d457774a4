// Command-line front end: riccati, simulate, verify.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lqbsde/csv.hpp"
#include "lqbsde/equilibrium.hpp"
#include "lqbsde/errors.hpp"
#include "lqbsde/girsanov.hpp"
#include "lqbsde/parallel.hpp"
#include "lqbsde/riccati.hpp"
#include "lqbsde/scenario.hpp"
#include "lqbsde/verification.hpp"

namespace {

using namespace lqbsde;

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kToleranceBreach = 1, kError = 2 };

struct Options {
  std::string command;
  std::string scenario;
  std::string pattern_override;
  std::uint64_t seed = 42;
  std::size_t paths = 10000;
  std::size_t steps = 1024;
  bool steps_given = false;
  std::string out = ".";
  std::string suite;
  unsigned threads = 0;
  std::size_t dump_paths = 10;
};

class Output {
 public:
  explicit Output(const Options& opt) : opt_(opt) { std::filesystem::create_directories(opt.out); }

  // Opens `name` in the output directory with the manifest header written.
  std::ofstream open(const std::string& name) const {
    const auto path = std::filesystem::path(opt_.out) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << "# tool=lqbsde " << kVersion << '\n'
      << "# command=" << opt_.command << (opt_.suite.empty() ? "" : " " + opt_.suite) << '\n'
      << "# scenario=" << opt_.scenario << '\n'
      << "# seed=" << opt_.seed << '\n'
      << "# paths=" << opt_.paths << '\n'
      << "# steps=" << opt_.steps << '\n'
      << "# out=" << opt_.out << '\n';
    return f;
  }

  void report(const Report& r) const {
    auto f = open("report.txt");
    r.write(f);
  }

 private:
  const Options& opt_;
};

ValidatedModel load_model(Options& opt) {
  Scenario sc = load_scenario(opt.scenario);
  if (!opt.pattern_override.empty()) {
    const auto p = parse_pattern(opt.pattern_override);
    if (!p) throw ParseError(0, "pattern-override", "unknown pattern '" + opt.pattern_override + "'");
    sc.pattern = *p;
  }
  if (opt.steps_given)
    sc.steps = opt.steps;
  else
    opt.steps = sc.steps;
  return validate(sc);
}

int cmd_riccati(Options& opt) {
  const auto model = load_model(opt);
  const auto ric = solve_riccati(model);
  const Output out(opt);
  {
    auto f = out.open("riccati.csv");
    write_riccati_csv(f, ric);
  }
  const auto [alpha_gap, beta_gap] = decomposition_gaps(ric);
  const auto res = coupled_residuals(model, ric);
  Report r;
  r.add("pattern", std::string(to_string(model.pattern())));
  r.add("alpha_T", ric.alpha.values().back());
  r.add("alpha1_T", ric.alpha1.values().back());
  r.add("alpha2_T", ric.alpha2.values().back());
  r.add("beta_T", ric.beta.values().back());
  r.add("decomposition_alpha", alpha_gap);
  r.add("decomposition_beta", beta_gap);
  r.add("residual_alpha1", res.alpha1);
  r.add("residual_beta1", res.beta1);
  r.add("residual_alpha2", res.alpha2);
  r.add("residual_beta2", res.beta2);
  r.add("ratio_gap", ratio_gap(ric));
  out.report(r);
  return kOk;
}

int cmd_simulate(Options& opt) {
  const auto model = load_model(opt);
  const auto ric = solve_riccati(model);
  const EquilibriumReconstructor rec(model, ric);
  const Output out(opt);

  const std::size_t dump = std::min(opt.dump_paths, opt.paths);
  std::vector<PathRealization> kept(dump);
  std::vector<double> j1(opt.paths), j2(opt.paths);
  for_each_realization(rec, opt.seed, opt.paths, opt.threads,
                       [&](std::size_t i, const BrownianPath&, const PathRealization& r) {
                         const auto c = path_cost(model, r);
                         j1[i] = c.J1;
                         j2[i] = c.J2;
                         if (i < dump) kept[i] = r;
                       });
  {
    auto f = out.open("realization.csv");
    write_realization_csv(f, model.grid(), kept);
  }
  const auto e1 = estimate_mean(j1), e2 = estimate_mean(j2);
  Report r;
  r.add("pattern", std::string(to_string(model.pattern())));
  r.add("J1", e1.mean);
  r.add("J1_SE", e1.se);
  r.add("J2", e2.mean);
  r.add("J2_SE", e2.se);
  r.add("y0", rec.states().mean[0]);
  out.report(r);
  return kOk;
}

std::vector<Direction> nash_directions() {
  return {{"const", [](double) { return 1.0; }},
          {"ramp", [](double t) { return t; }},
          {"cos", [](double t) { return std::cos(std::numbers::pi * t); }}};
}

bool suite_nash(const ValidatedModel& model, const Options& opt, Report& r) {
  const auto ric = solve_riccati(model);
  const EquilibriumReconstructor rec(model, ric);
  const auto cost = mc_cost(rec, opt.seed, opt.paths, opt.threads);
  r.add("J1", cost.J1);
  r.add("J1_SE", cost.SE1);
  r.add("J2", cost.J2);
  r.add("J2_SE", cost.SE2);
  const std::vector<double> eps = {-1.0, -0.5, 0.5, 1.0};
  bool pass = true;
  double worst = 0.0;
  for (int player : {1, 2}) {
    for (const auto& dir : nash_directions()) {
      const auto rep = perturbation_test(rec, player, dir, eps, opt.seed, opt.paths, opt.threads);
      const std::string tag = ".p" + std::to_string(player) + "." + dir.name;
      r.add("theta" + tag, rep.lambda);
      r.add("theta_SE" + tag, rep.lambda_se);
      r.add("theta_adjoint" + tag, rep.theta);
      r.add("theta_adjoint_SE" + tag, rep.theta_se);
      r.add("kappa" + tag, rep.kappa);
      r.add("fit_residual" + tag, rep.fit_residual);
      for (const auto& pt : rep.table) {
        std::ostringstream key;
        key << "dJ(" << pt.eps << ")" << tag;
        r.add(key.str(), pt.dJ);
        r.add(key.str() + "_SE", pt.se);
        pass = pass && pt.dJ >= -3 * pt.se;
      }
      pass = pass && std::abs(rep.lambda) <= 3 * rep.lambda_se && rep.kappa >= -rep.lambda_se &&
             rep.fit_residual <= 1e-10;
      if (rep.lambda_se > 0) worst = std::max(worst, std::abs(rep.lambda) / rep.lambda_se);
      else if (rep.lambda != 0) worst = INFINITY;
    }
  }
  r.add("theta_maxdev_over_SE", worst);
  return pass;
}

bool suite_filter(const ValidatedModel& model, const Options& opt, Report& r) {
  const auto ric = solve_riccati(model);
  const EquilibriumReconstructor rec(model, ric);
  std::vector<std::size_t> checkpoints;
  const std::size_t n = model.grid().steps();
  for (std::size_t j = 1; j <= 10; ++j) checkpoints.push_back(n * j / 10);
  const auto pts = filter_check(rec, opt.seed, 0, opt.paths, checkpoints, opt.threads);
  int inside = 0;
  double worst = 0.0;
  for (const auto& p : pts) {
    const double dev = std::abs(p.mean - p.predicted);
    const double ratio = p.se > 0 ? dev / p.se : (dev <= 1e-12 ? 0.0 : INFINITY);
    inside += ratio <= 3.0;
    worst = std::max(worst, ratio);
    const std::string tag = "(t=" + format_real(model.grid().time(p.node)) + ")";
    r.add("filter_mean" + tag, p.mean);
    r.add("filter_predicted" + tag, p.predicted);
    r.add("filter_SE" + tag, p.se);
  }
  r.add("filter_inside", static_cast<double>(inside));
  r.add("filter_maxdev_over_SE", worst);
  return inside >= 9;
}

bool suite_oracle(const ValidatedModel& model, const Options& opt, Report& r) {
  const auto ric = solve_riccati(model);
  const EquilibriumReconstructor rec(model, ric);
  const auto formula = rec.realize(sample_path(model.grid(), opt.seed, 0));
  const auto oracle = deterministic_oracle(model);
  const auto cmp = compare_with_oracle(model, formula, oracle);
  const auto cost = path_cost(model, formula);
  r.add("J1", cost.J1);
  r.add("J2", cost.J2);
  r.add("oracle_J1", oracle.J1);
  r.add("oracle_J2", oracle.J2);
  r.add("oracle_u1_gap", cmp.u1_gap);
  r.add("oracle_u2_gap", cmp.u2_gap);
  r.add("oracle_J1_rel", cmp.J1_rel);
  r.add("oracle_J2_rel", cmp.J2_rel);
  r.add("oracle_gap", cmp.max());
  return cmp.max() <= 1e-3;
}

bool suite_girsanov(const Options& opt, const Output& out, Report& r) {
  const auto s = builtin_girsanov_scenario();
  const TimeGrid grid(1.0, opt.steps);
  const auto mc = martingale_check(s, grid, opt.seed, opt.paths, opt.threads);
  {
    auto f = out.open("girsanov.csv");
    write_girsanov_csv(f, s, grid, opt.seed, std::min(opt.dump_paths, opt.paths));
  }
  // Round trip through the transformed integrands for the scenario's sigma
  // and a non-orthogonal one.
  double roundtrip = 0.0;
  for (const Mat2& sigma : {s.sigma, Mat2{1.3, -0.4, 0.9, 2.1}}) {
    const auto sc = make_girsanov_scenario(s.h, s.hbar1, s.hbar2, sigma, false);
    const auto tr = transform_observation(sc);
    for (double z1 : {-2.0, -0.3, 0.0, 1.7}) {
      for (double z2 : {-1.1, 0.4, 2.5}) {
        const auto Z = tr.to_transformed(z1, z2);
        const auto back = tr.to_original(Z[0], Z[1]);
        roundtrip = std::max({roundtrip, std::abs(back[0] - z1), std::abs(back[1] - z2)});
      }
    }
  }
  r.add("rho1_mean", mc.rho1_mean);
  r.add("rho1_SE", mc.rho1_se);
  r.add("rho2_mean", mc.rho2_mean);
  r.add("rho2_SE", mc.rho2_se);
  r.add("reciprocal_error", mc.reciprocal_error);
  r.add("roundtrip_error", roundtrip);
  r.add("orthogonal", std::string(is_orthogonal(s.sigma) ? "yes" : "no"));
  return std::abs(mc.rho1_mean - 1) <= 3 * mc.rho1_se &&
         std::abs(mc.rho2_mean - 1) <= 3 * mc.rho2_se && mc.reciprocal_error <= 1e-12 &&
         roundtrip <= 1e-12;
}

bool suite_info_value(const ValidatedModel& model, const Options& opt, Report& r) {
  const auto iv = information_value(model, opt.seed, opt.paths, opt.threads);
  r.add("J1_symmetric", iv.J1_symmetric);
  r.add("J1_symmetric_SE", iv.SE_symmetric);
  r.add("J1_full", iv.J1_full);
  r.add("J1_full_SE", iv.SE_full);
  r.add("J1_difference", iv.difference);
  r.add("J1_difference_SE", iv.difference_se);
  r.add("u2_gap", iv.u2_gap);
  return iv.difference <= 3 * iv.difference_se && iv.u2_gap <= 1e-12;
}

int cmd_verify(Options& opt) {
  Report r;
  bool pass = false;
  if (opt.suite == "girsanov") {
    if (!opt.steps_given) opt.steps = 64;
    const Output out(opt);
    r.add("suite", opt.suite);
    pass = suite_girsanov(opt, out, r);
    r.add("status", std::string(pass ? "pass" : "fail"));
    out.report(r);
    return pass ? kOk : kToleranceBreach;
  }
  const auto model = load_model(opt);
  const Output out(opt);
  r.add("suite", opt.suite);
  r.add("pattern", std::string(to_string(model.pattern())));
  if (opt.suite == "nash") pass = suite_nash(model, opt, r);
  else if (opt.suite == "filter") pass = suite_filter(model, opt, r);
  else if (opt.suite == "oracle") pass = suite_oracle(model, opt, r);
  else if (opt.suite == "info-value") pass = suite_info_value(model, opt, r);
  r.add("status", std::string(pass ? "pass" : "fail"));
  out.report(r);
  return pass ? kOk : kToleranceBreach;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-quadratic BSDE games under partial information"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub, bool needs_scenario) {
    auto* sc = sub->add_option("--scenario", opt.scenario, "scenario file");
    if (needs_scenario) sc->required()->check(CLI::ExistingFile);
    sub->add_option("--pattern-override", opt.pattern_override,
                    "symmetric_w2 | full_vs_w2 | w1_vs_w2 (or i, ii, iii)");
    sub->add_option("--steps", opt.steps, "time steps (default: scenario, else 1024)")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 26));
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads, 0 = all")->capture_default_str();
  };
  auto mc = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "random seed")->capture_default_str();
    sub->add_option("--paths", opt.paths, "Monte Carlo paths")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--dump-paths", opt.dump_paths, "paths written to CSV")->capture_default_str();
  };

  auto* riccati = app.add_subcommand("riccati", "solve the gain equations");
  common(riccati, true);
  auto* simulate = app.add_subcommand("simulate", "simulate the equilibrium");
  common(simulate, true);
  mc(simulate);
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  common(verify, false);
  mc(verify);
  verify->add_option("--suite", opt.suite, "verification suite")
      ->required()
      ->check(CLI::IsMember({"nash", "filter", "oracle", "girsanov", "info-value"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }
  for (auto* sub : {riccati, simulate, verify}) {
    if (sub->parsed()) opt.command = sub->get_name();
    if (sub->parsed()) opt.steps_given = sub->count("--steps") > 0;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    int code = kOk;
    if (opt.command == "riccati") code = cmd_riccati(opt);
    if (opt.command == "simulate") code = cmd_simulate(opt);
    if (opt.command == "verify") {
      if (opt.suite != "girsanov" && opt.scenario.empty())
        throw ParseError(0, "scenario", "--scenario is required for this suite");
      code = cmd_verify(opt);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << opt.command << " finished in " << elapsed.count() << " s"
              << (code == kToleranceBreach ? " (tolerance breach)" : "") << '\n';
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
}
