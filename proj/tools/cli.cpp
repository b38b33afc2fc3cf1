#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracmix/decay.hpp"
#include "fracmix/directint.hpp"
#include "fracmix/fracsolve.hpp"
#include "fracmix/mixsched.hpp"
#include "fracmix/rootsys.hpp"
#include "fracmix/selftest.hpp"
#include "fracmix/sl2model.hpp"

namespace fracmix::cli {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Output {
  std::string dir = ".";

  std::string path(const std::string& name) const { return dir + "/" + name; }

  void write_json(const std::string& name, const json& j) const {
    std::ofstream out(path(name));
    if (!out) throw ConfigError("cannot write " + path(name));
    out << j.dump(2) << "\n";
    std::cout << "wrote " << path(name) << "\n";
  }

  void write_csv(const std::string& name, const std::string& header,
                 const std::vector<std::vector<double>>& rows) const {
    std::ofstream out(path(name));
    if (!out) throw ConfigError("cannot write " + path(name));
    out << header << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
      out << "\n";
    }
    std::cout << "wrote " << path(name) << "\n";
  }
};

struct GridOpts {
  double lambda_min = 1e-6;
  double lambda_max = 1e3;
  double ratio = 1.05;

  sl2::GridConfig config() const {
    sl2::GridConfig cfg;
    cfg.lambda_min = lambda_min;
    cfg.lambda_max = lambda_max;
    cfg.ratio = ratio;
    return cfg;
  }
};

void add_grid_opts(CLI::App* app, GridOpts& g) {
  app->add_option("--lambda-min", g.lambda_min, "inner spectral cutoff")
      ->check(CLI::PositiveNumber);
  app->add_option("--lambda-max", g.lambda_max, "outer spectral cutoff")
      ->check(CLI::PositiveNumber);
  app->add_option("--ratio", g.ratio, "geometric node ratio");
}

sl2::IrrepParams irrep_from(const std::string& series, double mu, int n) {
  auto s = sl2::series_from_string(series);
  return sl2::make_irrep(s, s == sl2::Series::Discrete ? static_cast<double>(n) : mu);
}

sl2::ModelVector standard_profile(const sl2::IrrepParams& irrep, const sl2::GridPtr& grid,
                                  const std::string& kind) {
  if (kind == "edge")
    return irrep.half_line() ? sl2::discrete_profile(grid, std::max(irrep.n, 2))
                             : sl2::edge_gaussian(grid);
  if (kind == "away") return sl2::bump_away(grid, 0.25, 4.0);
  if (kind == "gaussian") return sl2::gaussian_profile(grid, 2.0, 1.0);
  throw ConfigError("unknown profile kind: " + kind);
}

// ------------------------------------------------------------------ roots --

int cmd_roots(const std::string& family, int rank, double eps, double gamma,
              const Output& out) {
  auto rs = rootsys::build_root_system(rootsys::family_from_string(family), rank);
  auto sos = rootsys::find_maximal_sos(rs);
  rootsys::SpectralGapProfile gaps;
  gaps.gamma.assign(sos.members.size(), gamma);
  gaps.field.assign(sos.members.size(), rootsys::FieldLabel::Real);
  auto exps = rootsys::regularity_exponents(sos, gaps, eps);

  json j;
  j["root_system"] = rootsys::to_json(rs);
  j["maximal_sos"] = rootsys::to_json(sos);
  j["epsilon"] = eps;
  j["gamma"] = gamma;
  j["zeta_eps"] = exps.zeta;
  j["p_eps"] = exps.p;
  out.write_json("roots.json", j);

  // eta along the dominant ray a = exp(t * rho-direction)
  std::vector<std::vector<double>> rows;
  rootsys::CartanElement dir;
  dir.log_coords.assign(rs.dim(), 0.0);
  for (const auto& s : rs.simple_roots)
    for (size_t c = 0; c < s.size(); ++c) dir.log_coords[c] += s[c];
  for (double t = 0.0; t <= 3.0; t += 0.25) {
    rootsys::CartanElement a = dir;
    for (auto& x : a.log_coords) x *= t;
    rows.push_back({t, rootsys::eta_epsilon(sos, a, gaps, eps, rs)});
  }
  out.write_csv("roots_eta.csv", "t,eta", rows);
  std::cout << "maximal SOS size " << sos.members.size() << ", zeta = " << exps.zeta
            << ", p = " << exps.p << "\n";
  return 0;
}

// ------------------------------------------------------------------ irrep --

int cmd_irrep(const std::string& series, double mu, int n, const GridOpts& gopts,
              const Output& out) {
  auto irrep = irrep_from(series, mu, n);
  auto grid = sl2::make_grid(irrep, gopts.config());
  auto f = standard_profile(irrep, grid, "edge");
  json j;
  j["irrep"] = sl2::to_json(irrep);
  j["grid"] = sl2::to_json(gopts.config());
  j["nodes"] = grid->size();
  j["standard_profile_norm"] = sl2::weighted_norm(f, irrep);
  j["optimal_rate"] = irrep.optimal_rate();
  out.write_json("irrep.json", j);
  std::cout << "series " << sl2::to_string(irrep.series) << ", mu = " << irrep.mu
            << ", Re varpi = " << irrep.re_varpi() << ", nu0 = " << irrep.nu0 << "\n";
  return 0;
}

// ------------------------------------------------------------------ decay --

int cmd_decay(const std::string& series, double mu, int n, const std::string& flow_name,
              double t_min, double t_max, int points, const GridOpts& gopts,
              const Output& out) {
  auto irrep = irrep_from(series, mu, n);
  auto grid = sl2::make_grid(irrep, gopts.config());
  auto f = standard_profile(irrep, grid, "edge");
  const auto flow = flow_name == "horocycle" ? sl2::Flow::Horocycle : sl2::Flow::Geodesic;

  std::vector<double> times;
  if (flow == sl2::Flow::Geodesic) {
    for (int i = 0; i < points; ++i)
      times.push_back(t_min + (t_max - t_min) * i / (points - 1));
  } else {
    const double lo = std::max(t_min, 1e-3);
    for (int i = 0; i < points; ++i)
      times.push_back(lo * std::pow(t_max / lo, static_cast<double>(i) / (points - 1)));
  }
  auto curve = decay::coeff_curve(f, f, flow, times, irrep);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < curve.times.size(); ++i)
    rows.push_back({curve.times[i], curve.magnitudes[i]});
  out.write_csv("decay_curve.csv", "time,magnitude", rows);

  const auto model = flow == sl2::Flow::Geodesic ? decay::RateModel::ExponentialInS
                                                 : decay::RateModel::PolynomialInT;
  auto fit = decay::fit_rate(curve, model, decay::default_window(flow));
  json j;
  j["flow"] = flow_name;
  j["exponent"] = fit.exponent;
  j["residual"] = fit.residual;
  j["points_used"] = fit.points_used;
  j["window"] = {{"t_min", fit.window.t_min}, {"t_max", fit.window.t_max}};
  // geodesic curves decay like e^{-2sr}; horocycle curves like (1+t)^{-2r}
  const double expected = (flow == sl2::Flow::Horocycle ? 2.0 : 1.0) * irrep.optimal_rate();
  j["expected_exponent"] = expected;
  out.write_json("decay_fit.json", j);
  std::cout << "fitted exponent " << fit.exponent << " (expected " << expected << ")\n";
  return 0;
}

// ------------------------------------------------------------------ solve --

int cmd_solve(const std::string& series, double mu, int n, const std::string& profile,
              double r, bool classical, std::vector<double> scan,
              const GridOpts& gopts, const Output& out) {
  auto irrep = irrep_from(series, mu, n);
  auto grid = sl2::make_grid(irrep, gopts.config());
  auto xi = standard_profile(irrep, grid, profile);

  if (!scan.empty()) {
    if (scan.size() != 3) throw ConfigError("--scan needs r_min r_max step");
    std::vector<double> r_grid;
    for (double rr = scan[0]; rr <= scan[1] + 1e-12; rr += scan[2]) r_grid.push_back(rr);
    auto result = fracsolve::threshold_scan(xi, irrep, r_grid);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < result.r_values.size(); ++i)
      rows.push_back({result.r_values[i],
                      result.verdicts[i] == fracsolve::Verdict::Solvable ? 1.0 : 0.0,
                      result.growth_exponents[i]});
    out.write_csv("threshold_scan.csv", "r,solvable,shell_growth_exponent", rows);
    json j;
    j["gamma_hat"] = result.gamma_hat;
    j["resolution"] = result.resolution;
    j["largest_solvable"] = result.largest_solvable;
    j["smallest_divergent"] = result.smallest_divergent;
    j["unbounded_in_range"] = result.unbounded_in_range;
    j["monotone"] = result.monotone;
    out.write_json("threshold_scan.json", j);
    if (result.unbounded_in_range)
      std::cout << "no divergence found: unbounded in range\n";
    else
      std::cout << "gamma_hat = " << result.gamma_hat << " +- " << result.resolution << "\n";
    return 0;
  }

  auto rep = classical ? fracsolve::classical_solve(xi, irrep)
                       : fracsolve::frac_solve(xi, r, irrep);
  json j;
  j["mode"] = classical ? "classical" : "fractional";
  if (!classical) j["r"] = r;
  j["verdict"] = fracsolve::to_string(rep.verdict);
  j["solution_norm"] = rep.solution_norm;
  j["shell_growth_exponent"] = rep.diagnostics.growth_exponent;
  j["support_clear_of_zero"] = rep.diagnostics.support_clear_of_zero;
  out.write_json("solve.json", j);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < rep.diagnostics.lambda_cut.size(); ++i)
    rows.push_back({rep.diagnostics.lambda_cut[i], rep.diagnostics.partial_norm[i]});
  out.write_csv("solve_partial_norms.csv", "lambda_cut,partial_norm", rows);
  std::cout << "verdict: " << fracsolve::to_string(rep.verdict) << "\n";
  return 0;
}

// -------------------------------------------------------------- tauberian --

int cmd_tauberian(const std::vector<double>& rprimes, const Output& out) {
  auto gaussian = [](double x) { return std::exp(-x * x); };
  json all = json::array();
  for (double rp : rprimes) {
    auto rep = fracsolve::tauberian_check(gaussian, rp);
    json j;
    j["r_prime"] = rp;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["relative_error"] = rep.relative_error;
    j["tail_cut"] = rep.tail_cut;
    all.push_back(j);
    std::cout << "r' = " << rp << ": relative error " << rep.relative_error << "\n";
  }
  out.write_json("tauberian.json", all);
  return 0;
}

// ----------------------------------------------------------------- typeii --

int cmd_typeii(const std::string& mode, double varpi1, double varpi2, double r1,
               double r2, double eps, const GridOpts& gopts, const Output& out) {
  auto make_model = [&](double varpi) {
    directint::DirectIntegralModel m;
    m.components.push_back(
        {sl2::make_irrep(sl2::Series::Complementary, 1.0 - varpi * varpi), 1.0});
    return m;
  };
  auto model = directint::make_tensor_model({make_model(varpi1), make_model(varpi2)},
                                            eps, gopts.config());
  auto f1 = sl2::edge_gaussian(model.factors[0].grid);
  auto f2 = sl2::edge_gaussian(model.factors[1].grid);
  auto xi = directint::tensor_product({f1, f2});
  out.write_json("typeii_model.json", directint::to_json(model));

  if (mode == "sharpness") {
    auto rep = directint::sharpness_witness(model, 0, r1, directint::TypeIIProblem{{0.0, r2}});
    json j;
    j["all_divergent"] = rep.all_divergent;
    j["chosen_c"] = rep.chosen_c;
    j["branch_exponents"] = rep.branch_exponents;
    out.write_json("typeii_sharpness.json", j);
    std::cout << (rep.all_divergent ? "all branches divergent\n" : "NOT divergent\n");
    return 0;
  }

  auto sol = directint::typeII_solve(xi, directint::TypeIIProblem{{r1, r2}}, model);
  std::vector<std::vector<double>> rows;
  for (size_t b = 0; b < sol.branches.size(); ++b)
    for (size_t p = 0; p < sol.branches[b].pieces.size(); ++p)
      rows.push_back({static_cast<double>(b), static_cast<double>(p),
                      sol.branches[b].pieces[p].norm});
  out.write_csv("typeii_branches.csv", "branch,piece,norm", rows);

  json j;
  j["reconstruction_error"] = sol.reconstruction_error;
  j["omega_norm"] = sol.branches[0].omega_norm;
  if (mode == "estimate") {
    auto check = directint::typeII_estimate_check(sol, xi, model);
    j["sigma_budget"] = check.sigma_budget;
    j["max_ratio"] = check.max_ratio;
  }
  out.write_json("typeii_solve.json", j);
  std::cout << "reconstruction error " << sol.reconstruction_error << "\n";
  return 0;
}

// ---------------------------------------------------------------- mixbound --

int cmd_mixbound(const std::string& family, int rank, int n, int m, unsigned seed,
                 double eps, double gamma, int sweep,
                 const std::vector<double>& quad, const Output& out) {
  auto rs = rootsys::build_root_system(rootsys::family_from_string(family), rank);
  auto sos = rootsys::find_maximal_sos(rs);
  rootsys::SpectralGapProfile gaps;
  gaps.gamma.assign(sos.members.size(), gamma);
  gaps.field.assign(sos.members.size(), rootsys::FieldLabel::Real);

  std::mt19937 rng(seed);
  auto cfg = selftest::random_config(rng, n, m, rs.dim());
  auto planned = mixsched::plan_partition(cfg, sos, gaps, eps, rs);
  json j;
  j["plan"] = mixsched::to_json(planned.plan);
  j["verification"] = mixsched::to_json(planned.verification);
  j["permutation"] = planned.permutation;
  j["root_index"] = planned.choice.index;
  if (n == 3) {
    auto tb = mixsched::triple_bound(cfg, sos, gaps, eps, rs);
    j["triple_bound"] = {{"value", tb.value},
                         {"pair", {tb.pair_i, tb.pair_j}},
                         {"regime", tb.regime},
                         {"j_case", tb.j_case}};
  }
  out.write_json("mixbound_plan.json", j);

  if (!quad.empty()) {
    if (quad.size() != 5)
      throw ConfigError("--quad needs |c| intf1sq C eta_rate norm_product");
    auto rep = mixsched::quad_obstruction_report(quad[0], quad[1], quad[2], quad[3], quad[4]);
    json q;
    q["contradiction"] = rep.contradiction;
    q["in_range"] = rep.in_range;
    q["m_star"] = rep.m_star;
    q["lower_bound_at_m_star"] = rep.lower_bound_at_m_star;
    q["note"] = rep.note;
    out.write_json("quad_obstruction.json", q);
  }

  std::vector<std::vector<double>> rows;
  for (int trial = 0; trial < sweep; ++trial) {
    auto c = selftest::random_config(rng, n, m, rs.dim());
    try {
      auto bound = mixsched::higher_order_bound(n, c, sos, gaps, eps, 1.0, rs);
      rows.push_back({static_cast<double>(trial), bound.kernel, bound.penalty_factor,
                      bound.bound});
    } catch (const DomainError&) {
      // degenerate draw, skip
    }
  }
  out.write_csv("mixbound_sweep.csv", "trial,kernel,penalty,bound", rows);
  std::cout << (planned.verification.ok ? "partition verified\n"
                                        : "partition verification FAILED\n");
  return planned.verification.ok ? 0 : 2;
}

// ---------------------------------------------------------------- selftest --

int cmd_selftest(unsigned seed, const Output& out) {
  auto results = selftest::run_all(seed);
  json j = json::array();
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.checks
              << " checks)";
    if (!r.passed) std::cout << " - " << r.detail;
    std::cout << "\n";
    ok = ok && r.passed;
    j.push_back({{"name", r.name}, {"passed", r.passed}, {"checks", r.checks}});
  }
  out.write_json("selftest.json", j);
  return ok ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& argv) {
  CLI::App app{"fracmix: fractional cohomological solvers and mixing-rate calculus"};
  app.require_subcommand(1);

  Output out;
  if (const char* env = std::getenv("FRACMIX_OUT")) out.dir = env;
  app.add_option("--out", out.dir, "output directory (default $FRACMIX_OUT or .)");

  // roots
  std::string family = "A";
  int rank = 2;
  double eps = 0.1, gamma = 0.4;
  auto* roots = app.add_subcommand("roots", "maximal SOS and exponent tables; writes roots.json and roots_eta.csv (t,eta)");
  roots->add_option("--family", family, "A, B, C, D or G2");
  roots->add_option("--rank", rank)->check(CLI::PositiveNumber);
  roots->add_option("--epsilon", eps)->check(CLI::PositiveNumber);
  roots->add_option("--gamma", gamma, "spectral gap per root")->check(CLI::PositiveNumber);

  // shared representation options
  std::string series = "complementary";
  double mu = 0.75;
  int disc_n = 2;
  GridOpts gopts;

  auto* irrep = app.add_subcommand("irrep", "model info and norms; writes irrep.json");
  irrep->add_option("--series", series, "principal|complementary|discrete|mock");
  irrep->add_option("--mu", mu, "Casimir value");
  irrep->add_option("--n", disc_n, "discrete-series index");
  add_grid_opts(irrep, gopts);

  std::string flow = "geodesic";
  double t_min = 0.0, t_max = 6.5;
  int points = 27;
  auto* dec = app.add_subcommand(
      "decay", "coefficient curves and rate fits; writes decay_curve.csv (time,magnitude) and decay_fit.json");
  dec->add_option("--series", series);
  dec->add_option("--mu", mu);
  dec->add_option("--n", disc_n);
  dec->add_option("--flow", flow, "geodesic|horocycle");
  dec->add_option("--tmin", t_min);
  dec->add_option("--tmax", t_max);
  dec->add_option("--points", points)->check(CLI::Range(2, 100000));
  add_grid_opts(dec, gopts);

  std::string profile = "edge";
  double r = 0.2;
  bool classical = false;
  std::vector<double> scan;
  auto* solve = app.add_subcommand(
      "solve",
      "classical/fractional solves and threshold scans; writes solve.json, "
      "solve_partial_norms.csv (lambda_cut,partial_norm) or threshold_scan.csv "
      "(r,solvable,shell_growth_exponent)");
  solve->add_option("--series", series);
  solve->add_option("--mu", mu);
  solve->add_option("--n", disc_n);
  solve->add_option("--profile", profile, "edge|away|gaussian");
  solve->add_option("--r", r, "fractional exponent");
  solve->add_flag("--classical", classical, "solve U omega = xi instead");
  solve->add_option("--scan", scan, "r_min r_max step")->expected(3);
  add_grid_opts(solve, gopts);

  std::vector<double> rprimes = {0.1, 0.2, 0.3, 0.4};
  auto* taub = app.add_subcommand(
      "tauberian", "kernel identity check; writes tauberian.json (lhs, rhs, error)");
  taub->add_option("--rprime", rprimes, "exponents in (0, 1/2)");

  std::string mode = "solve";
  double varpi1 = 0.5, varpi2 = 0.5, r1 = 0.2, r2 = 0.2;
  auto* typeii = app.add_subcommand(
      "typeii",
      "two-factor solver; writes typeii_model.json, typeii_branches.csv "
      "(branch,piece,norm) and typeii_solve.json or typeii_sharpness.json");
  typeii->add_option("--mode", mode, "solve|estimate|sharpness");
  typeii->add_option("--varpi1", varpi1);
  typeii->add_option("--varpi2", varpi2);
  typeii->add_option("--r1", r1);
  typeii->add_option("--r2", r2);
  typeii->add_option("--epsilon", eps);
  add_grid_opts(typeii, gopts);

  int n_points = 4, m_rank = 2, sweep = 20;
  unsigned seed = 20240817u;
  auto* mixb = app.add_subcommand(
      "mixbound",
      "partition plans and bound tables; writes mixbound_plan.json and "
      "mixbound_sweep.csv (trial,kernel,penalty,bound)");
  mixb->add_option("--family", family);
  mixb->add_option("--rank", rank);
  mixb->add_option("--n", n_points)->check(CLI::Range(2, 16));
  mixb->add_option("--m", m_rank)->check(CLI::Range(1, 8));
  mixb->add_option("--seed", seed);
  mixb->add_option("--epsilon", eps);
  mixb->add_option("--gamma", gamma);
  mixb->add_option("--sweep", sweep, "random configurations in the bound table");
  std::vector<double> quad;
  mixb->add_option("--quad", quad,
                   "|c| intf1sq C eta_rate norms: Case-IV obstruction report")
      ->expected(5);

  auto* self = app.add_subcommand("selftest", "invariant property suites; writes selftest.json");
  self->add_option("--seed", seed);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<const char*> cargs;
  cargs.push_back("fracmix");
  for (const auto& a : argv) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (roots->parsed()) return cmd_roots(family, rank, eps, gamma, out);
    if (irrep->parsed()) return cmd_irrep(series, mu, disc_n, gopts, out);
    if (dec->parsed())
      return cmd_decay(series, mu, disc_n, flow, t_min, t_max, points, gopts, out);
    if (solve->parsed())
      return cmd_solve(series, mu, disc_n, profile, r, classical, scan, gopts, out);
    if (taub->parsed()) return cmd_tauberian(rprimes, out);
    if (typeii->parsed())
      return cmd_typeii(mode, varpi1, varpi2, r1, r2, eps, gopts, out);
    if (mixb->parsed())
      return cmd_mixbound(family, rank, n_points, m_rank, seed, eps, gamma, sweep, quad, out);
    if (self->parsed()) return cmd_selftest(seed, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical budget failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace fracmix::cli
