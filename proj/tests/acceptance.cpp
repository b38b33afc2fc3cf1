// Acceptance suite: one pass/fail line per criterion, pinned tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "fracmix/decay.hpp"
#include "fracmix/directint.hpp"
#include "fracmix/fracsolve.hpp"
#include "fracmix/mixsched.hpp"
#include "fracmix/rootsys.hpp"
#include "fracmix/selftest.hpp"
#include "fracmix/sl2model.hpp"

using namespace fracmix;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

char buf[256];

// --- criterion 1: complementary geodesic decay rates ---
void criterion1() {
  bool ok = true;
  std::string detail;
  for (double varpi : {0.4, 0.5, 0.6}) {
    const auto t0 = Clock::now();
    auto irrep = sl2::make_irrep(sl2::Series::Complementary, 1.0 - varpi * varpi);
    auto grid = sl2::make_grid(irrep);
    auto f = sl2::edge_gaussian(grid);
    auto curve = decay::coeff_curve(f, f, sl2::Flow::Geodesic, linspace(0.0, 6.5, 27), irrep);
    auto fit = decay::fit_rate(curve, decay::RateModel::ExponentialInS,
                               decay::default_window(sl2::Flow::Geodesic));
    const double target = 0.5 * (1.0 - varpi);
    const double rel = std::abs(fit.exponent - target) / target;
    const double secs = seconds_since(t0);
    if (rel >= 0.05 || secs >= 10.0) ok = false;
    std::snprintf(buf, sizeof buf, " varpi=%.1f fit=%.4f target=%.2f (%.1f%%, %.2fs)",
                  varpi, fit.exponent, target, 100.0 * rel, secs);
    detail += buf;
  }
  report(1, ok, "complementary geodesic exponent within 5% of (1-varpi)/2:" + detail);
}

// --- criterion 2: discrete-series better-than-tempered decay ---
void criterion2() {
  const auto t0 = Clock::now();
  auto irrep = sl2::make_irrep(sl2::Series::Discrete, 2);
  sl2::GridConfig cfg;
  cfg.lambda_min = 1e-8;  // the profile is pulled toward 0 by e^{-2s} at s = 6
  auto grid = sl2::make_grid(irrep, cfg);
  auto f = sl2::discrete_profile(grid, 2);
  auto curve = decay::coeff_curve(f, f, sl2::Flow::Geodesic, linspace(0.0, 6.5, 27), irrep);
  auto fit = decay::fit_rate(curve, decay::RateModel::ExponentialInS,
                             decay::default_window(sl2::Flow::Geodesic));
  const double secs = seconds_since(t0);
  const bool ok = std::abs(fit.exponent - 1.0) < 0.10 && secs < 10.0;
  std::snprintf(buf, sizeof buf,
                "discrete n=2 geodesic exponent within 10%% of n/2 = 1: fit=%.4f (%.2fs)",
                fit.exponent, secs);
  report(2, ok, buf);
}

// --- criterion 3: horocycle polynomial decay ---
void criterion3() {
  auto irrep = sl2::make_irrep(sl2::Series::Complementary, 0.75);  // varpi = 0.5
  auto grid = sl2::make_grid(irrep);
  auto f = sl2::edge_gaussian(grid);
  std::vector<double> times;
  for (double t = 2.0; t <= 220.0; t *= 1.12) times.push_back(t);
  auto curve = decay::coeff_curve(f, f, sl2::Flow::Horocycle, times, irrep);
  auto fit = decay::fit_rate(curve, decay::RateModel::PolynomialInT,
                             decay::default_window(sl2::Flow::Horocycle));
  const double rel = std::abs(fit.exponent - 0.5) / 0.5;
  std::snprintf(buf, sizeof buf,
                "horocycle log-log exponent within 10%% of 2*gamma = 0.5: fit=%.4f (%.1f%%)",
                fit.exponent, 100.0 * rel);
  report(3, rel < 0.10, buf);
}

// --- criterion 4: fractional threshold sharpness ---
void criterion4() {
  bool ok = true;
  std::string detail;
  for (double varpi : {0.4, 0.6}) {
    auto irrep = sl2::make_irrep(sl2::Series::Complementary, 1.0 - varpi * varpi);
    auto grid = sl2::make_grid(irrep);
    auto xi = sl2::edge_gaussian(grid);
    const double gamma = 0.5 * (1.0 - varpi);
    std::vector<double> r_grid;
    for (double r = gamma - 0.08; r <= gamma + 0.08 + 1e-12; r += 0.01) r_grid.push_back(r);
    auto scan = fracsolve::threshold_scan(xi, irrep, r_grid);
    const bool bracket = scan.largest_solvable < gamma + 1e-9 &&
                         scan.smallest_divergent > gamma - 1e-9 &&
                         std::abs(scan.gamma_hat - gamma) <= 0.02 && scan.resolution <= 0.02;
    if (!bracket || !scan.monotone) ok = false;
    std::snprintf(buf, sizeof buf, " varpi=%.1f gamma_hat=%.3f+-%.3f monotone=%d",
                  varpi, scan.gamma_hat, scan.resolution, scan.monotone ? 1 : 0);
    detail += buf;
  }
  report(4, ok, "threshold scan brackets (1-varpi)/2 at resolution <= 0.02:" + detail);
}

// --- criterion 5: Tauberian identity ---
void criterion5() {
  bool ok = true;
  std::string detail;
  auto gaussian = [](double x) { return std::exp(-x * x); };
  for (double rp : {0.1, 0.2, 0.3, 0.4}) {
    auto rep = fracsolve::tauberian_check(gaussian, rp);
    if (rep.relative_error >= 1e-4) ok = false;
    std::snprintf(buf, sizeof buf, " r'=%.1f err=%.1e", rp, rep.relative_error);
    detail += buf;
  }
  report(5, ok, "Tauberian kernel identity below 1e-4 relative:" + detail);
}

// --- criterion 6: conjugation scaling ---
void criterion6() {
  auto irrep = sl2::make_irrep(sl2::Series::Complementary, 0.75);
  sl2::GridConfig dense;
  dense.ratio = 1.01;  // refined grid per the stated "after refinement"
  auto grid = sl2::make_grid(irrep, dense);
  auto f = sl2::edge_gaussian(grid);
  bool ok = true;
  double worst = 0.0;
  for (double r : {0.3, 0.7})
    for (double s : {0.5, 1.0, 2.0}) {
      const double dev = fracsolve::conjugation_scaling_check(f, s, r, irrep);
      worst = std::max(worst, dev);
      if (dev >= 1e-6) ok = false;
    }
  std::snprintf(buf, sizeof buf,
                "conjugation |U|^r pi(a_s) = e^{-2rs} pi(a_s) |U|^r below 1e-6: max dev=%.2e",
                worst);
  report(6, ok, buf);
}

// --- criterion 7: type II two-factor solver ---
void criterion7() {
  auto make_model = [](const sl2::GridConfig& cfg) {
    directint::DirectIntegralModel m;
    m.components.push_back({sl2::make_irrep(sl2::Series::Complementary, 0.75), 1.0});
    return directint::make_tensor_model({m, m}, 0.1, cfg);
  };
  sl2::GridConfig coarse;
  coarse.lambda_max = 50.0;
  coarse.ratio = 1.06;
  auto model = make_model(coarse);
  auto xi = directint::tensor_product({sl2::edge_gaussian(model.factors[0].grid),
                                       sl2::edge_gaussian(model.factors[1].grid)});
  auto sol = directint::typeII_solve(xi, directint::TypeIIProblem{{0.2, 0.2}}, model);
  auto check = directint::typeII_estimate_check(sol, xi, model);

  sl2::GridConfig fine = coarse;
  fine.lambda_min *= 0.5;
  fine.ratio = std::sqrt(fine.ratio);
  auto fmodel = make_model(fine);
  auto fxi = directint::tensor_product({sl2::edge_gaussian(fmodel.factors[0].grid),
                                        sl2::edge_gaussian(fmodel.factors[1].grid)});
  auto fsol = directint::typeII_solve(fxi, directint::TypeIIProblem{{0.2, 0.2}}, fmodel);
  auto fcheck = directint::typeII_estimate_check(fsol, fxi, fmodel);
  const double drift = std::abs(fcheck.max_ratio - check.max_ratio) / check.max_ratio;

  auto witness = directint::sharpness_witness(model, 0, 0.3, directint::TypeIIProblem{{0.0, 0.2}});

  const bool ok = sol.reconstruction_error < 1e-10 && std::isfinite(sol.branches[0].omega_norm) &&
                  drift < 0.20 && witness.all_divergent;
  std::snprintf(buf, sizeof buf,
                "type II r=0.2: reconstruction=%.1e ratio drift=%.1f%% sharpness(r=0.3) "
                "divergent=%d",
                sol.reconstruction_error, 100.0 * drift, witness.all_divergent ? 1 : 0);
  report(7, ok, buf);
}

// --- criterion 8: order-2 bound shape ---
void criterion8() {
  auto run_once = [](const sl2::GridConfig& cfg, int nfac) {
    std::vector<directint::DirectIntegralModel> models;
    for (int i = 0; i < nfac; ++i) {
      directint::DirectIntegralModel m;
      m.components.push_back({sl2::make_irrep(sl2::Series::Complementary, 0.75), 1.0});
      models.push_back(m);
    }
    auto model = directint::make_tensor_model(models, 0.1, cfg);
    std::vector<sl2::ModelVector> psi, xi;
    for (int i = 0; i < nfac; ++i) {
      psi.push_back(sl2::edge_gaussian(model.factors[i].grid));
      xi.push_back(sl2::edge_gaussian(model.factors[i].grid));
    }
    std::vector<std::vector<double>> a_grid;
    if (nfac == 1)
      for (double s = 0.0; s <= 6.0; s += 0.5) a_grid.push_back({s});
    else
      for (double s1 = 0.0; s1 <= 4.0; s1 += 1.0)
        for (double s2 = 0.0; s2 <= 4.0; s2 += 1.0) a_grid.push_back({s1, s2});
    return decay::order2_bound_check(psi, xi, model, 0.1, a_grid).max_ratio;
  };
  sl2::GridConfig coarse;
  coarse.lambda_max = 50.0;
  coarse.ratio = 1.06;
  sl2::GridConfig fine = coarse;
  fine.lambda_min *= 0.5;
  fine.ratio = std::sqrt(fine.ratio);

  bool ok = true;
  std::string detail;
  for (int nfac : {1, 2}) {
    const double r1 = run_once(coarse, nfac);
    const double r2 = run_once(fine, nfac);
    const double drift = std::abs(r2 - r1) / r1;
    if (!(r1 > 0.0) || !std::isfinite(r1) || drift >= 0.20) ok = false;
    std::snprintf(buf, sizeof buf, " factors=%d max_ratio=%.3e drift=%.1f%%", nfac, r1,
                  100.0 * drift);
    detail += buf;
  }
  report(8, ok, "order-2 bound ratio bounded and refinement-stable:" + detail);
}

// --- criterion 9: root-system suite ---
namespace brute {

using rootsys::RootVec;

std::vector<long long> formal_sum(const std::vector<RootVec>& mem,
                                  const rootsys::RootSystem& rs) {
  std::vector<long long> total(rs.simple_roots.size(), 0);
  for (const auto& m : mem) {
    auto c = rs.simple_coeffs(m);
    for (size_t i = 0; i < c.size(); ++i) total[i] += c[i];
  }
  return total;
}

// independent bitmask enumeration of all strongly orthogonal systems
bool matches_library(const rootsys::RootSystem& rs) {
  const size_t np = rs.positive_roots.size();
  if (np > 16) return false;
  auto add = [](const RootVec& a, const RootVec& b) {
    RootVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
  };
  auto sub = [](const RootVec& a, const RootVec& b) {
    RootVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
  };
  std::vector<std::vector<RootVec>> all;
  std::vector<std::vector<long long>> sums;
  for (size_t mask = 1; mask < (size_t{1} << np); ++mask) {
    std::vector<RootVec> cand;
    for (size_t b = 0; b < np; ++b)
      if (mask & (size_t{1} << b)) cand.push_back(rs.positive_roots[b]);
    bool so = true;
    for (size_t i = 0; i < cand.size() && so; ++i)
      for (size_t j = i + 1; j < cand.size() && so; ++j)
        if (rs.contains(add(cand[i], cand[j])) || rs.contains(sub(cand[i], cand[j])))
          so = false;
    if (!so) continue;
    all.push_back(cand);
    sums.push_back(formal_sum(cand, rs));
  }
  std::vector<long long> best(rs.simple_roots.size(), 0);
  for (const auto& s : sums)
    for (size_t i = 0; i < s.size(); ++i) best[i] = std::max(best[i], s[i]);
  bool attained = false;
  for (const auto& s : sums) attained = attained || (s == best);
  auto got = rootsys::find_maximal_sos(rs);
  if (!attained) return !got.maximal;
  return got.maximal && got.formal_sum_coeffs == best &&
         rootsys::is_strongly_orthogonal(got.members, rs);
}

}  // namespace brute

void criterion9() {
  using rootsys::Family;
  bool ok = true;
  for (auto [fam, rank] : std::vector<std::pair<Family, int>>{{Family::A, 1},
                                                              {Family::A, 2},
                                                              {Family::A, 3},
                                                              {Family::B, 2},
                                                              {Family::C, 2},
                                                              {Family::D, 4},
                                                              {Family::G2, 2}}) {
    auto rs = rootsys::build_root_system(fam, rank);
    if (!brute::matches_library(rs)) ok = false;
  }

  // exponent formulas against hand-evaluation oracles, machine precision
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(b)); };
  {
    auto rs = rootsys::build_root_system(Family::A, 1);
    auto sos = rootsys::find_maximal_sos(rs);
    rootsys::SpectralGapProfile gaps;
    gaps.gamma = {0.5};
    gaps.field = {rootsys::FieldLabel::Real};
    rootsys::CartanElement a{{1.0, -1.0}};  // theta(a+) = e^2
    if (!near(rootsys::eta_epsilon(sos, a, gaps, 0.1, rs), std::exp(-0.8))) ok = false;
    auto exps = rootsys::regularity_exponents(sos, gaps, 0.1);
    if (!near(exps.zeta, 2.6) || !near(exps.p, 0.4)) ok = false;
  }
  if (!near(rootsys::holder_gamma(4.0, 1.0), 0.5)) ok = false;
  if (!near(rootsys::holder_gamma(1.0, 1.0), 0.25)) ok = false;
  if (!near(rootsys::holder_gamma(0.1, 1.0), 0.025)) ok = false;
  if (!near(rootsys::mixing_exponent(3, 2, std::exp(-1.0)), std::exp(-0.25))) ok = false;
  if (!near(rootsys::mixing_exponent(2, 1, std::exp(-1.0)), std::exp(-1.0))) ok = false;

  // zeta >= p over random valid profiles
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ur(0.01, 0.5), uc(0.01, 1.0), ue(0.001, 0.01);
  auto b2 = rootsys::build_root_system(Family::B, 2);
  auto sos2 = rootsys::find_maximal_sos(b2);
  for (int trial = 0; trial < 1000; ++trial) {
    rootsys::SpectralGapProfile gaps;
    for (int i = 0; i < 2; ++i) {
      const bool cx = (rng() & 1u) != 0;
      gaps.field.push_back(cx ? rootsys::FieldLabel::Complex : rootsys::FieldLabel::Real);
      gaps.gamma.push_back(cx ? uc(rng) : ur(rng));
    }
    auto e = rootsys::regularity_exponents(sos2, gaps, ue(rng));
    if (e.zeta < e.p) ok = false;
  }
  report(9, ok, "maximal SOS matches brute force; exponent formulas match hand oracles");
}

// --- criterion 10: partition scheduler over random configurations ---
void criterion10() {
  const auto t0 = Clock::now();
  auto sweep = selftest::partition_property_sweep(1000, 20240817u);
  const double secs = seconds_since(t0);
  const bool ok = sweep.configs == 1000 && sweep.verified == 1000 && secs < 5.0;
  std::snprintf(buf, sizeof buf,
                "1000 random partitions verified (pivot gap included): %d/%d in %.2fs "
                "[1 in D12 unconditionally: %d]",
                sweep.verified, sweep.configs, secs, sweep.one_in_d12_held);
  report(10, ok, buf);
}

// --- criterion 11: property suites via selftest ---
void criterion11() {
  const auto t0 = Clock::now();
  auto results = selftest::run_all();
  const double secs = seconds_since(t0);
  bool ok = selftest::all_passed(results) && secs < 60.0;
  std::string detail;
  for (const auto& r : results)
    if (!r.passed) detail += " " + r.name + ": " + r.detail;
  std::snprintf(buf, sizeof buf, "selftest property suites all pass in %.1fs (< 60s)%s",
                secs, detail.c_str());
  report(11, ok, buf);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  std::printf(
      "[NOTE] criterion 12: abstract constants C_eps, C_{r,p}, C_{n,eps}, K-finite optimal "
      "rates and manifold correlation integrals are declared non-reproducible at desk scale; "
      "covered by the property-based criteria above.\n");
  if (failures == 0) std::printf("acceptance: all criteria passed\n");
  else std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
