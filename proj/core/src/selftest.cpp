#include "fracmix/selftest.hpp"

#include <cmath>
#include <sstream>

#include "fracmix/decay.hpp"
#include "fracmix/directint.hpp"
#include "fracmix/fracsolve.hpp"
#include "fracmix/sl2model.hpp"

namespace fracmix::selftest {

namespace {

using sl2::Flow;
using sl2::ModelVector;

struct Check {
  int count = 0;
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    ++count;
    if (!cond && ok) {
      ok = false;
      why << what;
    }
  }
};

SuiteResult finish(const std::string& name, const Check& c) {
  SuiteResult r;
  r.name = name;
  r.passed = c.ok;
  r.checks = c.count;
  r.detail = c.why.str();
  return r;
}

double max_dev(const ModelVector& a, const ModelVector& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i)
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

SuiteResult flow_unitarity() {
  Check c;
  auto irrep = sl2::make_irrep(sl2::Series::Complementary, 0.75);
  auto grid = sl2::make_grid(irrep);
  auto f = sl2::bump_away(grid, 0.25, 4.0);
  const double n0 = sl2::norm(f);
  for (double s : {0.5, -0.5, 1.0, 2.0}) {
    auto fr = sl2::flow_apply(f, Flow::Geodesic, s, irrep);
    c.expect(std::abs(sl2::norm(fr.vec) - n0) / n0 < 1e-4,
             "geodesic norm drift at s = " + std::to_string(s));
    c.expect(fr.aliasing_loss < 1e-12, "unexpected aliasing loss for compact bump");
  }
  for (double t : {0.5, 3.0, 25.0}) {
    auto fr = sl2::flow_apply(f, Flow::Horocycle, t, irrep);
    c.expect(std::abs(sl2::norm(fr.vec) - n0) / n0 < 1e-12,
             "horocycle norm drift at t = " + std::to_string(t));
  }
  // discrete-series flow stays unitary on the half-line as well
  auto irr2 = sl2::make_irrep(sl2::Series::Discrete, 2);
  auto grid2 = sl2::make_grid(irr2);
  auto g = sl2::bump_away(grid2, 0.25, 4.0);
  auto gr = sl2::flow_apply(g, Flow::Geodesic, 0.7, irr2);
  c.expect(std::abs(sl2::norm(gr.vec) - sl2::norm(g)) / sl2::norm(g) < 1e-4,
           "discrete-series geodesic norm drift");
  return finish("flow-unitarity", c);
}

SuiteResult flow_group_law() {
  Check c;
  auto irrep = sl2::make_irrep(sl2::Series::Complementary, 0.64);
  auto grid = sl2::make_grid(irrep);
  auto f = sl2::edge_gaussian(grid);
  auto two_step =
      sl2::flow_apply(sl2::flow_apply(f, Flow::Geodesic, 0.4, irrep).vec, Flow::Geodesic,
                      0.35, irrep)
          .vec;
  auto one_step = sl2::flow_apply(f, Flow::Geodesic, 0.75, irrep).vec;
  c.expect(max_dev(two_step, one_step) < 1e-4, "geodesic group law");
  auto h2 = sl2::flow_apply(sl2::flow_apply(f, Flow::Horocycle, 1.5, irrep).vec,
                            Flow::Horocycle, 2.5, irrep)
                .vec;
  auto h1 = sl2::flow_apply(f, Flow::Horocycle, 4.0, irrep).vec;
  c.expect(max_dev(h2, h1) < 1e-13, "horocycle group law");
  return finish("flow-group-law", c);
}

SuiteResult frac_semigroup() {
  Check c;
  auto irrep = sl2::make_irrep(sl2::Series::Complementary, 0.75);
  auto grid = sl2::make_grid(irrep);
  auto f = sl2::edge_gaussian(grid);
  auto lhs = fracsolve::frac_apply(fracsolve::frac_apply(f, 0.3), 0.45);
  auto rhs = fracsolve::frac_apply(f, 0.75);
  double rel = 0.0;
  for (size_t i = 0; i < lhs.values.size(); ++i) {
    const double scale = std::max(std::abs(rhs.values[i]), 1e-30);
    rel = std::max(rel, std::abs(lhs.values[i] - rhs.values[i]) / scale);
  }
  c.expect(rel < 1e-13, "frac_apply semigroup identity");
  auto ident = fracsolve::frac_apply(f, 0.0);
  c.expect(max_dev(ident, f) == 0.0, "frac_apply r = 0 is the identity");
  return finish("frac-semigroup", c);
}

SuiteResult cutoff_complementarity() {
  Check c;
  auto irrep = sl2::make_irrep(sl2::Series::Complementary, 0.51);
  auto grid = sl2::make_grid(irrep);
  auto psi = sl2::edge_gaussian(grid);
  const fracsolve::CutoffProfile profile;
  for (double q : {0.5, 2.0, 5.0}) {
    auto rep = fracsolve::highpass_frac_solve(psi, q, profile);
    auto rebuilt = fracsolve::frac_apply(*rep.solution, q) + fracsolve::cutoff_apply(psi, profile);
    c.expect(max_dev(rebuilt, psi) < 1e-12, "cutoff complementarity at q = " + std::to_string(q));
    c.expect(rep.solution_norm <= 2.0 * sl2::norm(psi) + 1e-12, "highpass norm bound");
  }
  auto low = fracsolve::cutoff_apply(psi, profile);
  c.expect(sl2::norm(low) <= sl2::norm(psi) + 1e-12, "cutoff contraction");
  return finish("cutoff-complementarity", c);
}

SuiteResult refinement_cauchy() {
  Check c;
  auto irrep = sl2::make_irrep(sl2::Series::Complementary, 0.75);
  auto grid = sl2::make_grid(irrep);
  auto fine_grid = grid->refined(irrep);

  auto f = sl2::bump_away(grid, 0.25, 4.0);
  auto f2 = sl2::bump_away(fine_grid, 0.25, 4.0);
  c.expect(std::abs(sl2::norm(f) - sl2::norm(f2)) / sl2::norm(f) < 1e-4,
           "compact-bump norm Cauchy under refinement");
  auto g0 = sl2::edge_gaussian(grid);
  auto g1 = sl2::edge_gaussian(fine_grid);
  c.expect(std::abs(sl2::norm(g0) - sl2::norm(g1)) / sl2::norm(g0) < 1e-9,
           "Gaussian norm Cauchy under refinement");

  auto g = sl2::edge_gaussian(grid);
  auto g2 = sl2::edge_gaussian(fine_grid);
  const auto c1 = sl2::matrix_coefficient(g, g, Flow::Geodesic, 1.0, irrep);
  const auto c2 = sl2::matrix_coefficient(g2, g2, Flow::Geodesic, 1.0, irrep);
  c.expect(std::abs(c1 - c2) / std::abs(c2) < 1e-4, "geodesic coefficient Cauchy");
  const auto h1 = sl2::matrix_coefficient(g, g, Flow::Horocycle, 20.0, irrep);
  const auto h2 = sl2::matrix_coefficient(g2, g2, Flow::Horocycle, 20.0, irrep);
  c.expect(std::abs(h1 - h2) / std::abs(h2) < 1e-3, "horocycle coefficient Cauchy");
  return finish("refinement-cauchy", c);
}

SuiteResult rootsys_invariants(unsigned seed) {
  Check c;
  std::mt19937 rng(seed);
  using rootsys::Family;
  const std::vector<std::pair<Family, int>> cases = {
      {Family::A, 1}, {Family::A, 2}, {Family::A, 3}, {Family::B, 2},
      {Family::C, 2}, {Family::D, 4}, {Family::G2, 2}};
  for (auto [fam, rank] : cases) {
    auto rs = rootsys::build_root_system(fam, rank);
    c.expect(rs.roots.size() == 2 * rs.positive_roots.size(), "negation closure count");
    for (const auto& r : rs.positive_roots) {
      rootsys::RootVec neg(r.size());
      for (size_t i = 0; i < r.size(); ++i) neg[i] = -r[i];
      c.expect(rs.contains(neg), "negative of a positive root is a root");
      auto coeffs = rs.simple_coeffs(r);  // throws if not a nonneg combination
      (void)coeffs;
      ++c.count;
    }
    auto sos = rootsys::find_maximal_sos(rs);
    c.expect(rootsys::is_strongly_orthogonal(sos.members, rs), "maximal SOS is an SOS");
    // hereditary: every subset passes
    for (size_t mask = 0; mask < (size_t{1} << sos.members.size()); ++mask) {
      std::vector<rootsys::RootVec> subset;
      for (size_t b = 0; b < sos.members.size(); ++b)
        if (mask & (size_t{1} << b)) subset.push_back(sos.members[b]);
      c.expect(rootsys::is_strongly_orthogonal(subset, rs), "SOS subsets are SOS");
    }

    // eta is Weyl-invariant and submultiplicative on dominant elements
    rootsys::SpectralGapProfile gaps;
    gaps.gamma.assign(sos.members.size(), 0.4);
    gaps.field.assign(sos.members.size(), rootsys::FieldLabel::Real);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    rootsys::CartanElement a;
    a.log_coords.resize(rs.dim());
    for (auto& x : a.log_coords) x = unif(rng);
    const double eta_a = rootsys::eta_epsilon(sos, a, gaps, 0.05, rs);
    for (const auto& s : rs.simple_roots) {
      rootsys::CartanElement b = a;
      double dot = 0.0, len = 0.0;
      for (size_t i = 0; i < s.size(); ++i) {
        dot += s[i] * a.log_coords[i];
        len += s[i] * s[i];
      }
      for (size_t i = 0; i < s.size(); ++i) b.log_coords[i] -= 2.0 * dot / len * s[i];
      c.expect(std::abs(rootsys::eta_epsilon(sos, b, gaps, 0.05, rs) - eta_a) <
                   1e-12 + 1e-12 * eta_a,
               "eta Weyl invariance");
    }
    auto ap = rootsys::weyl_positive(a, rs);
    c.expect(rootsys::is_dominant(ap, rs), "weyl_positive lands in the closed chamber");
    rootsys::CartanElement a2 = ap;
    for (auto& x : a2.log_coords) x *= 0.7;
    rootsys::CartanElement sum = ap;
    for (size_t i = 0; i < sum.log_coords.size(); ++i) sum.log_coords[i] += a2.log_coords[i];
    const double lhs = rootsys::eta_epsilon(sos, sum, gaps, 0.05, rs);
    const double rhs = rootsys::eta_epsilon(sos, ap, gaps, 0.05, rs) *
                       rootsys::eta_epsilon(sos, a2, gaps, 0.05, rs);
    c.expect(std::abs(lhs - rhs) < 1e-10 * std::max(lhs, rhs) + 1e-300,
             "eta submultiplicative on dominant elements");
  }
  return finish("rootsys-invariants", c);
}

SuiteResult exponent_inequalities(unsigned seed) {
  Check c;
  std::mt19937 rng(seed + 1);
  auto rs = rootsys::build_root_system(rootsys::Family::B, 2);
  auto sos = rootsys::find_maximal_sos(rs);
  std::uniform_real_distribution<double> ug(0.01, 0.5);
  std::uniform_real_distribution<double> uc(0.01, 1.0);
  std::uniform_real_distribution<double> ue(0.001, 0.009);
  for (int trial = 0; trial < 200; ++trial) {
    rootsys::SpectralGapProfile gaps;
    for (size_t i = 0; i < sos.members.size(); ++i) {
      const bool complex_factor = (rng() & 1u) != 0;
      gaps.field.push_back(complex_factor ? rootsys::FieldLabel::Complex
                                          : rootsys::FieldLabel::Real);
      gaps.gamma.push_back(complex_factor ? uc(rng) : ug(rng));
    }
    auto exps = rootsys::regularity_exponents(sos, gaps, ue(rng));
    c.expect(exps.zeta >= exps.p, "zeta_eps(S) >= p_eps(S)");
  }
  return finish("exponent-inequalities", c);
}

SuiteResult partition_property(unsigned seed) {
  Check c;
  auto sweep = partition_property_sweep(200, seed + 2);
  c.count += sweep.configs;
  c.expect(sweep.verified == sweep.configs,
           "partition verification failed: " +
               (sweep.first_failures.empty() ? std::string("?") : sweep.first_failures[0]));
  return finish("partition-property", c);
}

}  // namespace

mixsched::GapConfiguration random_config(std::mt19937& rng, int n, int m, int dim) {
  std::uniform_real_distribution<double> ug(-1.0, 1.0);
  std::uniform_real_distribution<double> ut(-3.0, 3.0);
  mixsched::GapConfiguration cfg;
  cfg.generators.resize(m);
  for (auto& g : cfg.generators) {
    g.resize(dim);
    for (auto& x : g) x = ug(rng);
  }
  cfg.t_vectors.resize(n);
  for (auto& t : cfg.t_vectors) {
    t.resize(m);
    for (auto& x : t) x = ut(rng);
  }
  return cfg;
}

PartitionSweep partition_property_sweep(int count, unsigned seed) {
  std::mt19937 rng(seed);
  using rootsys::Family;
  struct Sys {
    rootsys::RootSystem rs;
    rootsys::StronglyOrthogonalSystem sos;
  };
  std::vector<Sys> systems;
  for (auto [fam, rank] :
       std::vector<std::pair<Family, int>>{{Family::A, 1}, {Family::A, 2},
                                           {Family::A, 3}, {Family::B, 2},
                                           {Family::C, 2}}) {
    Sys s{rootsys::build_root_system(fam, rank), {}};
    s.sos = rootsys::find_maximal_sos(s.rs);
    systems.push_back(std::move(s));
  }
  std::uniform_int_distribution<int> pick_sys(0, static_cast<int>(systems.size()) - 1);
  std::uniform_int_distribution<int> pick_n(3, 8);
  std::uniform_int_distribution<int> pick_m(1, 3);
  std::uniform_real_distribution<double> ug(0.05, 0.5);

  PartitionSweep sweep;
  while (sweep.configs < count) {
    const auto& sys = systems[pick_sys(rng)];
    auto cfg = random_config(rng, pick_n(rng), pick_m(rng), sys.rs.dim());
    rootsys::SpectralGapProfile gaps;
    gaps.gamma.assign(sys.sos.members.size(), 0.0);
    for (auto& g : gaps.gamma) g = ug(rng);
    gaps.field.assign(sys.sos.members.size(), rootsys::FieldLabel::Real);
    const double eps = 0.5 * *std::min_element(gaps.gamma.begin(), gaps.gamma.end());
    try {
      auto planned = mixsched::plan_partition(cfg, sys.sos, gaps, eps, sys.rs);
      ++sweep.configs;
      if (planned.verification.ok) ++sweep.verified;
      else if (sweep.first_failures.size() < 5)
        sweep.first_failures.push_back(planned.verification.violations.front());
      if (planned.plan.one_in_d12) ++sweep.one_in_d12_held;
      if (planned.choice.ambient_inequality) ++sweep.ambient_inequality_held;
    } catch (const DomainError&) {
      // degenerate random draw; resample
    }
  }
  return sweep;
}

std::vector<SuiteResult> run_all(unsigned seed) {
  std::vector<SuiteResult> results;
  results.push_back(flow_unitarity());
  results.push_back(flow_group_law());
  results.push_back(frac_semigroup());
  results.push_back(cutoff_complementarity());
  results.push_back(refinement_cauchy());
  results.push_back(rootsys_invariants(seed));
  results.push_back(exponent_inequalities(seed));
  results.push_back(partition_property(seed));
  return results;
}

bool all_passed(const std::vector<SuiteResult>& results) {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

}  // namespace fracmix::selftest
