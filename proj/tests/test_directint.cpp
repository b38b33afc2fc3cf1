#include <doctest.h>

#include <cmath>

#include "fracmix/directint.hpp"

using namespace fracmix;
using directint::DirectIntegralModel;
using directint::TypeIIProblem;
using rootsys::FieldLabel;
using sl2::Series;

namespace {

sl2::GridConfig small_grid() {
  sl2::GridConfig cfg;
  cfg.lambda_max = 50.0;
  cfg.ratio = 1.06;
  return cfg;
}

DirectIntegralModel complementary_model(double varpi) {
  DirectIntegralModel m;
  m.components.push_back({sl2::make_irrep(Series::Complementary, 1.0 - varpi * varpi), 1.0});
  return m;
}

}  // namespace

TEST_CASE("spectral_gap") {
  SUBCASE("single complementary varpi = 0.5") {
    CHECK(directint::spectral_gap(complementary_model(0.5)) == doctest::Approx(0.25));
  }
  SUBCASE("mix takes the minimum") {
    auto m = complementary_model(0.5);
    m.components.push_back({sl2::make_irrep(Series::Principal, 2.0), 0.5});
    CHECK(directint::spectral_gap(m) == doctest::Approx(0.25));
  }
  SUBCASE("single discrete n=2") {
    DirectIntegralModel m;
    m.components.push_back({sl2::make_irrep(Series::Discrete, 2), 1.0});
    CHECK(directint::spectral_gap(m) == doctest::Approx(1.0));
  }
  SUBCASE("empty model is a domain error") {
    CHECK_THROWS_AS(directint::spectral_gap(DirectIntegralModel{}), DomainError);
  }
}

TEST_CASE("tensor model registry") {
  auto model = directint::make_tensor_model(
      {complementary_model(0.5), complementary_model(0.5)}, 0.1, small_grid());
  CHECK(model.n() == 2);
  CHECK(model.gamma(0) == doctest::Approx(0.25));
  CHECK(model.zeta(0) == doctest::Approx(2.35));
  CHECK(model.numeric_axes() == std::vector<int>{0, 1});

  DirectIntegralModel cx = complementary_model(0.5);
  cx.field = FieldLabel::Complex;
  auto mixed = directint::make_tensor_model({complementary_model(0.5), cx}, 0.1, small_grid());
  CHECK(mixed.numeric_axes() == std::vector<int>{0});
  CHECK(mixed.zeta(1) == doctest::Approx(1.1));
}

TEST_CASE("single real factor reduces to frac_solve") {
  auto model = directint::make_tensor_model({complementary_model(0.5)}, 0.1, small_grid());
  const auto& irrep = model.factors[0].numeric;
  auto f = sl2::edge_gaussian(model.factors[0].grid);
  auto xi = directint::tensor_product({f});

  auto sol = directint::typeII_solve(xi, TypeIIProblem{{0.2}}, model);
  REQUIRE(sol.branches.size() == 1);
  CHECK(sol.branches[0].carries_numeric);
  CHECK(sol.reconstruction_error < 1e-12);

  auto direct = fracsolve::frac_solve(f, 0.2, irrep);
  REQUIRE(direct.verdict == fracsolve::Verdict::Solvable);
  double dev = 0.0;
  for (size_t i = 0; i < f.values.size(); ++i)
    dev = std::max(dev,
                   std::abs(sol.branches[0].omega.values[i] - direct.solution->values[i]));
  CHECK(dev < 1e-14);
}

TEST_CASE("two-factor type II solve") {
  auto model = directint::make_tensor_model(
      {complementary_model(0.5), complementary_model(0.5)}, 0.1, small_grid());
  auto f1 = sl2::edge_gaussian(model.factors[0].grid);
  auto f2 = sl2::edge_gaussian(model.factors[1].grid);
  auto xi = directint::tensor_product({f1, f2});

  SUBCASE("r = 0.2 on both factors is solvable with exact reconstruction") {
    auto sol = directint::typeII_solve(xi, TypeIIProblem{{0.2, 0.2}}, model);
    REQUIRE(sol.branches.size() == 1);
    CHECK(sol.reconstruction_error < 1e-11);
    CHECK(std::isfinite(sol.branches[0].omega_norm));
    CHECK(sol.branches[0].pieces.size() == 4);  // low/high split per factor
    // piece norms add up coherently: each piece is a masked copy of omega
    double piece_max = 0.0;
    for (const auto& p : sol.branches[0].pieces) piece_max = std::max(piece_max, p.norm);
    CHECK(piece_max <= sol.branches[0].omega_norm * (1.0 + 1e-12));
  }
  SUBCASE("r above the registry gap names the factor") {
    CHECK_THROWS_WITH_AS(directint::typeII_solve(xi, TypeIIProblem{{0.3, 0.2}}, model),
                         doctest::Contains("factor 1"), DomainError);
    CHECK_THROWS_WITH_AS(directint::typeII_solve(xi, TypeIIProblem{{0.2, 0.27}}, model),
                         doctest::Contains("factor 2"), DomainError);
  }
  SUBCASE("norm stability under one grid-refinement doubling") {
    auto sol = directint::typeII_solve(xi, TypeIIProblem{{0.2, 0.2}}, model);
    auto check = directint::typeII_estimate_check(sol, xi, model);

    sl2::GridConfig fine = small_grid();
    fine.lambda_min *= 0.5;
    fine.ratio = std::sqrt(fine.ratio);
    auto fmodel = directint::make_tensor_model(
        {complementary_model(0.5), complementary_model(0.5)}, 0.1, fine);
    auto g1 = sl2::edge_gaussian(fmodel.factors[0].grid);
    auto g2 = sl2::edge_gaussian(fmodel.factors[1].grid);
    auto fxi = directint::tensor_product({g1, g2});
    auto fsol = directint::typeII_solve(fxi, TypeIIProblem{{0.2, 0.2}}, fmodel);
    auto fcheck = directint::typeII_estimate_check(fsol, fxi, fmodel);

    CHECK(std::abs(fsol.branches[0].omega_norm - sol.branches[0].omega_norm) /
              sol.branches[0].omega_norm <
          0.05);
    CHECK(std::abs(fcheck.max_ratio - check.max_ratio) / check.max_ratio < 0.2);
  }
}

TEST_CASE("estimate check properties") {
  auto model = directint::make_tensor_model(
      {complementary_model(0.5), complementary_model(0.5)}, 0.1, small_grid());
  auto f1 = sl2::bump_away(model.factors[0].grid, 0.5, 4.0);
  auto f2 = sl2::bump_away(model.factors[1].grid, 0.5, 4.0);
  auto xi = directint::tensor_product({f1, f2});
  auto sol = directint::typeII_solve(xi, TypeIIProblem{{0.2, 0.2}}, model);
  auto check = directint::typeII_estimate_check(sol, xi, model);
  CHECK(std::isfinite(check.max_ratio));
  CHECK(check.max_ratio > 0.0);

  SUBCASE("scaling invariance") {
    directint::TensorVector scaled = xi;
    for (auto& v : scaled.values) v *= 7.5;
    auto ssol = directint::typeII_solve(scaled, TypeIIProblem{{0.2, 0.2}}, model);
    auto scheck = directint::typeII_estimate_check(ssol, scaled, model);
    CHECK(scheck.max_ratio == doctest::Approx(check.max_ratio).epsilon(1e-10));
  }
  SUBCASE("monotone budget: more sigma smoothing never hurts") {
    auto b0 = directint::sigma_apply_axis(xi, 0, model.factors[0].numeric, 1);
    auto b1 = directint::sigma_apply_axis(xi, 0, model.factors[0].numeric, 2);
    CHECK(directint::tnorm(b1) >= directint::tnorm(b0));
  }
  SUBCASE("low-frequency data routes through the sigma budget") {
    // factor-1 profile concentrated at the spectral edge: the naive L^2
    // comparison blows up while the sigma-budget ratio stays moderate.
    // Edge-concentrated data needs a deeper cutoff window for the shells to
    // reach their asymptotic regime.
    sl2::GridConfig deep = small_grid();
    deep.lambda_min = 1e-8;
    auto dmodel = directint::make_tensor_model(
        {complementary_model(0.5), complementary_model(0.5)}, 0.1, deep);
    auto low = sl2::sample_profile(dmodel.factors[0].grid, [](double lam) {
      const double z = lam / 0.001;
      return sl2::cplx(std::exp(-z * z), 0.0);
    });
    auto g2 = sl2::edge_gaussian(dmodel.factors[1].grid);
    auto lxi = directint::tensor_product({low, g2});
    auto lsol = directint::typeII_solve(lxi, TypeIIProblem{{0.2, 0.2}}, dmodel);
    auto lcheck = directint::typeII_estimate_check(lsol, lxi, dmodel);
    const double naive = lsol.branches[0].omega_norm / directint::tnorm(lxi);
    CHECK(naive > 5.0);  // plain division is badly unbounded here
    CHECK(lcheck.max_ratio < 1.0);
  }
}

TEST_CASE("factor commutativity of the multipliers") {
  auto model = directint::make_tensor_model(
      {complementary_model(0.5), complementary_model(0.4)}, 0.1, small_grid());
  auto f1 = sl2::edge_gaussian(model.factors[0].grid);
  auto f2 = sl2::edge_gaussian(model.factors[1].grid);
  auto xi = directint::tensor_product({f1, f2});
  auto ab = directint::frac_apply_axis(directint::frac_apply_axis(xi, 0, 0.3), 1, 0.7);
  auto ba = directint::frac_apply_axis(directint::frac_apply_axis(xi, 1, 0.7), 0, 0.3);
  double rel = 0.0;
  for (size_t i = 0; i < ab.values.size(); ++i) {
    const double scale = std::max({std::abs(ab.values[i]), std::abs(ba.values[i]), 1e-30});
    rel = std::max(rel, std::abs(ab.values[i] - ba.values[i]) / scale);
  }
  CHECK(rel < 1e-15);
}

TEST_CASE("embedded divergence for data below the registry smoothness") {
  auto model = directint::make_tensor_model(
      {complementary_model(0.5), complementary_model(0.5)}, 0.1, small_grid());
  // edge-singular factor-1 profile |lambda|^{-0.2} g; its private threshold is
  // 0.05 even though the registry gap is 0.25
  auto rough = sl2::sample_profile(
      model.factors[0].grid,
      [](double lam) {
        return sl2::cplx(std::pow(std::abs(lam), -0.2) * std::exp(-lam * lam), 0.0);
      },
      -0.2);
  auto f2 = sl2::edge_gaussian(model.factors[1].grid);
  auto xi = directint::tensor_product({rough, f2});
  CHECK_THROWS_AS(directint::typeII_solve(xi, TypeIIProblem{{0.2, 0.2}}, model),
                  directint::TypeIIDivergence);
  try {
    directint::typeII_solve(xi, TypeIIProblem{{0.2, 0.2}}, model);
  } catch (const directint::TypeIIDivergence& e) {
    CHECK(e.factor == 1);
    CHECK(e.diagnostics.growth_exponent > 0.0);
  }
}

TEST_CASE("sharpness witness") {
  auto model = directint::make_tensor_model(
      {complementary_model(0.5), complementary_model(0.5)}, 0.1, small_grid());

  SUBCASE("r above the gap diverges on all branches") {
    auto rep = directint::sharpness_witness(model, 0, 0.3, TypeIIProblem{{0.0, 0.2}});
    CHECK(rep.all_divergent);
    REQUIRE(rep.branch_exponents.size() == 1);
    CHECK(rep.branch_exponents[0] == doctest::Approx(2.0 * (0.3 - 0.25)).epsilon(0.2));
    CHECK(rep.chosen_c == doctest::Approx(0.275));
  }
  SUBCASE("r below the gap is refused") {
    CHECK_THROWS_AS(directint::sharpness_witness(model, 0, 0.2, TypeIIProblem{{0.0, 0.2}}),
                    DomainError);
  }
  SUBCASE("single factor reduces to the frac_solve divergent case") {
    auto m1 = directint::make_tensor_model({complementary_model(0.5)}, 0.1, small_grid());
    auto rep = directint::sharpness_witness(m1, 0, 0.3, TypeIIProblem{{0.0}});
    CHECK(rep.all_divergent);
  }
}

TEST_CASE("complex factors are structural branches") {
  DirectIntegralModel cx = complementary_model(0.5);
  cx.field = FieldLabel::Complex;
  auto model =
      directint::make_tensor_model({complementary_model(0.5), cx}, 0.1, small_grid());
  CHECK(model.numeric_axes() == std::vector<int>{0});

  auto f = sl2::edge_gaussian(model.factors[0].grid);
  auto xi = directint::tensor_product({f});
  auto sol = directint::typeII_solve(xi, TypeIIProblem{{0.2, 0.2}}, model);
  REQUIRE(sol.branches.size() == 2);  // U and iU choices of the complex factor
  CHECK(sol.branches[0].lambda_choice == std::vector<int>{0, 0});
  CHECK(sol.branches[1].lambda_choice == std::vector<int>{0, 1});
  CHECK(sol.branches[0].carries_numeric);
  CHECK_FALSE(sol.branches[1].carries_numeric);
  CHECK(sol.reconstruction_error < 1e-12);
  bool has_structural_label = false;
  for (const auto& p : sol.branches[1].pieces)
    if (p.label.find("P2P1") != std::string::npos) has_structural_label = true;
  CHECK(has_structural_label);
}

TEST_CASE("tensor norm matches the one-dimensional norm on clean profiles") {
  auto model = directint::make_tensor_model({complementary_model(0.5)}, 0.1, small_grid());
  auto f = sl2::bump_away(model.factors[0].grid, 0.25, 4.0);
  auto xi = directint::tensor_product({f});
  CHECK(directint::tnorm(xi) == doctest::Approx(sl2::norm(f)).epsilon(1e-13));
}

TEST_CASE("witness construction needs a numeric gap-realizing factor") {
  DirectIntegralModel cx = complementary_model(0.5);
  cx.field = FieldLabel::Complex;
  auto model = directint::make_tensor_model({complementary_model(0.5), cx}, 0.1, small_grid());
  CHECK_THROWS_AS(directint::sharpness_witness(model, 1, 0.5, TypeIIProblem{{0.2, 0.0}}),
                  ConfigError);
}

TEST_CASE("gap registry brackets the threshold at the multi-factor level") {
  auto model = directint::make_tensor_model(
      {complementary_model(0.5), complementary_model(0.5)}, 0.1, small_grid());
  const double g0 = model.gamma(0), g1 = model.gamma(1);
  auto f1 = sl2::edge_gaussian(model.factors[0].grid);
  auto f2 = sl2::edge_gaussian(model.factors[1].grid);
  auto xi = directint::tensor_product({f1, f2});
  // solvable just below both gaps
  auto sol = directint::typeII_solve(xi, TypeIIProblem{{0.95 * g0, 0.95 * g1}}, model);
  CHECK(std::isfinite(sol.branches[0].omega_norm));
  CHECK(sol.reconstruction_error < 1e-10);
  // divergent witness just above each gap
  for (int i : {0, 1}) {
    auto rep = directint::sharpness_witness(model, i, 1.05 * model.gamma(i),
                                            TypeIIProblem{{0.0, 0.0}});
    CHECK(rep.all_divergent);
  }
}
