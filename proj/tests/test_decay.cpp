#include <doctest.h>

#include <cmath>

#include "fracmix/decay.hpp"

using namespace fracmix;
using decay::RateModel;
using sl2::Flow;
using sl2::Series;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

directint::DirectIntegralModel complementary_model(double varpi) {
  directint::DirectIntegralModel m;
  m.components.push_back({sl2::make_irrep(Series::Complementary, 1.0 - varpi * varpi), 1.0});
  return m;
}

}  // namespace

TEST_CASE("coeff_curve basics") {
  auto irrep = sl2::make_irrep(Series::Complementary, 0.75);
  auto grid = sl2::make_grid(irrep);
  auto f = sl2::edge_gaussian(grid);

  SUBCASE("time zero sample is the inner product") {
    std::vector<double> times = {0.0, 0.5, 1.0};
    auto curve = decay::coeff_curve(f, f, Flow::Geodesic, times, irrep);
    CHECK(curve.magnitudes[0] ==
          doctest::Approx(sl2::norm(f) * sl2::norm(f)).epsilon(1e-12));
  }
  SUBCASE("geodesic curve of a symmetric profile is even in s") {
    std::vector<double> pos = {0.5, 1.0, 1.5};
    std::vector<double> negt = {-0.5, -1.0, -1.5};
    auto cp = decay::coeff_curve(f, f, Flow::Geodesic, pos, irrep);
    auto cn = decay::coeff_curve(f, f, Flow::Geodesic, negt, irrep);
    for (size_t i = 0; i < pos.size(); ++i)
      CHECK(cp.magnitudes[i] == doctest::Approx(cn.magnitudes[i]).epsilon(1e-3));
  }
}

TEST_CASE("fit_rate on synthetic data") {
  decay::DecayCurve curve;
  curve.flow = Flow::Geodesic;
  for (double s = 0.0; s <= 7.0; s += 0.25) {
    curve.times.push_back(s);
    curve.magnitudes.push_back(3.0 * std::exp(-2.0 * s * 0.25));
  }
  auto fit = decay::fit_rate(curve, RateModel::ExponentialInS, decay::FitWindow{1.0, 6.0});
  CHECK(fit.exponent == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(fit.residual < 1e-12);

  decay::DecayCurve poly;
  poly.flow = Flow::Horocycle;
  for (double t = 0.0; t <= 250.0; t += 2.5) {
    poly.times.push_back(t);
    poly.magnitudes.push_back(0.7 * std::pow(1.0 + t, -0.4));
  }
  auto pfit =
      decay::fit_rate(poly, RateModel::PolynomialInT, decay::FitWindow{5.0, 200.0});
  CHECK(pfit.exponent == doctest::Approx(0.4).epsilon(1e-3));

  SUBCASE("window starvation is an error") {
    CHECK_THROWS_AS(
        decay::fit_rate(curve, RateModel::ExponentialInS, decay::FitWindow{6.5, 7.0}),
        RangeError);
  }
}

TEST_CASE("complementary geodesic decay hits (1 - varpi)/2") {
  for (double varpi : {0.4, 0.6}) {
    CAPTURE(varpi);
    auto irrep = sl2::make_irrep(Series::Complementary, 1.0 - varpi * varpi);
    auto grid = sl2::make_grid(irrep);
    auto f = sl2::edge_gaussian(grid);
    auto curve = decay::coeff_curve(f, f, Flow::Geodesic, linspace(0.0, 6.5, 27), irrep);
    auto fit = decay::fit_rate(curve, RateModel::ExponentialInS, decay::default_window(Flow::Geodesic));
    const double target = 0.5 * (1.0 - varpi);
    CHECK(std::abs(fit.exponent - target) / target < 0.05);
  }
}

TEST_CASE("discrete series n=2 shows the better-than-tempered rate") {
  auto irrep = sl2::make_irrep(Series::Discrete, 2);
  sl2::GridConfig cfg;
  cfg.lambda_min = 1e-8;  // the pulled-in profile must stay resolved at s = 6
  auto grid = sl2::make_grid(irrep, cfg);
  auto f = sl2::discrete_profile(grid, 2);
  auto curve = decay::coeff_curve(f, f, Flow::Geodesic, linspace(0.0, 6.5, 27), irrep);
  auto fit = decay::fit_rate(curve, RateModel::ExponentialInS, decay::default_window(Flow::Geodesic));
  CHECK(std::abs(fit.exponent - 1.0) < 0.10);
}

TEST_CASE("horocycle polynomial decay is twice the geodesic rate") {
  auto irrep = sl2::make_irrep(Series::Complementary, 0.75);  // varpi = 0.5, 2 gamma = 0.5
  auto grid = sl2::make_grid(irrep);
  auto f = sl2::edge_gaussian(grid);
  std::vector<double> times;
  for (double t = 2.0; t <= 220.0; t *= 1.15) times.push_back(t);
  auto curve = decay::coeff_curve(f, f, Flow::Horocycle, times, irrep);
  auto fit = decay::fit_rate(curve, RateModel::PolynomialInT, decay::default_window(Flow::Horocycle));
  CHECK(std::abs(fit.exponent - 0.5) / 0.5 < 0.10);
}

TEST_CASE("product partial norms") {
  auto model = directint::make_tensor_model(
      {complementary_model(0.5), complementary_model(0.5)}, 0.1, sl2::GridConfig{});
  std::vector<sl2::IrrepParams> irreps = {model.factors[0].numeric,
                                          model.factors[1].numeric};
  std::vector<sl2::ModelVector> f = {sl2::edge_gaussian(model.factors[0].grid),
                                     sl2::edge_gaussian(model.factors[1].grid)};
  SUBCASE("order zero is the product of L2 norms") {
    CHECK(decay::product_partial_norm(f, irreps, true, {0, 0}) ==
          doctest::Approx(sl2::norm(f[0]) * sl2::norm(f[1])).epsilon(1e-12));
  }
  SUBCASE("norms grow with the order") {
    const double n0 = decay::product_partial_norm(f, irreps, true, {0, 0});
    const double n2 = decay::product_partial_norm(f, irreps, true, {2, 2});
    CHECK(n2 >= n0);
  }
  SUBCASE("single-factor norm matches sobolev_norm in the U direction") {
    std::vector<sl2::ModelVector> one = {f[0]};
    std::vector<sl2::IrrepParams> oneir = {irreps[0]};
    const std::vector<sl2::Generator> ugen = {sl2::Generator::U};
    CHECK(decay::product_partial_norm(one, oneir, true, {2}) ==
          doctest::Approx(sl2::sobolev_norm(f[0], ugen, 2, irreps[0])).epsilon(1e-6));
  }
}

TEST_CASE("order2_bound_check") {
  auto model = directint::make_tensor_model({complementary_model(0.5)}, 0.1,
                                            sl2::GridConfig{});
  std::vector<sl2::ModelVector> psi = {sl2::edge_gaussian(model.factors[0].grid)};
  std::vector<sl2::ModelVector> xi = {sl2::edge_gaussian(model.factors[0].grid)};

  SUBCASE("identity point is Cauchy-Schwarz") {
    auto rep = decay::order2_bound_check(psi, xi, model, 0.1, {{0.0}});
    REQUIRE(rep.points.size() == 1);
    CHECK(rep.points[0].ratio <= 1.0 + 1e-12);
  }
  SUBCASE("ratio stays bounded along the geodesic sweep") {
    std::vector<std::vector<double>> a_grid;
    for (double s = 0.0; s <= 6.0; s += 0.5) a_grid.push_back({s});
    auto rep = decay::order2_bound_check(psi, xi, model, 0.1, a_grid);
    CHECK(rep.max_ratio <= 1.0 + 1e-12);
    CHECK(rep.max_ratio > 0.0);
  }
  SUBCASE("two-factor sweep with the product eta") {
    auto m2 = directint::make_tensor_model(
        {complementary_model(0.5), complementary_model(0.4)}, 0.1, sl2::GridConfig{});
    std::vector<sl2::ModelVector> p2 = {sl2::edge_gaussian(m2.factors[0].grid),
                                        sl2::edge_gaussian(m2.factors[1].grid)};
    std::vector<std::vector<double>> a_grid;
    for (double s1 = 0.0; s1 <= 4.0; s1 += 1.0)
      for (double s2 = 0.0; s2 <= 4.0; s2 += 1.0) a_grid.push_back({s1, s2});
    auto rep = decay::order2_bound_check(p2, p2, m2, 0.1, a_grid);
    CHECK(rep.max_ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("coeff_curve reports the last reliable time under a tight loss budget") {
  auto irrep = sl2::make_irrep(Series::Complementary, 0.75);
  auto grid = sl2::make_grid(irrep);
  auto f = sl2::edge_gaussian(grid);  // mass reaches the inner cutoff
  auto curve =
      decay::coeff_curve(f, f, Flow::Geodesic, std::vector<double>{0.0, 1.0, 4.0, 6.0},
                         irrep, /*loss_budget=*/1e-9);
  CHECK(curve.truncated);
  CHECK(curve.truncated_at < 6.0);
  CHECK(curve.times.size() < 4);
}
