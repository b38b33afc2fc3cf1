#include <benchmark/benchmark.h>

#include <random>

#include "fracmix/decay.hpp"
#include "fracmix/fracsolve.hpp"
#include "fracmix/mixsched.hpp"
#include "fracmix/rootsys.hpp"
#include "fracmix/selftest.hpp"
#include "fracmix/sl2model.hpp"

using namespace fracmix;

namespace {

struct Fixture {
  sl2::IrrepParams irrep = sl2::make_irrep(sl2::Series::Complementary, 0.75);
  sl2::GridPtr grid = sl2::make_grid(irrep);
  sl2::ModelVector f = sl2::edge_gaussian(grid);
};

Fixture& fixture() {
  static Fixture fx;
  return fx;
}

void BM_weighted_norm(benchmark::State& state) {
  auto& fx = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(sl2::weighted_norm(fx.f, fx.irrep));
}
BENCHMARK(BM_weighted_norm);

void BM_geodesic_flow(benchmark::State& state) {
  auto& fx = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(sl2::flow_apply(fx.f, sl2::Flow::Geodesic, 1.0, fx.irrep));
}
BENCHMARK(BM_geodesic_flow);

void BM_horocycle_coefficient(benchmark::State& state) {
  auto& fx = fixture();
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sl2::matrix_coefficient(fx.f, fx.f, sl2::Flow::Horocycle, t, fx.irrep));
}
BENCHMARK(BM_horocycle_coefficient)->Arg(10)->Arg(100);

void BM_generator_V(benchmark::State& state) {
  auto& fx = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(sl2::apply_generator(fx.f, sl2::Generator::V, fx.irrep));
}
BENCHMARK(BM_generator_V);

void BM_frac_solve(benchmark::State& state) {
  auto& fx = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(fracsolve::frac_solve(fx.f, 0.2, fx.irrep));
}
BENCHMARK(BM_frac_solve);

void BM_tauberian(benchmark::State& state) {
  auto gaussian = [](double x) { return std::exp(-x * x); };
  for (auto _ : state)
    benchmark::DoNotOptimize(fracsolve::tauberian_check(gaussian, 0.3));
}
BENCHMARK(BM_tauberian);

void BM_find_maximal_sos_D4(benchmark::State& state) {
  auto rs = rootsys::build_root_system(rootsys::Family::D, 4);
  for (auto _ : state) benchmark::DoNotOptimize(rootsys::find_maximal_sos(rs));
}
BENCHMARK(BM_find_maximal_sos_D4);

void BM_plan_partition(benchmark::State& state) {
  auto rs = rootsys::build_root_system(rootsys::Family::B, 2);
  auto sos = rootsys::find_maximal_sos(rs);
  rootsys::SpectralGapProfile gaps;
  gaps.gamma.assign(sos.members.size(), 0.4);
  gaps.field.assign(sos.members.size(), rootsys::FieldLabel::Real);
  std::mt19937 rng(1);
  auto cfg = selftest::random_config(rng, static_cast<int>(state.range(0)), 2, rs.dim());
  for (auto _ : state)
    benchmark::DoNotOptimize(mixsched::plan_partition(cfg, sos, gaps, 0.1, rs));
}
BENCHMARK(BM_plan_partition)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
