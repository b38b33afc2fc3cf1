#pragma once

#include <random>
#include <string>
#include <vector>

#include "fracmix/mixsched.hpp"
#include "fracmix/rootsys.hpp"

namespace fracmix::selftest {

struct SuiteResult {
  std::string name;
  bool passed = false;
  int checks = 0;
  std::string detail;
};

// Invariant suites: flow unitarity and group laws, frac_apply semigroup,
// cutoff complementarity, grid-refinement Cauchy convergence, root-system
// invariants, exponent inequalities, and a partition property sweep.
std::vector<SuiteResult> run_all(unsigned seed = 20240817);

bool all_passed(const std::vector<SuiteResult>& results);

// Random split-coordinate configuration with nondegenerate gaps.
mixsched::GapConfiguration random_config(std::mt19937& rng, int n, int m, int dim);

struct PartitionSweep {
  int configs = 0;
  int verified = 0;
  int one_in_d12_held = 0;
  int ambient_inequality_held = 0;
  std::vector<std::string> first_failures;
};

// plan_partition + verify_partition over random configurations with
// n in {3..8} and m in {1,2,3}, across several root systems.
PartitionSweep partition_property_sweep(int count, unsigned seed);

}  // namespace fracmix::selftest
