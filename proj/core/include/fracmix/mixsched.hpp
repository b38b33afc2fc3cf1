#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracmix/rootsys.hpp"

#include <json.hpp>

namespace fracmix::mixsched {

using rootsys::CartanElement;
using rootsys::RootSystem;
using rootsys::RootVec;
using rootsys::SpectralGapProfile;
using rootsys::StronglyOrthogonalSystem;

// Split-coordinate data: fixed generators a_1..a_m of the Cartan (by their
// log coordinates) and n points t_i in R^m, so a^t = prod a_k^{t_k} and
// log beta(a^t) = sum_k t_k <beta, log a_k>; multiplicativity is exact in
// log space by construction.
struct GapConfiguration {
  std::vector<std::vector<double>> generators;  // m log-coordinate vectors
  std::vector<std::vector<double>> t_vectors;   // n points in R^m
  std::optional<double> penalty_exponent;       // set => non-split bookkeeping

  int m() const { return static_cast<int>(generators.size()); }
  int n() const { return static_cast<int>(t_vectors.size()); }
  bool split() const { return !penalty_exponent.has_value(); }
};

// log beta(a^t) for t in R^m.
double root_log_value(const GapConfiguration& cfg, const RootVec& beta,
                      std::span<const double> t);
// log beta(a^{t_i - t_j}) with 1-based point indices.
double root_log_gap(const GapConfiguration& cfg, const RootVec& beta, int i, int j);
// Cartan element with log coordinates sum_k t_k log a_k.
CartanElement cartan_of(const GapConfiguration& cfg, std::span<const double> t);
CartanElement cartan_of_gap(const GapConfiguration& cfg, int i, int j);

struct RootChoice {
  int index = 0;        // 1-based index into the SOS members
  int reference = 0;    // 1-based point index playing t_{k+1}
  int one = 0;          // 1-based point index playing t_1 (max-gap partner)
  double log_beta_gap = 0.0;  // log beta_{i0}(a^{t_ref - t_one}) > 0
  bool ambient_inequality = false;  // whether the a^+-form of the pigeonhole also held
};

// Pigeonhole selection of the root carrying the maximal gap: the orientation
// satisfies eta^{1/l} >= beta_{i0}(a^{t_ref - t_one})^{-(gamma-eps/2)} in the
// orientationwise form (product over S of max{beta(a), beta(a^{-1})}); the
// stricter ambient-a^+ form is reported via ambient_inequality.
RootChoice choose_root_index(const GapConfiguration& cfg,
                             const StronglyOrthogonalSystem& sos,
                             const SpectralGapProfile& gaps, double eps,
                             const RootSystem& rs);

struct PartitionPlan {
  int i0 = 0;   // 1-based root index into the SOS
  int k = 0;    // n = k+1 points
  double log_c = 0.0;
  int j = 0;    // pigeonhole subinterval
  std::vector<int> d1, d2, d11, d12;  // 1-based point indices in {1..k}
  int q1 = 0, q2 = 0;                 // 1-based pivots (q1 may be k+1)
  bool one_in_d12 = false;
  bool one_in_d12_achievable = false;
};

// The inductive two-block construction. Preconditions: points are ordered so
// that index k+1 is the reference, ||t_1 - t_{k+1}|| is the maximal pairwise
// gap, and log beta_{i0}(a^{t_{k+1} - t_1}) > 0. Among the valid pigeonhole
// subintervals, one placing index 1 in the upper block is preferred.
PartitionPlan build_partition(const GapConfiguration& cfg,
                              const StronglyOrthogonalSystem& sos, int i0, int k);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> violations;
};

VerifyResult verify_partition(const PartitionPlan& plan, const GapConfiguration& cfg,
                              const StronglyOrthogonalSystem& sos);

// choose_root_index + reorder + build + verify in one step; returns the plan
// in the reordered frame together with the applied point permutation.
struct PlannedPartition {
  PartitionPlan plan;
  GapConfiguration reordered;
  std::vector<int> permutation;  // reordered index p holds original point permutation[p]
  RootChoice choice;
  VerifyResult verification;
};

PlannedPartition plan_partition(const GapConfiguration& cfg,
                                const StronglyOrthogonalSystem& sos,
                                const SpectralGapProfile& gaps, double eps,
                                const RootSystem& rs);

// Levels of the recursive two-block decomposition until all blocks are
// singletons (at most n-1).
int induction_depth(const GapConfiguration& cfg, const StronglyOrthogonalSystem& sos,
                    const SpectralGapProfile& gaps, double eps, const RootSystem& rs);

struct HigherOrderBound {
  double kernel = 0.0;          // max over pairs of eta^(1/((n-1)|S|))
  double penalty_factor = 1.0;  // (max gap + 1)^d when the penalty is set
  double bound = 0.0;           // kernel * norm_product * penalty_factor
  int pair_i = 0, pair_j = 0;   // 1-based pair attaining the kernel
};

HigherOrderBound higher_order_bound(int n, const GapConfiguration& cfg,
                                    const StronglyOrthogonalSystem& sos,
                                    const SpectralGapProfile& gaps, double eps,
                                    double norm_product, const RootSystem& rs);

struct TripleBound {
  double value = 0.0;
  int pair_i = 0, pair_j = 0;  // 1-based max-gap pair
  std::string regime;          // "split-min-eta" or "general-max-gap"
  int j_case = 0;              // 1..4 in the split regime, 0 otherwise
};

TripleBound triple_bound(const GapConfiguration& cfg, const StronglyOrthogonalSystem& sos,
                         const SpectralGapProfile& gaps, double eps, const RootSystem& rs);

struct ObstructionReport {
  bool contradiction = false;
  bool in_range = true;  // false when eta never decays below the threshold
  long long m_star = 0;
  double lower_bound_at_m_star = 0.0;  // |c| int f1^2 - C eta(m*)^{1/2} norms
  std::string note;
};

// Case-IV contradiction bookkeeping: finds the smallest integer m with
// C * norms * eta(m)^{1/2} < |c| * int_f1_sq, where eta(m) = e^{-eta_rate m}.
ObstructionReport quad_obstruction_report(double c_abs, double int_f1_sq, double C,
                                          double eta_rate, double norm_product);

nlohmann::json to_json(const PartitionPlan& plan);
nlohmann::json to_json(const VerifyResult& v);

}  // namespace fracmix::mixsched
