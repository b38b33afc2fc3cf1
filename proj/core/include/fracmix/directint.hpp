#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracmix/fracsolve.hpp"
#include "fracmix/rootsys.hpp"
#include "fracmix/sl2model.hpp"

namespace fracmix::directint {

using rootsys::FieldLabel;
using sl2::cplx;
using sl2::IrrepParams;
using sl2::ModelVector;

struct Component {
  IrrepParams irrep;
  double weight = 1.0;
};

// Finite surrogate for a direct integral over Z: a weighted list of
// irreducible pieces. The registry rate is the min over components.
struct DirectIntegralModel {
  std::vector<Component> components;
  FieldLabel field = FieldLabel::Real;
};

double spectral_gap(const DirectIntegralModel& model);

// Product of commuting rank-one factors. Real factors carry a numeric grid in
// their gap-realizing component; complex factors are bookkeeping-only (their
// branches are generated structurally and carry no grid data).
struct TensorModel {
  struct Factor {
    DirectIntegralModel model;
    sl2::GridPtr grid;       // null for structural factors
    IrrepParams numeric;     // component the grid lives in (gap-realizing)
  };
  std::vector<Factor> factors;
  double eps = 0.1;

  int n() const { return static_cast<int>(factors.size()); }
  double gamma(int i) const { return spectral_gap(factors[i].model); }
  double zeta(int i) const {
    return factors[i].model.field == FieldLabel::Complex ? 1.0 + eps
                                                         : gamma(i) + 2.0 + eps;
  }
  std::vector<int> numeric_axes() const;  // factor indices that carry grids
};

TensorModel make_tensor_model(const std::vector<DirectIntegralModel>& models, double eps,
                              const sl2::GridConfig& cfg = {});

struct TypeIIProblem {
  std::vector<double> r;  // one exponent per factor, r_i >= 0
};

// Dense product-grid array over the numeric axes. When built from a product
// of per-axis profiles the factors are kept alongside the dense data: the
// per-axis operations preserve product form, and factored evaluation keeps
// iterated derivative operators accurate at the spectral edge.
struct TensorVector {
  std::vector<sl2::GridPtr> grids;
  std::vector<size_t> shape;
  std::vector<double> vanish;          // per-axis power-law hint at the inner cutoff
  std::vector<cplx> values;            // row-major
  std::vector<ModelVector> factors;    // empty when the data is not a product

  size_t size() const { return values.size(); }
  bool is_product() const { return !factors.empty(); }
};

TensorVector tensor_product(const std::vector<ModelVector>& axis_profiles);
double tnorm(const TensorVector& t);
// Norm excluding the innermost ladder nodes per half on every axis, for
// derivative-applied tensors (see sl2::kDerivativeEdgeTrim).
double tnorm_trimmed(const TensorVector& t, size_t skip = sl2::kDerivativeEdgeTrim);
TensorVector frac_apply_axis(const TensorVector& t, int axis, double r);
TensorVector cutoff_axis(const TensorVector& t, int axis,
                         const fracsolve::CutoffProfile& profile = {});
// (I - X^2 - V^2)^times along one axis.
TensorVector sigma_apply_axis(const TensorVector& t, int axis, const IrrepParams& irrep,
                              int times);
double max_abs_diff(const TensorVector& a, const TensorVector& b);

// Divergence sweep of |xi|^2 times prod |lambda_a|^{-2 extra_a} marginalized
// onto one axis, in decade shells toward lambda = 0.
fracsolve::CutoffDiagnostics axis_shell_sweep(const TensorVector& xi, int axis,
                                              const std::vector<double>& extra);

struct TypeIIDivergence : Error {
  TypeIIDivergence(const std::string& msg, int factor_arg,
                   fracsolve::CutoffDiagnostics diag_arg)
      : Error(msg), factor(factor_arg), diagnostics(std::move(diag_arg)) {}
  int factor;
  fracsolve::CutoffDiagnostics diagnostics;
};

struct PieceReport {
  std::string label;
  double norm = 0.0;
};

struct BranchReport {
  std::vector<int> lambda_choice;  // per factor: 0 = U, 1 = iU
  bool carries_numeric = false;
  TensorVector xi_part;
  TensorVector omega;
  double omega_norm = 0.0;
  std::vector<PieceReport> pieces;
};

struct TypeIISolution {
  std::vector<BranchReport> branches;
  double reconstruction_error = 0.0;  // max |sum_branches op(omega) - xi|
};

// Per-branch fractional solve with the cutoff decomposition of the data:
// each real factor splits low/high through the spectral cutoff; complex
// factors generate structural branches whose three-way split is recorded at
// the bookkeeping level. Throws DomainError if some r_i >= gamma_i and
// TypeIIDivergence if a factor division fails the inner-cutoff sweep.
TypeIISolution typeII_solve(const TensorVector& xi, const TypeIIProblem& problem,
                            const TensorModel& model);

struct EstimateCheck {
  double sigma_budget = 0.0;  // || Sigma_n^{ceil(zeta/2)} ... Sigma_1^{...} xi ||
  double max_ratio = 0.0;
  std::vector<double> per_branch_ratio;
};

EstimateCheck typeII_estimate_check(const TypeIISolution& sol, const TensorVector& xi,
                                    const TensorModel& model);

struct WitnessReport {
  bool all_divergent = false;
  double chosen_c = 0.0;
  std::vector<double> branch_exponents;  // positive divergence exponents
  std::vector<fracsolve::CutoffDiagnostics> diagnostics;
};

// Product of a slow-decay profile in factor i with cutoff-smoothed profiles in
// the other directions; every branch division must diverge when r_i > gamma_i.
WitnessReport sharpness_witness(const TensorModel& model, int factor_index, double r_i,
                                const TypeIIProblem& base);

nlohmann::json to_json(const DirectIntegralModel& m);
nlohmann::json to_json(const TensorModel& m);

}  // namespace fracmix::directint
