#pragma once

#include <span>
#include <vector>

#include "fracmix/directint.hpp"
#include "fracmix/sl2model.hpp"

namespace fracmix::decay {

using sl2::Flow;
using sl2::IrrepParams;
using sl2::ModelVector;

struct DecayCurve {
  std::vector<double> times;
  std::vector<double> magnitudes;
  Flow flow = Flow::Geodesic;
  double truncated_at = 0.0;  // last reliable time when the loss budget stopped the sweep
  bool truncated = false;
};

// |<pi(flow_t) psi, xi>| sampled over the time grid. Stops early (and records
// the last reliable time) if the geodesic aliasing loss exceeds loss_budget.
DecayCurve coeff_curve(const ModelVector& psi, const ModelVector& xi, Flow flow,
                       std::span<const double> times, const IrrepParams& irrep,
                       double loss_budget = 0.5);

enum class RateModel { ExponentialInS, PolynomialInT };

struct FitWindow {
  double t_min = 1.0;
  double t_max = 6.0;
  double floor_rel = 1e-10;  // relative to the time-0 magnitude
};

struct RateFit {
  RateModel model = RateModel::ExponentialInS;
  double exponent = 0.0;  // r in e^{-2sr}, or p in (1+t)^{-p}
  FitWindow window;
  double residual = 0.0;
  int points_used = 0;
};

// Least-squares slope of log magnitude against 2s (exponential) or log(1+t)
// (polynomial), over the window and above the noise floor.
RateFit fit_rate(const DecayCurve& curve, RateModel model, FitWindow window);

FitWindow default_window(Flow flow);

struct BoundCheckPoint {
  std::vector<double> s;  // per-factor geodesic times
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct BoundCheckReport {
  std::vector<BoundCheckPoint> points;
  double max_ratio = 0.0;
  std::vector<int> p_orders;     // per-factor even-rounded unstable orders
  std::vector<int> zeta_orders;  // per-factor even-rounded weak-stable orders
  double psi_norm = 0.0;
  double xi_norm = 0.0;
};

// Partial Sobolev norm of a product vector: sum over words in the per-factor
// generator sets (U directions, or {X,V} directions) whose degree in each
// factor stays within that factor's order cap, combined across factors with
// interleaving multiplicities.
double product_partial_norm(const std::vector<ModelVector>& factors,
                            const std::vector<IrrepParams>& irreps, bool unstable_dirs,
                            const std::vector<int>& orders);

// Two-point bound shape on a tensor model with product test vectors: LHS is
// the product of per-factor geodesic matrix coefficients at a = (s_i), RHS is
// eta_eps(S, a) times the partial norms (U directions for psi, X/V directions
// for xi), with fractional orders rounded up to even integers.
BoundCheckReport order2_bound_check(const std::vector<ModelVector>& psi,
                                    const std::vector<ModelVector>& xi,
                                    const directint::TensorModel& model, double eps,
                                    const std::vector<std::vector<double>>& a_grid);

}  // namespace fracmix::decay
