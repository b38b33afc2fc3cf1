#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fracmix/sl2model.hpp"

namespace fracmix::fracsolve {

using sl2::IrrepParams;
using sl2::ModelVector;

// Fixed C^2 smoothstep: 1 on [-1,1], 0 outside (-2,2), monotone between.
struct CutoffProfile {
  double operator()(double t) const;
};

// Pointwise multiplication by |lambda|^r, the spectral multiplier of |U|^r.
ModelVector frac_apply(const ModelVector& f, double r);

ModelVector cutoff_apply(const ModelVector& psi, const CutoffProfile& profile = {});

enum class Verdict { Solvable, Divergent, Obstructed };

std::string to_string(Verdict v);

struct CutoffDiagnostics {
  std::vector<double> lambda_cut;    // decade boundaries, decreasing
  std::vector<double> partial_norm;  // norm over |lambda| >= lambda_cut
  std::vector<double> shell_mass;    // per-decade mass, toward lambda = 0
  double growth_exponent = 0.0;      // slope of log10(shell mass) per decade
  bool support_clear_of_zero = false;
};

struct SolveReport {
  std::optional<ModelVector> solution;
  double solution_norm = 0.0;  // +inf when divergent
  Verdict verdict = Verdict::Solvable;
  CutoffDiagnostics diagnostics;
};

// Shared decade-shell fit: masses[i] is the nonnegative weighted contribution
// at |lambda| = lambda_abs[i]; lambda_min bounds the deepest full decade.
CutoffDiagnostics shells_from_masses(std::span<const double> lambda_abs,
                                     std::span<const double> masses, double lambda_min);

// |U|^r omega = xi via division by the symbol; verdict from the inner-cutoff
// shell sweep (solvable iff the weighted mass stays integrable at 0).
SolveReport frac_solve(const ModelVector& xi, double r, const IrrepParams& irrep);

// U omega = xi, candidate omega = xi / (-i lambda); obstructed when the
// spectral mass of xi near 0 under |lambda|^{-2-Re varpi} diverges.
SolveReport classical_solve(const ModelVector& xi, const IrrepParams& irrep);

// |U|^q omega = psi - P psi; always solvable with ||omega|| <= 2 ||psi||.
SolveReport highpass_frac_solve(const ModelVector& psi, double q,
                                const CutoffProfile& profile = {});

struct TauberianConfig {
  double support_radius = 12.0;  // tau negligible beyond this |lambda|
  double tol = 1e-9;
  double tail_limit = 1e5;
};

struct TauberianReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
  double tail_cut = 0.0;  // where the |t| integral was truncated
};

// lhs = integral tau |lambda|^{-2r'}; rhs = integral tau_hat(t) K(t) dt with
// K(t) = 2 Gamma(1-2r') sin(pi r') |t|^{2r'-1} and tau_hat the 1/(2pi)-normalized
// Fourier transform. Both sides by independent adaptive quadrature.
TauberianReport tauberian_check(const std::function<double(double)>& tau, double r_prime,
                                const TauberianConfig& cfg = {});

struct ThresholdScan {
  std::vector<double> r_values;
  std::vector<Verdict> verdicts;
  std::vector<double> growth_exponents;
  double largest_solvable = 0.0;
  double smallest_divergent = 0.0;
  double gamma_hat = 0.0;
  double resolution = 0.0;
  bool unbounded_in_range = false;
  bool monotone = true;
};

ThresholdScan threshold_scan(const ModelVector& xi, const IrrepParams& irrep,
                             std::span<const double> r_grid);

// Max nodewise deviation of |U|^r pi(a_s) f  vs  e^{-2 r s} pi(a_s) |U|^r f.
double conjugation_scaling_check(const ModelVector& f, double s, double r,
                                 const IrrepParams& irrep);

}  // namespace fracmix::fracsolve
