#include "fracmix/fracsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracmix/quadrature.hpp"

namespace fracmix::fracsolve {

double CutoffProfile::operator()(double t) const {
  const double x = std::abs(t);
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double z = x - 1.0;  // in (0,1)
  return 1.0 - z * z * z * (10.0 - 15.0 * z + 6.0 * z * z);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Solvable: return "solvable";
    case Verdict::Divergent: return "divergent";
    case Verdict::Obstructed: return "obstructed";
  }
  return "?";
}

ModelVector frac_apply(const ModelVector& f, double r) {
  if (r < 0.0) throw DomainError("frac_apply requires r >= 0");
  ModelVector out = f;
  for (size_t i = 0; i < f.values.size(); ++i)
    out.values[i] = f.values[i] * std::pow(std::abs(f.grid->node(i)), r);
  out.vanish_order = f.vanish_order + r;
  // |x|^r has a cusp at the edge for fractional r; the uniform patch cannot
  // represent it, so it survives only the trivial multiplier
  if (r == 0.0) out.patch = f.patch;
  else out.patch.reset();
  return out;
}

ModelVector cutoff_apply(const ModelVector& psi, const CutoffProfile& profile) {
  ModelVector out = psi;
  for (size_t i = 0; i < psi.values.size(); ++i)
    out.values[i] = psi.values[i] * profile(psi.grid->node(i));
  out.patch =
      sl2::patch_multiply(psi, [&](double x) { return sl2::cplx(profile(x), 0.0); });
  return out;
}

CutoffDiagnostics shells_from_masses(std::span<const double> lambda_abs,
                                     std::span<const double> masses, double lambda_min) {
  CutoffDiagnostics diag;
  const int d_start = 2;  // shells begin at 1e-2 to stay clear of profile variation
  const int d_end = static_cast<int>(std::floor(-std::log10(lambda_min) + 1e-9)) - 1;
  if (d_end - d_start + 1 < 3)
    throw ResolutionError(
        "inner-cutoff window too narrow for a verdict; widen the lambda_min sweep");

  std::vector<double> mass(static_cast<size_t>(d_end - d_start + 1), 0.0);
  double outside = 0.0;  // |lambda| >= 1e-d_start
  for (size_t i = 0; i < lambda_abs.size(); ++i) {
    const double l10 = -std::log10(lambda_abs[i]);
    if (l10 < d_start) {
      outside += masses[i];
      continue;
    }
    int d = static_cast<int>(std::floor(l10));
    if (d > d_end) d = d_end;  // clipped tail cell joins the deepest shell
    mass[static_cast<size_t>(d - d_start)] += masses[i];
  }

  double cumulative = outside;
  diag.lambda_cut.push_back(std::pow(10.0, -d_start));
  diag.partial_norm.push_back(std::sqrt(cumulative));
  for (size_t k = 0; k < mass.size(); ++k) {
    cumulative += mass[k];
    diag.shell_mass.push_back(mass[k]);
    diag.lambda_cut.push_back(std::pow(10.0, -(d_start + static_cast<int>(k) + 1)));
    diag.partial_norm.push_back(std::sqrt(cumulative));
  }

  // Median of consecutive per-decade log ratios: robust against profile
  // variation in the shallow shells, which would bias a least-squares slope.
  const double floor_mass = 1e-250;
  std::vector<double> ratios;
  for (size_t k = 0; k + 1 < mass.size(); ++k)
    if (mass[k] > floor_mass && mass[k + 1] > floor_mass)
      ratios.push_back(std::log10(mass[k + 1] / mass[k]));
  if (ratios.size() < 2) {
    diag.support_clear_of_zero = true;
    diag.growth_exponent = -std::numeric_limits<double>::infinity();
    return diag;
  }
  std::sort(ratios.begin(), ratios.end());
  const size_t mid = ratios.size() / 2;
  diag.growth_exponent = (ratios.size() % 2 == 1)
                             ? ratios[mid]
                             : 0.5 * (ratios[mid - 1] + ratios[mid]);
  return diag;
}

namespace {

// Shell sweep of the candidate-solution mass w |xi|^2 |lambda|^{-2 extra}.
CutoffDiagnostics shell_sweep(const ModelVector& xi, double extra) {
  const auto& g = *xi.grid;
  std::vector<double> lam(xi.values.size()), mass(xi.values.size());
  for (size_t i = 0; i < xi.values.size(); ++i) {
    lam[i] = std::abs(g.node(i));
    mass[i] = g.weight(i) * std::norm(xi.values[i]) * std::pow(lam[i], -2.0 * extra);
  }
  return shells_from_masses(lam, mass, g.config().lambda_min);
}

SolveReport divide_and_judge(const ModelVector& xi, const ModelVector& omega,
                             double extra, Verdict bad_verdict) {
  SolveReport rep;
  rep.diagnostics = shell_sweep(xi, extra);
  const bool divergent =
      !rep.diagnostics.support_clear_of_zero && rep.diagnostics.growth_exponent > 0.0;
  if (divergent) {
    rep.verdict = bad_verdict;
    rep.solution_norm = std::numeric_limits<double>::infinity();
  } else {
    rep.verdict = Verdict::Solvable;
    rep.solution = omega;
    rep.solution_norm = sl2::norm(omega);
  }
  return rep;
}

}  // namespace

SolveReport frac_solve(const ModelVector& xi, double r, const IrrepParams& irrep) {
  if (!(r > 0.0)) throw DomainError("frac_solve requires r > 0");
  sl2::ensure_compatible(xi, irrep);
  ModelVector omega = xi;
  omega.patch.reset();  // singular multiplier; the edge samples no longer apply
  for (size_t i = 0; i < xi.values.size(); ++i)
    omega.values[i] = xi.values[i] * std::pow(std::abs(xi.grid->node(i)), -r);
  omega.vanish_order = xi.vanish_order - r;
  return divide_and_judge(xi, omega, r, Verdict::Divergent);
}

SolveReport classical_solve(const ModelVector& xi, const IrrepParams& irrep) {
  sl2::ensure_compatible(xi, irrep);
  ModelVector omega = xi;
  omega.patch.reset();
  for (size_t i = 0; i < xi.values.size(); ++i)
    omega.values[i] = xi.values[i] / sl2::cplx(0.0, -xi.grid->node(i));
  omega.vanish_order = xi.vanish_order - 1.0;
  return divide_and_judge(xi, omega, 1.0, Verdict::Obstructed);
}

SolveReport highpass_frac_solve(const ModelVector& psi, double q,
                                const CutoffProfile& profile) {
  if (!(q > 0.0)) throw DomainError("highpass_frac_solve requires q > 0");
  SolveReport rep;
  ModelVector omega = psi;
  for (size_t i = 0; i < psi.values.size(); ++i) {
    const double lam = psi.grid->node(i);
    omega.values[i] =
        (1.0 - profile(lam)) * psi.values[i] * std::pow(std::abs(lam), -q);
  }
  // the highpass multiplier vanishes on |lambda| <= 1, which covers the patch
  omega.patch = sl2::patch_multiply(psi, [&](double x) {
    const double hp = 1.0 - profile(x);
    return sl2::cplx(hp == 0.0 ? 0.0 : hp * std::pow(std::abs(x), -q), 0.0);
  });
  rep.solution = omega;
  rep.solution_norm = sl2::norm(omega);
  rep.verdict = Verdict::Solvable;
  rep.diagnostics.support_clear_of_zero = true;  // supported in |lambda| > 1
  rep.diagnostics.growth_exponent = -std::numeric_limits<double>::infinity();
  return rep;
}

namespace {

TauberianReport tauberian_check_impl(const std::function<double(double)>& tau, double rp,
                                     const TauberianConfig& cfg) {
  TauberianReport rep;
  const double L = cfg.support_radius;

  // lhs: substitute lambda = u^{1/(1-2r')} to remove the singularity
  const double a = 1.0 - 2.0 * rp;
  const double u_max = std::pow(L, a);
  rep.lhs = 2.0 / a *
            quad::adaptive_simpson(
                [&](double u) { return u <= 0.0 ? tau(0.0) : tau(std::pow(u, 1.0 / a)); },
                0.0, u_max, cfg.tol);

  const double kernel_const = 2.0 * std::tgamma(1.0 - 2.0 * rp) * std::sin(M_PI * rp);
  auto tau_hat = [&](double t) { return quad::fourier_transform_even(tau, L, t, cfg.tol); };

  // |t| <= 1, substituting t = v^{1/(2r')}
  const double b = 2.0 * rp;
  double small =
      1.0 / b *
      quad::adaptive_simpson(
          [&](double v) { return v <= 0.0 ? tau_hat(0.0) : tau_hat(std::pow(v, 1.0 / b)); },
          0.0, 1.0, cfg.tol);

  // |t| > 1 in doubling blocks until the tail stops contributing
  double tail = 0.0, t_lo = 1.0;
  bool converged = false;
  while (t_lo < cfg.tail_limit) {
    const double t_hi = 2.0 * t_lo;
    const double block = quad::adaptive_simpson(
        [&](double t) { return tau_hat(t) * std::pow(t, 2.0 * rp - 1.0); }, t_lo, t_hi,
        cfg.tol * 10.0);
    tail += block;
    t_lo = t_hi;
    if (std::abs(block) < 1e-7 * std::max(1e-30, std::abs(small + tail))) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw AccuracyError("tauberian_check: oscillatory tail truncated at |t| = " +
                        std::to_string(t_lo) + " without convergence");
  rep.tail_cut = t_lo;
  rep.rhs = 2.0 * kernel_const * (small + tail);  // both signs of t
  rep.relative_error = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.lhs), 1e-300);
  return rep;
}

}  // namespace

TauberianReport tauberian_check(const std::function<double(double)>& tau, double r_prime,
                                const TauberianConfig& cfg) {
  if (!(r_prime > 0.0) || !(r_prime < 0.5))
    throw DomainError("tauberian_check requires r' in (0, 1/2)");
  const double twice = 2.0 * r_prime;
  if (std::abs(twice - std::round(twice)) < 1e-12)
    throw DomainError("tauberian_check requires 2r' not an integer");
  return tauberian_check_impl(tau, r_prime, cfg);
}

ThresholdScan threshold_scan(const ModelVector& xi, const IrrepParams& irrep,
                             std::span<const double> r_grid) {
  if (r_grid.size() < 2) throw DomainError("threshold_scan requires at least two r values");
  ThresholdScan scan;
  bool seen_divergent = false;
  for (double r : r_grid) {
    auto rep = frac_solve(xi, r, irrep);
    scan.r_values.push_back(r);
    scan.verdicts.push_back(rep.verdict);
    scan.growth_exponents.push_back(rep.diagnostics.growth_exponent);
    if (rep.verdict == Verdict::Solvable && seen_divergent) scan.monotone = false;
    if (rep.verdict != Verdict::Solvable) seen_divergent = true;
  }
  int last_solvable = -1, first_divergent = -1;
  for (size_t i = 0; i < scan.verdicts.size(); ++i) {
    if (scan.verdicts[i] == Verdict::Solvable) last_solvable = static_cast<int>(i);
    else if (first_divergent < 0) first_divergent = static_cast<int>(i);
  }
  if (last_solvable < 0)
    throw RangeError("threshold_scan: no solvable exponent in the given bracket");
  scan.largest_solvable = scan.r_values[last_solvable];
  if (first_divergent < 0) {
    scan.unbounded_in_range = true;
    scan.smallest_divergent = std::numeric_limits<double>::quiet_NaN();
    scan.gamma_hat = std::numeric_limits<double>::quiet_NaN();
    scan.resolution = std::numeric_limits<double>::quiet_NaN();
    return scan;
  }
  scan.smallest_divergent = scan.r_values[first_divergent];
  scan.gamma_hat = 0.5 * (scan.largest_solvable + scan.smallest_divergent);
  scan.resolution = 0.5 * (scan.smallest_divergent - scan.largest_solvable);
  return scan;
}

double conjugation_scaling_check(const ModelVector& f, double s, double r,
                                 const IrrepParams& irrep) {
  auto lhs = frac_apply(sl2::flow_apply(f, sl2::Flow::Geodesic, s, irrep).vec, r);
  auto scaled = sl2::flow_apply(frac_apply(f, r), sl2::Flow::Geodesic, s, irrep).vec;
  const double factor = std::exp(-2.0 * r * s);
  double dev = 0.0;
  for (size_t i = 0; i < lhs.values.size(); ++i)
    dev = std::max(dev, std::abs(lhs.values[i] - factor * scaled.values[i]));
  return dev;
}

}  // namespace fracmix::fracsolve
