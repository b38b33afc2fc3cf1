#include "fracmix/decay.hpp"

#include <algorithm>
#include <cmath>

namespace fracmix::decay {

DecayCurve coeff_curve(const ModelVector& psi, const ModelVector& xi, Flow flow,
                       std::span<const double> times, const IrrepParams& irrep,
                       double loss_budget) {
  DecayCurve curve;
  curve.flow = flow;
  double last_ok = 0.0;
  for (double t : times) {
    if (flow == Flow::Geodesic) {
      auto fr = sl2::flow_apply(psi, flow, t, irrep);
      if (fr.aliasing_loss > loss_budget) {
        curve.truncated = true;
        curve.truncated_at = last_ok;
        break;
      }
      curve.times.push_back(t);
      curve.magnitudes.push_back(std::abs(sl2::inner(fr.vec, xi)));
    } else {
      curve.times.push_back(t);
      curve.magnitudes.push_back(std::abs(sl2::matrix_coefficient(psi, xi, flow, t, irrep)));
    }
    last_ok = t;
  }
  if (!curve.truncated) curve.truncated_at = last_ok;
  return curve;
}

FitWindow default_window(Flow flow) {
  FitWindow w;
  if (flow == Flow::Horocycle) {
    w.t_min = 5.0;
    w.t_max = 200.0;
  }
  return w;
}

RateFit fit_rate(const DecayCurve& curve, RateModel model, FitWindow window) {
  double m0 = curve.magnitudes.empty() ? 0.0 : curve.magnitudes.front();
  for (size_t i = 0; i < curve.times.size(); ++i)
    if (curve.times[i] == 0.0) m0 = curve.magnitudes[i];
  const double floor_abs = window.floor_rel * std::max(m0, 1e-300);

  std::vector<double> xs, ys;
  for (size_t i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i];
    const double m = curve.magnitudes[i];
    if (t < window.t_min || t > window.t_max) continue;
    if (m <= floor_abs) continue;
    xs.push_back(model == RateModel::ExponentialInS ? 2.0 * t : std::log1p(t));
    ys.push_back(std::log(m));
  }
  if (xs.size() < 10)
    throw RangeError("fit window has fewer than 10 usable samples");

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (slope * xs[i] + intercept);
    ss += e * e;
  }

  RateFit fit;
  fit.model = model;
  fit.exponent = -slope;
  fit.window = window;
  fit.residual = std::sqrt(ss / n);
  fit.points_used = static_cast<int>(xs.size());
  return fit;
}

namespace {

double sq(double x) { return x * x; }

// Sum of ||w v||^2 over words w of exact length d in the given generators,
// with the derivative-edge trim on words of positive degree.
std::vector<double> word_norms_by_degree(const ModelVector& v, const IrrepParams& irrep,
                                         const std::vector<sl2::Generator>& gens,
                                         int order) {
  std::vector<double> by_degree(static_cast<size_t>(order) + 1, 0.0);
  by_degree[0] = sq(sl2::norm(v));
  std::vector<ModelVector> level = {v};
  for (int d = 1; d <= order; ++d) {
    std::vector<ModelVector> next;
    next.reserve(level.size() * gens.size());
    for (const auto& u : level)
      for (auto g : gens) {
        next.push_back(sl2::apply_generator(u, g, irrep));
        by_degree[d] += sq(sl2::trimmed_norm(next.back()));
      }
    level = std::move(next);
  }
  return by_degree;
}

double multinomial(const std::vector<int>& d) {
  int total = 0;
  for (int x : d) total += x;
  double result = 1.0;
  int k = 0;
  for (int x : d)
    for (int j = 1; j <= x; ++j) result *= static_cast<double>(++k) / j;
  (void)total;
  return result;
}

}  // namespace

double product_partial_norm(const std::vector<ModelVector>& factors,
                            const std::vector<IrrepParams>& irreps, bool unstable_dirs,
                            const std::vector<int>& orders) {
  if (factors.empty() || factors.size() != irreps.size() || factors.size() != orders.size())
    throw DomainError("product_partial_norm: one irrep and order per factor required");
  const std::vector<sl2::Generator> gens =
      unstable_dirs ? std::vector<sl2::Generator>{sl2::Generator::U}
                    : std::vector<sl2::Generator>{sl2::Generator::X, sl2::Generator::V};
  std::vector<std::vector<double>> per_axis;
  for (size_t a = 0; a < factors.size(); ++a)
    per_axis.push_back(word_norms_by_degree(factors[a], irreps[a], gens, orders[a]));

  // total = sum over multi-degrees with d_a <= orders[a] of the number of
  // interleavings times the product of per-axis word sums
  double total = 0.0;
  std::vector<int> d(factors.size(), 0);
  const size_t k = factors.size();
  while (true) {
    double prod = multinomial(d);
    for (size_t a = 0; a < k; ++a) prod *= per_axis[a][static_cast<size_t>(d[a])];
    total += prod;
    size_t pos = 0;
    while (pos < k) {
      if (d[pos] < orders[pos]) {
        ++d[pos];
        break;
      }
      d[pos] = 0;
      ++pos;
    }
    if (pos == k) break;
  }
  return std::sqrt(total);
}

BoundCheckReport order2_bound_check(const std::vector<ModelVector>& psi,
                                    const std::vector<ModelVector>& xi,
                                    const directint::TensorModel& model, double eps,
                                    const std::vector<std::vector<double>>& a_grid) {
  const auto axes = model.numeric_axes();
  if (psi.size() != axes.size() || xi.size() != axes.size())
    throw DomainError("order2_bound_check: one factor vector per numeric factor");
  if (!(eps > 0.0)) throw DomainError("order2_bound_check requires eps > 0");

  std::vector<IrrepParams> irreps;
  std::vector<double> gamma;
  auto even_up = [](double x) { return 2 * static_cast<int>(std::ceil(x / 2.0)); };

  BoundCheckReport rep;
  for (int i : axes) {
    irreps.push_back(model.factors[i].numeric);
    gamma.push_back(model.gamma(i));
    // fractional per-factor budgets rounded up to even integers
    rep.p_orders.push_back(even_up(model.gamma(i) - eps));
    rep.zeta_orders.push_back(even_up(model.zeta(i)));
  }
  rep.psi_norm = product_partial_norm(psi, irreps, true, rep.p_orders);
  rep.xi_norm = product_partial_norm(xi, irreps, false, rep.zeta_orders);

  for (const auto& a : a_grid) {
    if (a.size() != axes.size())
      throw DomainError("a-grid entries need one geodesic time per factor");
    BoundCheckPoint pt;
    pt.s = a;
    double lhs = 1.0, log_eta = 0.0;
    for (size_t k = 0; k < axes.size(); ++k) {
      lhs *= std::abs(
          sl2::matrix_coefficient(psi[k], xi[k], Flow::Geodesic, a[k], irreps[k]));
      log_eta -= 2.0 * std::abs(a[k]) * (gamma[k] - eps);
    }
    pt.lhs = lhs;
    pt.rhs = std::exp(log_eta) * rep.psi_norm * rep.xi_norm;
    pt.ratio = pt.lhs / std::max(pt.rhs, 1e-300);
    rep.max_ratio = std::max(rep.max_ratio, pt.ratio);
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

}  // namespace fracmix::decay
