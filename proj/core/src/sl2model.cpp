#include "fracmix/sl2model.hpp"

#include <algorithm>
#include <cmath>

#include "fracmix/quadrature.hpp"

namespace fracmix::sl2 {

std::string to_string(Series s) {
  switch (s) {
    case Series::Principal: return "principal";
    case Series::Complementary: return "complementary";
    case Series::Discrete: return "discrete";
    case Series::Mock: return "mock";
  }
  return "?";
}

Series series_from_string(const std::string& s) {
  if (s == "principal") return Series::Principal;
  if (s == "complementary") return Series::Complementary;
  if (s == "discrete") return Series::Discrete;
  if (s == "mock") return Series::Mock;
  throw ConfigError("unknown series: " + s);
}

double IrrepParams::optimal_rate() const {
  if (series == Series::Discrete) return 0.5 * n;
  return 0.5 * (1.0 - nu0);
}

IrrepParams make_irrep(Series series, double param) {
  IrrepParams p;
  p.series = series;
  switch (series) {
    case Series::Principal:
      if (!(param > 1.0)) throw DomainError("principal series requires mu > 1");
      p.mu = param;
      p.varpi = cplx(0.0, std::sqrt(param - 1.0));
      p.nu0 = 0.0;
      break;
    case Series::Complementary:
      if (!(param > 0.0) || !(param < 1.0))
        throw DomainError("complementary series requires 0 < mu < 1");
      p.mu = param;
      p.varpi = cplx(std::sqrt(1.0 - param), 0.0);
      p.nu0 = p.varpi.real();
      break;
    case Series::Mock:
      if (std::abs(param - 1.0) > 1e-12) throw DomainError("mock discrete requires mu = 1");
      p.mu = 1.0;
      p.varpi = cplx(0.0, 0.0);
      p.nu0 = 0.0;
      break;
    case Series::Discrete: {
      const int n = static_cast<int>(std::llround(param));
      if (std::abs(param - n) > 1e-9 || n < 2)
        throw DomainError("discrete series requires an integer index n >= 2");
      p.n = n;
      p.mu = static_cast<double>(-n * n + 2 * n);
      p.varpi = cplx(static_cast<double>(n - 1), 0.0);
      p.nu0 = static_cast<double>(-n + 1);
      break;
    }
  }
  return p;
}

SpectralGrid::SpectralGrid(const IrrepParams& irrep, const GridConfig& cfg) : cfg_(cfg) {
  if (!(cfg.lambda_min > 0.0) || !(cfg.lambda_max > cfg.lambda_min))
    throw ConfigError("grid requires 0 < lambda_min < lambda_max");
  if (!(cfg.ratio > 1.0)) throw ConfigError("grid requires node ratio > 1");
  half_line_ = irrep.half_line();
  re_varpi_ = irrep.re_varpi();

  const double span = std::log(cfg.lambda_max / cfg.lambda_min);
  size_t m = static_cast<size_t>(std::ceil(span / std::log(cfg.ratio)));
  if (m < 8) m = 8;
  if (m % 2 == 1) ++m;  // Simpson needs an even interval count
  h_ = span / static_cast<double>(m);
  per_half_ = m + 1;
  const double u0 = std::log(cfg.lambda_min);

  auto simpson_c = [m](size_t j) -> double {
    if (j == 0 || j == m) return 1.0;
    return (j % 2 == 1) ? 4.0 : 2.0;
  };

  std::vector<double> pos_nodes(per_half_), pos_w(per_half_);
  for (size_t j = 0; j <= m; ++j) {
    const double u = u0 + h_ * static_cast<double>(j);
    pos_nodes[j] = std::exp(u);
    // |lambda|^{-Re varpi} dlambda = e^{(1-Re varpi) u} du on each half-line
    pos_w[j] = simpson_c(j) * h_ / 3.0 * std::exp((1.0 - re_varpi_) * u);
  }

  if (half_line_) {
    nodes_ = pos_nodes;
    weights_ = pos_w;
  } else {
    nodes_.resize(2 * per_half_);
    weights_.resize(2 * per_half_);
    for (size_t i = 0; i < per_half_; ++i) {
      nodes_[i] = -pos_nodes[per_half_ - 1 - i];
      weights_[i] = pos_w[per_half_ - 1 - i];
      nodes_[per_half_ + i] = pos_nodes[i];
      weights_[per_half_ + i] = pos_w[i];
    }
  }
}

GridPtr SpectralGrid::refined(const IrrepParams& irrep) const {
  GridConfig c = cfg_;
  c.lambda_min *= 0.5;
  c.ratio = std::sqrt(c.ratio);
  return std::make_shared<SpectralGrid>(irrep, c);
}

GridPtr make_grid(const IrrepParams& irrep, const GridConfig& cfg) {
  return std::make_shared<SpectralGrid>(irrep, cfg);
}

namespace {

constexpr double kPatchDelta = 5e-3;
constexpr double kPatchExtent = 0.15;

bool grid_wants_patch(const SpectralGrid& g) {
  return g.config().lambda_min < 0.02 && g.config().lambda_max > 0.3;
}

PatchPtr make_patch(const SpectralGrid& g, const std::function<cplx(double)>& fn) {
  if (!grid_wants_patch(g)) return nullptr;
  auto p = std::make_shared<EdgePatch>();
  p->delta = kPatchDelta;
  p->x0 = g.half_line() ? 0.0 : -kPatchExtent;
  const size_t count = static_cast<size_t>((kPatchExtent - p->x0) / kPatchDelta) + 1;
  p->values.resize(count);
  for (size_t k = 0; k < count; ++k)
    p->values[k] = fn(p->x0 + kPatchDelta * static_cast<double>(k));
  return p;
}

}  // namespace

PatchPtr patch_multiply(const ModelVector& f, const std::function<cplx(double)>& fn) {
  if (!f.patch) return nullptr;
  auto p = std::make_shared<EdgePatch>(*f.patch);
  for (size_t k = 0; k < p->values.size(); ++k)
    p->values[k] *= fn(p->x0 + p->delta * static_cast<double>(k));
  return p;
}

ModelVector sample_profile(const GridPtr& grid, const std::function<cplx(double)>& f,
                           double vanish_order) {
  ModelVector v;
  v.grid = grid;
  v.vanish_order = vanish_order;
  v.values.resize(grid->size());
  for (size_t i = 0; i < grid->size(); ++i) v.values[i] = f(grid->node(i));
  if (vanish_order >= 0.0) v.patch = make_patch(*grid, f);
  return v;
}

ModelVector gaussian_profile(const GridPtr& grid, double center, double width) {
  return sample_profile(grid, [center, width](double x) {
    const double z = (x - center) / width;
    return cplx(std::exp(-z * z), 0.0);
  });
}

ModelVector edge_gaussian(const GridPtr& grid) {
  return sample_profile(grid, [](double x) { return cplx(std::exp(-x * x), 0.0); });
}

ModelVector discrete_profile(const GridPtr& grid, int n) {
  if (n < 2) throw DomainError("discrete profile requires n >= 2");
  return sample_profile(
      grid,
      [n](double x) { return cplx(std::pow(x, n - 1) * std::exp(-x * x), 0.0); },
      static_cast<double>(n - 1));
}

ModelVector bump_away(const GridPtr& grid, double a, double b) {
  if (!(0.0 < a) || !(a < b)) throw DomainError("bump_away requires 0 < a < b");
  return sample_profile(grid, [a, b](double lam) {
    const double x = std::abs(lam);
    if (x <= a || x >= b) return cplx(0.0, 0.0);
    const double z = 2.0 * (x - a) / (b - a) - 1.0;  // in (-1,1)
    return cplx(std::exp(1.0 - 1.0 / (1.0 - z * z)), 0.0);
  });
}

namespace {

struct HalfView {
  // Ladder index j = 0..m corresponds to |lambda| = lambda_min * e^{j h}.
  size_t array_index(size_t j) const {
    return negative ? (per_half - 1 - j) : (offset + j);
  }
  size_t per_half;
  size_t offset;  // index of the first positive node in the full array
  bool negative;
};

HalfView half_view(const SpectralGrid& g, bool negative) {
  HalfView hv;
  hv.per_half = g.nodes_per_half();
  hv.offset = g.positive_offset();
  hv.negative = negative;
  return hv;
}

cplx head_pair(const ModelVector& f, const ModelVector& g) {
  // Analytic [0, lambda_min) contribution under the power-law hints.
  const auto& grid = *f.grid;
  const double lmin = grid.config().lambda_min;
  const double p = f.vanish_order + g.vanish_order + 1.0 - grid.re_varpi();
  if (!(p > 1e-9)) return {0.0, 0.0};
  const double factor = std::pow(lmin, 1.0 - grid.re_varpi()) / p;
  cplx total{0.0, 0.0};
  const auto pos = half_view(grid, false);
  total += f.values[pos.array_index(0)] * std::conj(g.values[pos.array_index(0)]) * factor;
  if (!grid.half_line()) {
    const auto negv = half_view(grid, true);
    total +=
        f.values[negv.array_index(0)] * std::conj(g.values[negv.array_index(0)]) * factor;
  }
  return total;
}

void check_same_grid(const ModelVector& f, const ModelVector& g) {
  if (f.grid.get() != g.grid.get()) throw DomainError("vectors live on different grids");
}

}  // namespace

namespace {

cplx interp_patch(const EdgePatch& p, double x) {
  const double t = (x - p.x0) / p.delta;
  long j = static_cast<long>(std::floor(t)) - 1;
  j = std::clamp<long>(j, 0, static_cast<long>(p.values.size()) - 4);
  cplx result{0.0, 0.0};
  for (long k = j; k < j + 4; ++k) {
    double w = 1.0;
    for (long l = j; l < j + 4; ++l) {
      if (l == k) continue;
      w *= (t - static_cast<double>(l)) / static_cast<double>(k - l);
    }
    result += w * p.values[static_cast<size_t>(k)];
  }
  return result;
}

}  // namespace

cplx value_at(const ModelVector& f, double lambda) {
  const auto& g = *f.grid;
  const double lmin = g.config().lambda_min;
  // the patch bridges the cutoff gap, where the ladder has no nodes; at node
  // scale and beyond the ladder interpolation is the accurate one
  if (f.patch && std::abs(lambda) < lmin) return interp_patch(*f.patch, lambda);
  // Inside the cutoff gap, regular full-line data is bridged linearly across
  // (-lmin, lmin); a one-sided power extension would put a jump at 0 for data
  // of odd symmetry, which derivative resampling then amplifies.
  if (!g.half_line() && f.vanish_order >= 0.0 && std::abs(lambda) < lmin) {
    const auto pos = half_view(g, false);
    const auto neg = half_view(g, true);
    const cplx lo = f.values[neg.array_index(0)];
    const cplx hi = f.values[pos.array_index(0)];
    return lo + (lambda + lmin) / (2.0 * lmin) * (hi - lo);
  }
  if (lambda == 0.0) lambda = lmin * 1e-3;  // below-cutoff path
  if (g.half_line() && lambda < 0.0) return {0.0, 0.0};
  const bool negative = lambda < 0.0;
  const auto hv = half_view(g, negative);
  const double x = std::abs(lambda);
  const double h = g.log_step();
  const double u = std::log(x / lmin) / h;  // ladder coordinate
  const size_t m = hv.per_half - 1;
  if (u > static_cast<double>(m) + 1e-12) return {0.0, 0.0};
  if (u < 0.0) {
    const cplx inner_val = f.values[hv.array_index(0)];
    return inner_val * std::pow(x / lmin, f.vanish_order);
  }
  long j = static_cast<long>(std::floor(u)) - 1;
  j = std::clamp<long>(j, 0, static_cast<long>(m) - 3);
  // 4-point Lagrange on the uniform ladder
  cplx result{0.0, 0.0};
  for (long k = j; k < j + 4; ++k) {
    double w = 1.0;
    for (long l = j; l < j + 4; ++l) {
      if (l == k) continue;
      w *= (u - static_cast<double>(l)) / static_cast<double>(k - l);
    }
    result += w * f.values[hv.array_index(static_cast<size_t>(k))];
  }
  return result;
}

cplx inner(const ModelVector& f, const ModelVector& g) {
  check_same_grid(f, g);
  cplx s{0.0, 0.0};
  const auto& w = f.grid->weights();
  for (size_t i = 0; i < f.values.size(); ++i)
    s += w[i] * f.values[i] * std::conj(g.values[i]);
  return s + head_pair(f, g);
}

double norm(const ModelVector& f) {
  const double n2 = inner(f, f).real();
  return n2 > 0.0 ? std::sqrt(n2) : 0.0;
}

double trimmed_norm(const ModelVector& f, size_t skip) {
  const auto& g = *f.grid;
  const auto& w = g.weights();
  double total = 0.0;
  const int halves = g.half_line() ? 1 : 2;
  for (int side = 0; side < halves; ++side) {
    const bool negative = (halves == 2 && side == 0);
    const auto hv = half_view(g, negative);
    for (size_t j = skip; j < hv.per_half; ++j) {
      const size_t i = hv.array_index(j);
      total += w[i] * std::norm(f.values[i]);
    }
  }
  return std::sqrt(total);
}

void ensure_compatible(const ModelVector& f, const IrrepParams& irrep) {
  if (!f.grid) throw DomainError("vector has no grid");
  if (f.grid->half_line() != irrep.half_line())
    throw DomainError("grid support does not match the series");
  if (std::abs(f.grid->re_varpi() - irrep.re_varpi()) > 1e-12)
    throw DomainError("grid weight does not match Re varpi of the representation");
}

double weighted_norm(const ModelVector& f, const IrrepParams& irrep) {
  ensure_compatible(f, irrep);
  return norm(f);
}

ModelVector operator*(cplx c, const ModelVector& f) {
  ModelVector out = f;
  for (auto& v : out.values) v *= c;
  out.patch = patch_multiply(f, [c](double) { return c; });
  return out;
}

namespace {

PatchPtr patch_combine(const ModelVector& f, const ModelVector& g, double sign) {
  if (!f.patch || !g.patch) return nullptr;
  auto p = std::make_shared<EdgePatch>(*f.patch);
  for (size_t k = 0; k < p->values.size(); ++k) p->values[k] += sign * g.patch->values[k];
  return p;
}

}  // namespace

ModelVector operator+(const ModelVector& f, const ModelVector& g) {
  check_same_grid(f, g);
  ModelVector out = f;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += g.values[i];
  out.vanish_order = std::min(f.vanish_order, g.vanish_order);
  out.patch = patch_combine(f, g, 1.0);
  return out;
}

ModelVector operator-(const ModelVector& f, const ModelVector& g) {
  check_same_grid(f, g);
  ModelVector out = f;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] -= g.values[i];
  out.vanish_order = std::min(f.vanish_order, g.vanish_order);
  out.patch = patch_combine(f, g, -1.0);
  return out;
}

FlowResult flow_apply(const ModelVector& f, Flow flow, double time, const IrrepParams& irrep) {
  ensure_compatible(f, irrep);
  FlowResult out;
  out.vec = f;
  if (flow == Flow::Horocycle) {
    for (size_t i = 0; i < f.values.size(); ++i) {
      const double lam = f.grid->node(i);
      out.vec.values[i] = f.values[i] * std::exp(cplx(0.0, -lam * time));
    }
    out.vec.patch =
        patch_multiply(f, [time](double x) { return std::exp(cplx(0.0, -x * time)); });
    return out;
  }
  const double s = time;
  const cplx pref = std::exp(-(irrep.varpi - 1.0) * s);
  const double scale = std::exp(2.0 * s);
  for (size_t i = 0; i < f.values.size(); ++i)
    out.vec.values[i] = pref * value_at(f, scale * f.grid->node(i));
  if (f.patch) {
    auto p = std::make_shared<EdgePatch>(*f.patch);
    for (size_t k = 0; k < p->values.size(); ++k)
      p->values[k] = pref * value_at(f, scale * (p->x0 + p->delta * static_cast<double>(k)));
    out.vec.patch = std::move(p);
  }

  // Mass of f outside the representable window [e^{2s} l_min, e^{2s} l_max].
  const double lo = scale * f.grid->config().lambda_min;
  const double hi = scale * f.grid->config().lambda_max;
  double lost = 0.0, total = 0.0;
  for (size_t i = 0; i < f.values.size(); ++i) {
    const double mass = f.grid->weight(i) * std::norm(f.values[i]);
    total += mass;
    const double x = std::abs(f.grid->node(i));
    if (x < lo || x > hi) lost += mass;
  }
  out.aliasing_loss = total > 0.0 ? lost / total : 0.0;
  return out;
}

namespace {

// 4th-order first and second derivatives on the uniform ladder, shifted
// stencils at the edges, input ordered by ladder index. Stencil sums run over
// differences from the center node (all these stencils annihilate constants),
// so cancellation roundoff tracks the local variation rather than the values.
void ladder_derivatives(const std::vector<cplx>& f, double h, std::vector<cplx>& d1,
                        std::vector<cplx>& d2) {
  const size_t n = f.size();
  if (n < 7) throw ResolutionError("grid too coarse for the derivative stencil");
  d1.assign(n, {});
  d2.assign(n, {});
  const double ih = 1.0 / (12.0 * h), ih2 = 1.0 / (12.0 * h * h);
  for (size_t j = 2; j + 2 < n; ++j) {
    const cplx c = f[j];
    d1[j] = (-(f[j + 2] - c) + 8.0 * (f[j + 1] - c) - 8.0 * (f[j - 1] - c) +
             (f[j - 2] - c)) * ih;
    d2[j] = (-(f[j + 2] - c) + 16.0 * (f[j + 1] - c) + 16.0 * (f[j - 1] - c) -
             (f[j - 2] - c)) * ih2;
  }
  // 5-point stencils at the first/last two nodes, rebased at the target node:
  // weights act on points [0..4] counted from the boundary (mirrored at the top,
  // with the sign flip for odd derivatives).
  static constexpr double kD1a[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};  // at point 0
  static constexpr double kD1b[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};    // at point 1
  static constexpr double kD2a[5] = {35.0, -104.0, 114.0, -56.0, 11.0};
  static constexpr double kD2b[5] = {11.0, -20.0, 6.0, 4.0, -1.0};
  auto apply5 = [&](size_t target, bool top, const double (&w)[5], double scale) {
    const cplx c = f[target];
    cplx s{0.0, 0.0};
    for (size_t k = 0; k < 5; ++k) {
      const size_t idx = top ? (n - 1 - k) : k;
      s += w[k] * (f[idx] - c);
    }
    return s * scale;
  };
  d1[0] = apply5(0, false, kD1a, ih);
  d1[1] = apply5(1, false, kD1b, ih);
  d2[0] = apply5(0, false, kD2a, ih2);
  d2[1] = apply5(1, false, kD2b, ih2);
  d1[n - 1] = apply5(n - 1, true, kD1a, -ih);
  d1[n - 2] = apply5(n - 2, true, kD1b, -ih);
  d2[n - 1] = apply5(n - 1, true, kD2a, ih2);
  d2[n - 2] = apply5(n - 2, true, kD2b, ih2);
}

}  // namespace

namespace {

// V on ladder data is ill-conditioned near the spectral edge: the 1/lambda
// chain-rule factor turns stencil errors into a lambda^{-k} mode under
// iteration. For data regular at the edge, V is therefore evaluated from a
// uniform-lambda resample below kHybridOuter (where the lambda-form
// i((varpi-1) f' - lambda f'') has bounded coefficients) and blended
// smoothly into the ladder values.
constexpr double kHybridOuter = 0.1;
constexpr double kHybridPure = 0.02;

double hybrid_blend(double abs_lam) {
  if (abs_lam <= kHybridPure) return 1.0;
  if (abs_lam >= kHybridOuter) return 0.0;
  const double z = std::log(abs_lam / kHybridPure) / std::log(kHybridOuter / kHybridPure);
  return 1.0 - z * z * (3.0 - 2.0 * z);
}

void uniform_derivatives(const std::vector<cplx>& f, double delta, std::vector<cplx>& d1,
                         std::vector<cplx>& d2) {
  // identical stencil layout to the ladder case, at uniform spacing delta
  ladder_derivatives(f, delta, d1, d2);
}

cplx interp_uniform(const std::vector<cplx>& arr, double x0, double delta, double x) {
  const double t = (x - x0) / delta;
  long j = static_cast<long>(std::floor(t)) - 1;
  j = std::clamp<long>(j, 0, static_cast<long>(arr.size()) - 4);
  cplx result{0.0, 0.0};
  for (long k = j; k < j + 4; ++k) {
    double w = 1.0;
    for (long l = j; l < j + 4; ++l) {
      if (l == k) continue;
      w *= (t - static_cast<double>(l)) / static_cast<double>(k - l);
    }
    result += w * arr[static_cast<size_t>(k)];
  }
  return result;
}

}  // namespace

ModelVector apply_generator(const ModelVector& f, Generator gen, const IrrepParams& irrep) {
  ensure_compatible(f, irrep);
  ModelVector out = f;
  if (gen == Generator::U) {
    for (size_t i = 0; i < f.values.size(); ++i)
      out.values[i] = cplx(0.0, -f.grid->node(i)) * f.values[i];
    out.vanish_order = f.vanish_order + 1.0;
    out.patch = patch_multiply(f, [](double x) { return cplx(0.0, -x); });
    return out;
  }
  const auto& g = *f.grid;
  const double h = g.log_step();
  const cplx vp1 = irrep.varpi - 1.0;
  const int halves = g.half_line() ? 1 : 2;
  for (int side = 0; side < halves; ++side) {
    const bool negative = (halves == 2 && side == 0);
    const auto hv = half_view(g, negative);
    std::vector<cplx> vals(hv.per_half);
    for (size_t j = 0; j < hv.per_half; ++j) vals[j] = f.values[hv.array_index(j)];
    std::vector<cplx> d1, d2;
    ladder_derivatives(vals, h, d1, d2);
    for (size_t j = 0; j < hv.per_half; ++j) {
      const size_t i = hv.array_index(j);
      const double lam = g.node(i);
      if (gen == Generator::X) {
        // 2 lambda f' - (varpi - 1) f, with lambda d/dlambda = d/du
        out.values[i] = 2.0 * d1[j] - vp1 * vals[j];
      } else {
        // V = (i/lambda)(varpi f_u - f_uu)
        out.values[i] = cplx(0.0, 1.0) * (irrep.varpi * d1[j] - d2[j]) / lam;
      }
    }
  }

  // Uniform-lambda patch derivatives: exact-coefficient evaluation of X and V
  // near the edge; V ladder values inside the blend window are replaced.
  if (f.patch) {
    const auto& p = *f.patch;
    std::vector<cplx> d1u, d2u;
    uniform_derivatives(p.values, p.delta, d1u, d2u);
    auto px = std::make_shared<EdgePatch>(p);
    for (size_t k = 0; k < p.values.size(); ++k) {
      const double x = p.x0 + p.delta * static_cast<double>(k);
      if (gen == Generator::X)
        px->values[k] = 2.0 * x * d1u[k] - vp1 * p.values[k];
      else
        px->values[k] = cplx(0.0, 1.0) * (vp1 * d1u[k] - x * d2u[k]);
    }
    if (gen == Generator::V) {
      for (size_t i = 0; i < out.values.size(); ++i) {
        const double lam = g.node(i);
        const double w = hybrid_blend(std::abs(lam));
        if (w <= 0.0) continue;
        const cplx fp = interp_uniform(d1u, p.x0, p.delta, lam);
        const cplx fpp = interp_uniform(d2u, p.x0, p.delta, lam);
        const cplx v_hybrid = cplx(0.0, 1.0) * (vp1 * fp - lam * fpp);
        out.values[i] = w * v_hybrid + (1.0 - w) * out.values[i];
      }
    }
    out.patch = std::move(px);
  } else if (gen == Generator::V && f.vanish_order >= 0.0 && grid_wants_patch(g)) {
    // patchless fallback: resample once and use the uniform-lambda form
    const double delta = kPatchDelta;
    const double x0 = g.half_line() ? 0.0 : -kPatchExtent;
    const size_t count = static_cast<size_t>((kPatchExtent - x0) / delta) + 1;
    std::vector<cplx> samples(count);
    for (size_t k = 0; k < count; ++k)
      samples[k] = value_at(f, x0 + delta * static_cast<double>(k));
    std::vector<cplx> d1u, d2u;
    uniform_derivatives(samples, delta, d1u, d2u);
    for (size_t i = 0; i < out.values.size(); ++i) {
      const double lam = g.node(i);
      const double w = hybrid_blend(std::abs(lam));
      if (w <= 0.0) continue;
      const cplx fp = interp_uniform(d1u, x0, delta, lam);
      const cplx fpp = interp_uniform(d2u, x0, delta, lam);
      const cplx v_hybrid = cplx(0.0, 1.0) * (vp1 * fp - lam * fpp);
      out.values[i] = w * v_hybrid + (1.0 - w) * out.values[i];
    }
  }

  if (gen == Generator::X) {
    out.vanish_order = f.vanish_order;
  } else {
    // V lowers the vanishing order by one, but data regular at the edge stays
    // regular (V of an analytic profile is analytic)
    out.vanish_order =
        f.vanish_order >= 0.0 ? std::max(f.vanish_order - 1.0, 0.0) : f.vanish_order - 1.0;
  }
  return out;
}

namespace {

// Oscillatory inner product \int f conj(g) |lambda|^{-re} e^{-i lambda t} dlambda,
// cubic resampling of the smooth part on 4 subcells per grid cell.
cplx filon_pair(const ModelVector& f, const ModelVector& g, double t) {
  const auto& grid = *f.grid;
  const double re = grid.re_varpi();
  const double lmin = grid.config().lambda_min;
  const double h = grid.log_step();
  const int halves = grid.half_line() ? 1 : 2;
  cplx total{0.0, 0.0};
  for (int side = 0; side < halves; ++side) {
    const bool negative = (halves == 2 && side == 0);
    const auto hv = half_view(grid, negative);
    const double sign = negative ? -1.0 : 1.0;
    ModelVector prod = f;  // smooth part f * conj(g) reused for resampling
    prod.vanish_order = f.vanish_order + g.vanish_order;
    for (size_t i = 0; i < prod.values.size(); ++i)
      prod.values[i] = f.values[i] * std::conj(g.values[i]);
    if (f.patch && g.patch) {
      auto pp = std::make_shared<EdgePatch>(*f.patch);
      for (size_t k = 0; k < pp->values.size(); ++k)
        pp->values[k] *= std::conj(g.patch->values[k]);
      prod.patch = std::move(pp);
    } else {
      prod.patch.reset();
    }
    const size_t m = hv.per_half - 1;
    for (size_t j = 0; j < m; ++j) {
      const double ua = std::log(lmin) + h * static_cast<double>(j);
      for (int sub = 0; sub < 4; ++sub) {
        const double u1 = ua + h * (sub / 4.0);
        const double u2 = ua + h * ((sub + 1) / 4.0);
        const double x1 = sign * std::exp(u1), x2 = sign * std::exp(u2);
        const cplx p1 = value_at(prod, x1) * std::pow(std::abs(x1), -re);
        const cplx p2 = value_at(prod, x2) * std::pow(std::abs(x2), -re);
        const double a = std::min(x1, x2), b = std::max(x1, x2);
        const cplx ga = (a == x1) ? p1 : p2;
        const cplx gb = (b == x2) ? p2 : p1;
        total += quad::oscillatory_cell(a, b, ga, gb, t);
      }
    }
    // singular head below the cutoff; |lambda t| <= lmin * t is negligible here
    const double p = f.vanish_order + g.vanish_order + 1.0 - re;
    if (p > 1e-9) {
      const cplx inner_val =
          f.values[hv.array_index(0)] * std::conj(g.values[hv.array_index(0)]);
      total += inner_val * std::pow(lmin, 1.0 - re) / p;
    }
  }
  return total;
}

}  // namespace

cplx matrix_coefficient(const ModelVector& f, const ModelVector& g, Flow flow,
                        double time, const IrrepParams& irrep) {
  ensure_compatible(f, irrep);
  check_same_grid(f, g);
  if (flow == Flow::Geodesic) {
    auto fr = flow_apply(f, Flow::Geodesic, time, irrep);
    return inner(fr.vec, g);
  }
  if (std::abs(time) <= 1.0) {
    auto fr = flow_apply(f, Flow::Horocycle, time, irrep);
    return inner(fr.vec, g);
  }
  return filon_pair(f, g, time);
}

double sobolev_norm(const ModelVector& f, std::span<const Generator> gens, int order,
                    const IrrepParams& irrep) {
  if (order < 0) throw DomainError("sobolev_norm requires order >= 0");
  ensure_compatible(f, irrep);
  const double n0 = norm(f);
  double total = n0 * n0;
  std::vector<ModelVector> level = {f};
  for (int d = 1; d <= order; ++d) {
    std::vector<ModelVector> next;
    next.reserve(level.size() * gens.size());
    for (const auto& v : level)
      for (auto gen : gens) {
        next.push_back(apply_generator(v, gen, irrep));
        const double w = trimmed_norm(next.back());
        total += w * w;
      }
    level = std::move(next);
  }
  return std::sqrt(total);
}

nlohmann::json to_json(const IrrepParams& p) {
  nlohmann::json j;
  j["series"] = to_string(p.series);
  j["mu"] = p.mu;
  j["varpi"] = {p.varpi.real(), p.varpi.imag()};
  j["nu0"] = p.nu0;
  if (p.series == Series::Discrete) j["n"] = p.n;
  return j;
}

nlohmann::json to_json(const GridConfig& cfg) {
  nlohmann::json j;
  j["lambda_min"] = cfg.lambda_min;
  j["lambda_max"] = cfg.lambda_max;
  j["ratio"] = cfg.ratio;
  return j;
}

}  // namespace fracmix::sl2
