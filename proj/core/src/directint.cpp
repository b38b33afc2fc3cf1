#include "fracmix/directint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracmix::directint {

double spectral_gap(const DirectIntegralModel& model) {
  if (model.components.empty()) throw DomainError("direct integral has no components");
  double g = std::numeric_limits<double>::infinity();
  for (const auto& c : model.components) {
    if (!(c.weight > 0.0)) throw DomainError("component weights must be positive");
    g = std::min(g, c.irrep.optimal_rate());
  }
  return g;
}

std::vector<int> TensorModel::numeric_axes() const {
  std::vector<int> axes;
  for (int i = 0; i < n(); ++i)
    if (factors[i].grid) axes.push_back(i);
  return axes;
}

TensorModel make_tensor_model(const std::vector<DirectIntegralModel>& models, double eps,
                              const sl2::GridConfig& cfg) {
  if (models.empty()) throw ConfigError("tensor model needs at least one factor");
  TensorModel tm;
  tm.eps = eps;
  for (const auto& m : models) {
    TensorModel::Factor f;
    f.model = m;
    if (m.field == FieldLabel::Real) {
      const double gap = spectral_gap(m);
      // the grid lives in a gap-realizing component
      for (const auto& c : m.components)
        if (c.irrep.optimal_rate() == gap) {
          f.numeric = c.irrep;
          break;
        }
      f.grid = sl2::make_grid(f.numeric, cfg);
    }
    tm.factors.push_back(std::move(f));
  }
  return tm;
}

namespace {

std::vector<size_t> strides_of(const std::vector<size_t>& shape) {
  std::vector<size_t> st(shape.size(), 1);
  for (int a = static_cast<int>(shape.size()) - 2; a >= 0; --a)
    st[a] = st[a + 1] * shape[a + 1];
  return st;
}

void check_axis(const TensorVector& t, int axis) {
  if (axis < 0 || axis >= static_cast<int>(t.shape.size()))
    throw DomainError("tensor axis out of range");
}

template <typename Fn>
void for_each_line(TensorVector& t, int axis, Fn&& fn) {
  const auto st = strides_of(t.shape);
  const size_t n_axis = t.shape[axis];
  const size_t lines = t.values.size() / n_axis;
  std::vector<cplx> line(n_axis);
  for (size_t l = 0; l < lines; ++l) {
    // decode l into indices of the other axes, then find the base offset
    size_t rem = l, base = 0;
    for (size_t a = 0; a < t.shape.size(); ++a) {
      if (static_cast<int>(a) == axis) continue;
      size_t block = 1;
      for (size_t b = a + 1; b < t.shape.size(); ++b)
        if (static_cast<int>(b) != axis) block *= t.shape[b];
      const size_t idx = rem / block;
      rem %= block;
      base += idx * st[a];
    }
    for (size_t j = 0; j < n_axis; ++j) line[j] = t.values[base + j * st[axis]];
    fn(line);
    for (size_t j = 0; j < n_axis; ++j) t.values[base + j * st[axis]] = line[j];
  }
}

}  // namespace

namespace {

void rebuild_dense(TensorVector& t) {
  const auto st = strides_of(t.shape);
  for (size_t i = 0; i < t.values.size(); ++i) {
    size_t rem = i;
    cplx v(1.0, 0.0);
    for (size_t a = 0; a < t.shape.size(); ++a) {
      const size_t idx = rem / st[a];
      rem %= st[a];
      v *= t.factors[a].values[idx];
    }
    t.values[i] = v;
  }
}

}  // namespace

TensorVector tensor_product(const std::vector<ModelVector>& axis_profiles) {
  if (axis_profiles.empty()) throw DomainError("tensor_product of nothing");
  TensorVector t;
  size_t total = 1;
  for (const auto& p : axis_profiles) {
    t.grids.push_back(p.grid);
    t.shape.push_back(p.size());
    t.vanish.push_back(p.vanish_order);
    total *= p.size();
  }
  t.factors = axis_profiles;
  t.values.assign(total, cplx(1.0, 0.0));
  rebuild_dense(t);
  return t;
}

double tnorm(const TensorVector& t) {
  const auto st = strides_of(t.shape);
  double total = 0.0;
  for (size_t i = 0; i < t.values.size(); ++i) {
    size_t rem = i;
    double w = 1.0;
    for (size_t a = 0; a < t.shape.size(); ++a) {
      const size_t idx = rem / st[a];
      rem %= st[a];
      w *= t.grids[a]->weight(idx);
    }
    total += w * std::norm(t.values[i]);
  }
  return std::sqrt(total);
}

double tnorm_trimmed(const TensorVector& t, size_t skip) {
  const auto st = strides_of(t.shape);
  std::vector<double> threshold(t.shape.size());
  for (size_t a = 0; a < t.shape.size(); ++a)
    threshold[a] = t.grids[a]->config().lambda_min *
                   std::exp(static_cast<double>(skip) * t.grids[a]->log_step());
  double total = 0.0;
  for (size_t i = 0; i < t.values.size(); ++i) {
    size_t rem = i;
    double w = 1.0;
    bool keep = true;
    for (size_t a = 0; a < t.shape.size(); ++a) {
      const size_t idx = rem / st[a];
      rem %= st[a];
      if (std::abs(t.grids[a]->node(idx)) < threshold[a]) keep = false;
      w *= t.grids[a]->weight(idx);
    }
    if (keep) total += w * std::norm(t.values[i]);
  }
  return std::sqrt(total);
}

TensorVector frac_apply_axis(const TensorVector& t, int axis, double r) {
  check_axis(t, axis);
  if (r < 0.0) throw DomainError("frac_apply_axis requires r >= 0");
  TensorVector out = t;
  const auto st = strides_of(t.shape);
  for (size_t i = 0; i < t.values.size(); ++i) {
    const size_t idx = (i / st[axis]) % t.shape[axis];
    out.values[i] *= std::pow(std::abs(t.grids[axis]->node(idx)), r);
  }
  out.vanish[axis] += r;
  if (out.is_product()) out.factors[axis] = fracsolve::frac_apply(out.factors[axis], r);
  return out;
}

TensorVector cutoff_axis(const TensorVector& t, int axis,
                         const fracsolve::CutoffProfile& profile) {
  check_axis(t, axis);
  TensorVector out = t;
  const auto st = strides_of(t.shape);
  for (size_t i = 0; i < t.values.size(); ++i) {
    const size_t idx = (i / st[axis]) % t.shape[axis];
    out.values[i] *= profile(t.grids[axis]->node(idx));
  }
  if (out.is_product()) out.factors[axis] = fracsolve::cutoff_apply(out.factors[axis], profile);
  return out;
}

TensorVector sigma_apply_axis(const TensorVector& t, int axis, const IrrepParams& irrep,
                              int times) {
  check_axis(t, axis);
  if (times < 0) throw DomainError("sigma_apply_axis requires times >= 0");
  TensorVector out = t;
  if (out.is_product()) {
    // Sigma along one axis of a product acts on that factor alone; the 1-D
    // path keeps the edge patch, which is what makes iterated applications
    // accurate near lambda = 0.
    for (int rep = 0; rep < times; ++rep) {
      const ModelVector& fa = out.factors[axis];
      auto x2 = sl2::apply_generator(sl2::apply_generator(fa, sl2::Generator::X, irrep),
                                     sl2::Generator::X, irrep);
      auto v2 = sl2::apply_generator(sl2::apply_generator(fa, sl2::Generator::V, irrep),
                                     sl2::Generator::V, irrep);
      out.factors[axis] = fa - x2 - v2;
    }
    out.vanish[axis] = out.factors[axis].vanish_order;
    rebuild_dense(out);
    return out;
  }
  for (int rep = 0; rep < times; ++rep) {
    for_each_line(out, axis, [&](std::vector<cplx>& line) {
      ModelVector mv;
      mv.grid = t.grids[axis];
      mv.values = line;
      mv.vanish_order = t.vanish[axis];
      auto x2 = sl2::apply_generator(sl2::apply_generator(mv, sl2::Generator::X, irrep),
                                     sl2::Generator::X, irrep);
      auto v2 = sl2::apply_generator(sl2::apply_generator(mv, sl2::Generator::V, irrep),
                                     sl2::Generator::V, irrep);
      for (size_t j = 0; j < line.size(); ++j)
        line[j] = mv.values[j] - x2.values[j] - v2.values[j];
    });
  }
  return out;
}

double max_abs_diff(const TensorVector& a, const TensorVector& b) {
  if (a.shape != b.shape) throw DomainError("tensor shape mismatch");
  double dev = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i)
    dev = std::max(dev, std::abs(a.values[i] - b.values[i]));
  return dev;
}

fracsolve::CutoffDiagnostics axis_shell_sweep(const TensorVector& xi, int axis,
                                              const std::vector<double>& extra) {
  check_axis(xi, axis);
  if (extra.size() != xi.shape.size())
    throw DomainError("axis_shell_sweep: one exponent per axis required");
  const auto st = strides_of(xi.shape);
  std::vector<double> marginal(xi.shape[axis], 0.0);
  for (size_t i = 0; i < xi.values.size(); ++i) {
    size_t rem = i;
    double w = 1.0;
    size_t axis_idx = 0;
    for (size_t a = 0; a < xi.shape.size(); ++a) {
      const size_t idx = rem / st[a];
      rem %= st[a];
      if (static_cast<int>(a) == axis) axis_idx = idx;
      w *= xi.grids[a]->weight(idx) *
           std::pow(std::abs(xi.grids[a]->node(idx)), -2.0 * extra[a]);
    }
    marginal[axis_idx] += w * std::norm(xi.values[i]);
  }
  std::vector<double> lam(xi.shape[axis]);
  for (size_t j = 0; j < lam.size(); ++j) lam[j] = std::abs(xi.grids[axis]->node(j));
  return fracsolve::shells_from_masses(lam, marginal,
                                       xi.grids[axis]->config().lambda_min);
}

namespace {

std::vector<std::vector<int>> enumerate_branches(const TensorModel& model) {
  std::vector<int> complex_factors;
  for (int i = 0; i < model.n(); ++i)
    if (model.factors[i].model.field == FieldLabel::Complex) complex_factors.push_back(i);
  const size_t count = size_t{1} << complex_factors.size();
  std::vector<std::vector<int>> branches;
  for (size_t mask = 0; mask < count; ++mask) {
    std::vector<int> choice(model.n(), 0);
    for (size_t b = 0; b < complex_factors.size(); ++b)
      if (mask & (size_t{1} << b)) choice[complex_factors[b]] = 1;
    branches.push_back(std::move(choice));
  }
  return branches;
}

TensorVector zero_like(const TensorVector& t) {
  TensorVector z = t;
  std::fill(z.values.begin(), z.values.end(), cplx(0.0, 0.0));
  z.factors.clear();
  return z;
}

}  // namespace

TypeIISolution typeII_solve(const TensorVector& xi, const TypeIIProblem& problem,
                            const TensorModel& model) {
  if (static_cast<int>(problem.r.size()) != model.n())
    throw DomainError("type II problem needs one exponent per factor");
  for (int i = 0; i < model.n(); ++i) {
    if (problem.r[i] < 0.0) throw DomainError("type II exponents must be >= 0");
    if (problem.r[i] >= model.gamma(i))
      throw DomainError("type II precondition violated at factor " + std::to_string(i + 1) +
                        ": r = " + std::to_string(problem.r[i]) +
                        " >= gamma = " + std::to_string(model.gamma(i)));
  }
  const auto axes = model.numeric_axes();
  if (axes.size() != xi.shape.size())
    throw DomainError("tensor vector rank does not match the numeric factors");
  for (size_t a = 0; a < axes.size(); ++a)
    if (xi.grids[a].get() != model.factors[axes[a]].grid.get())
      throw DomainError("tensor vector grids do not match the model");

  std::vector<double> r_axis(axes.size());
  for (size_t a = 0; a < axes.size(); ++a) r_axis[a] = problem.r[axes[a]];

  // Inner-cutoff sweep per numeric axis; a divergent axis means the factor
  // division is not in L^2 for this datum even below the registry gap.
  for (size_t a = 0; a < axes.size(); ++a) {
    if (!(r_axis[a] > 0.0)) continue;
    auto diag = axis_shell_sweep(xi, static_cast<int>(a), r_axis);
    if (!diag.support_clear_of_zero && diag.growth_exponent > 0.0)
      throw TypeIIDivergence("factor " + std::to_string(axes[a] + 1) +
                                 " division diverges at the inner cutoff",
                             axes[a] + 1, diag);
  }

  TypeIISolution sol;
  const auto branches = enumerate_branches(model);
  const fracsolve::CutoffProfile cutoff;
  for (size_t b = 0; b < branches.size(); ++b) {
    BranchReport rep;
    rep.lambda_choice = branches[b];
    rep.carries_numeric = (b == 0);  // the all-U branch carries the grid data
    if (rep.carries_numeric) {
      rep.xi_part = xi;
      rep.omega = xi;
      rep.omega.factors.clear();  // the divided data is not differentiated again
      for (size_t a = 0; a < axes.size(); ++a)
        if (r_axis[a] > 0.0) {
          TensorVector next = rep.omega;
          const auto st = strides_of(next.shape);
          for (size_t i = 0; i < next.values.size(); ++i) {
            const size_t idx = (i / st[a]) % next.shape[a];
            next.values[i] *= std::pow(std::abs(next.grids[a]->node(idx)), -r_axis[a]);
          }
          next.vanish[a] -= r_axis[a];
          rep.omega = std::move(next);
        }
      rep.omega_norm = tnorm(rep.omega);

      // cutoff decomposition bookkeeping: low/high split per numeric axis
      const size_t pieces = size_t{1} << axes.size();
      for (size_t mask = 0; mask < pieces; ++mask) {
        TensorVector piece = rep.omega;
        std::string label;
        for (size_t a = 0; a < axes.size(); ++a) {
          const bool low = mask & (size_t{1} << a);
          label += (low ? "P" : "(1-P)");
          label += std::to_string(axes[a] + 1);
          const auto st = strides_of(piece.shape);
          for (size_t i = 0; i < piece.values.size(); ++i) {
            const size_t idx = (i / st[a]) % piece.shape[a];
            const double f = cutoff(piece.grids[a]->node(idx));
            piece.values[i] *= low ? f : (1.0 - f);
          }
        }
        rep.pieces.push_back({label, tnorm(piece)});
      }
    } else {
      rep.xi_part = zero_like(xi);
      rep.omega = zero_like(xi);
      rep.omega_norm = 0.0;
    }
    // structural record of the complex-factor three-way split
    for (int i = 0; i < model.n(); ++i) {
      if (model.factors[i].model.field != FieldLabel::Complex) continue;
      if (branches[b][i] == 0)
        rep.pieces.push_back({"factor" + std::to_string(i + 1) +
                                  ":(I-P1)xi -> |U|^r, L2-bounded",
                              0.0});
      else
        rep.pieces.push_back({"factor" + std::to_string(i + 1) +
                                  ":P2P1xi + (P1-P2P1)xi -> |iU|^r, zeta = 1+eps",
                              0.0});
    }
    sol.branches.push_back(std::move(rep));
  }

  // reconstruction: sum over branches of the branch operator applied to omega
  TensorVector rebuilt = zero_like(xi);
  for (const auto& br : sol.branches) {
    if (!br.carries_numeric) continue;
    TensorVector back = br.omega;
    for (size_t a = 0; a < axes.size(); ++a)
      if (r_axis[a] > 0.0) back = frac_apply_axis(back, static_cast<int>(a), r_axis[a]);
    for (size_t i = 0; i < rebuilt.values.size(); ++i)
      rebuilt.values[i] += back.values[i];
  }
  sol.reconstruction_error = max_abs_diff(rebuilt, xi);
  return sol;
}

EstimateCheck typeII_estimate_check(const TypeIISolution& sol, const TensorVector& xi,
                                    const TensorModel& model) {
  EstimateCheck check;
  const auto axes = model.numeric_axes();
  TensorVector budget = xi;
  for (size_t a = 0; a < axes.size(); ++a) {
    const int times = static_cast<int>(std::ceil(model.zeta(axes[a]) / 2.0));
    budget = sigma_apply_axis(budget, static_cast<int>(a), model.factors[axes[a]].numeric,
                              times);
  }
  check.sigma_budget = tnorm_trimmed(budget);
  for (const auto& br : sol.branches) {
    const double ratio =
        br.carries_numeric ? br.omega_norm / std::max(check.sigma_budget, 1e-300) : 0.0;
    check.per_branch_ratio.push_back(ratio);
    check.max_ratio = std::max(check.max_ratio, ratio);
  }
  return check;
}

WitnessReport sharpness_witness(const TensorModel& model, int factor_index, double r_i,
                                const TypeIIProblem& base) {
  if (factor_index < 0 || factor_index >= model.n())
    throw DomainError("factor index out of range");
  const double gap = model.gamma(factor_index);
  if (!(r_i > gap))
    throw DomainError("not a witness regime: r must exceed the factor gap");
  if (!model.factors[factor_index].grid)
    throw ConfigError("sharpness witness needs a numeric gap-realizing component");

  WitnessReport rep;
  rep.chosen_c = 0.5 * (gap + r_i);

  const auto axes = model.numeric_axes();
  std::vector<ModelVector> profiles;
  std::vector<double> r_axis(axes.size());
  for (size_t a = 0; a < axes.size(); ++a) {
    const int i = axes[a];
    const auto& f = model.factors[i];
    ModelVector v = (f.numeric.series == sl2::Series::Discrete)
                        ? sl2::discrete_profile(f.grid, f.numeric.n)
                        : sl2::edge_gaussian(f.grid);
    if (i != factor_index) v = fracsolve::cutoff_apply(v);  // smoothed directions
    profiles.push_back(std::move(v));
    r_axis[a] = (i == factor_index) ? r_i : base.r.at(i);
    if (i != factor_index && r_axis[a] >= model.gamma(i))
      throw DomainError("witness requires the untested exponents below their gaps");
  }
  TensorVector xi = tensor_product(profiles);

  int witness_axis = -1;
  for (size_t a = 0; a < axes.size(); ++a)
    if (axes[a] == factor_index) witness_axis = static_cast<int>(a);

  rep.all_divergent = true;
  for (const auto& choice : enumerate_branches(model)) {
    (void)choice;  // numeric content identical across structural branches
    auto diag = axis_shell_sweep(xi, witness_axis, r_axis);
    const bool divergent = !diag.support_clear_of_zero && diag.growth_exponent > 0.0;
    rep.branch_exponents.push_back(diag.growth_exponent);
    rep.diagnostics.push_back(std::move(diag));
    if (!divergent) rep.all_divergent = false;
  }
  return rep;
}

nlohmann::json to_json(const DirectIntegralModel& m) {
  nlohmann::json j;
  j["field"] = m.field == FieldLabel::Complex ? "C" : "R";
  j["components"] = nlohmann::json::array();
  for (const auto& c : m.components)
    j["components"].push_back({{"irrep", sl2::to_json(c.irrep)}, {"weight", c.weight}});
  j["spectral_gap"] = spectral_gap(m);
  return j;
}

nlohmann::json to_json(const TensorModel& m) {
  nlohmann::json j;
  j["eps"] = m.eps;
  j["factors"] = nlohmann::json::array();
  for (int i = 0; i < m.n(); ++i) {
    nlohmann::json f = to_json(m.factors[i].model);
    f["gamma"] = m.gamma(i);
    f["zeta"] = m.zeta(i);
    f["numeric"] = static_cast<bool>(m.factors[i].grid);
    j["factors"].push_back(std::move(f));
  }
  return j;
}

}  // namespace fracmix::directint
