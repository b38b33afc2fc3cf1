#include "fracmix/mixsched.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracmix::mixsched {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// 1-based max-gap pair (i, j), i < j, smallest pair on ties.
std::pair<int, int> max_gap_pair(const GapConfiguration& cfg) {
  const int n = cfg.n();
  double best = -1.0;
  std::pair<int, int> pair{1, 2};
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double d = sq_dist(cfg.t_vectors[i - 1], cfg.t_vectors[j - 1]);
      if (d > best * (1.0 + 1e-15)) {
        best = d;
        pair = {i, j};
      }
    }
  return pair;
}

void validate_config(const GapConfiguration& cfg) {
  if (cfg.m() < 1) throw DomainError("configuration needs at least one generator");
  if (cfg.n() < 2) throw DomainError("configuration needs at least two points");
  for (const auto& t : cfg.t_vectors)
    if (static_cast<int>(t.size()) != cfg.m())
      throw DomainError("t vector length must equal the generator count");
}

}  // namespace

double root_log_value(const GapConfiguration& cfg, const RootVec& beta,
                      std::span<const double> t) {
  double s = 0.0;
  for (int k = 0; k < cfg.m(); ++k) {
    const auto& g = cfg.generators[k];
    if (g.size() != beta.size()) throw DomainError("generator dimension mismatch");
    double dot = 0.0;
    for (size_t c = 0; c < g.size(); ++c) dot += beta[c] * g[c];
    s += t[k] * dot;
  }
  return s;
}

double root_log_gap(const GapConfiguration& cfg, const RootVec& beta, int i, int j) {
  std::vector<double> diff(cfg.m());
  for (int k = 0; k < cfg.m(); ++k)
    diff[k] = cfg.t_vectors[i - 1][k] - cfg.t_vectors[j - 1][k];
  return root_log_value(cfg, beta, diff);
}

CartanElement cartan_of(const GapConfiguration& cfg, std::span<const double> t) {
  const size_t dim = cfg.generators[0].size();
  CartanElement a;
  a.log_coords.assign(dim, 0.0);
  for (int k = 0; k < cfg.m(); ++k)
    for (size_t c = 0; c < dim; ++c) a.log_coords[c] += t[k] * cfg.generators[k][c];
  return a;
}

CartanElement cartan_of_gap(const GapConfiguration& cfg, int i, int j) {
  std::vector<double> diff(cfg.m());
  for (int k = 0; k < cfg.m(); ++k)
    diff[k] = cfg.t_vectors[i - 1][k] - cfg.t_vectors[j - 1][k];
  return cartan_of(cfg, diff);
}

RootChoice choose_root_index(const GapConfiguration& cfg,
                             const StronglyOrthogonalSystem& sos,
                             const SpectralGapProfile& gaps, double eps,
                             const RootSystem& rs) {
  validate_config(cfg);
  gaps.validate();
  const int l = static_cast<int>(sos.members.size());
  if (l == 0) throw DomainError("empty strongly orthogonal system");
  if (gaps.gamma.size() != sos.members.size())
    throw DomainError("profile size does not match the SOS");

  auto [p, q] = max_gap_pair(cfg);

  // per-root oriented gap magnitudes c_i |log beta_i(a^{t_p - t_q})|
  std::vector<double> log_beta(l), weighted(l);
  double orient_sum = 0.0;
  for (int i = 0; i < l; ++i) {
    log_beta[i] = root_log_gap(cfg, sos.members[i], p, q);
    weighted[i] = (gaps.gamma[i] - 0.5 * eps) * std::abs(log_beta[i]);
    orient_sum += weighted[i];
  }
  const double scale = *std::max_element(weighted.begin(), weighted.end());
  if (scale <= 1e-14)
    throw DomainError("degenerate gap configuration: every root value equals 1");

  // orientationwise pigeonhole: max_i weighted_i >= (1/l) sum_i weighted_i
  int best = 0;
  for (int i = 1; i < l; ++i)
    if (weighted[i] > weighted[best] * (1.0 + 1e-15)) best = i;

  RootChoice choice;
  choice.index = best + 1;
  // orientation: the reference end makes log beta_{i0}(a^{t_ref - t_one}) > 0
  if (log_beta[best] > 0.0) {
    choice.reference = p;
    choice.one = q;
  } else {
    choice.reference = q;
    choice.one = p;
  }
  choice.log_beta_gap = std::abs(log_beta[best]);

  // the stricter ambient-a^+ form of the inequality, reported as a flag
  const double ambient_eta =
      rootsys::eta_epsilon(sos, cartan_of_gap(cfg, p, q), gaps, 0.5 * eps, rs);
  choice.ambient_inequality =
      std::log(ambient_eta) / l >= -weighted[best] - 1e-12 * std::abs(weighted[best]);
  return choice;
}

PartitionPlan build_partition(const GapConfiguration& cfg,
                              const StronglyOrthogonalSystem& sos, int i0, int k) {
  validate_config(cfg);
  if (cfg.n() != k + 1) throw DomainError("build_partition needs n = k+1 points");
  if (i0 < 1 || i0 > static_cast<int>(sos.members.size()))
    throw DomainError("root index out of range");
  const RootVec& beta = sos.members[i0 - 1];

  // ordering preconditions
  const double max_sq = sq_dist(cfg.t_vectors[0], cfg.t_vectors[k]);
  for (int i = 1; i <= k + 1; ++i)
    for (int j = i + 1; j <= k + 1; ++j)
      if (sq_dist(cfg.t_vectors[i - 1], cfg.t_vectors[j - 1]) > max_sq * (1.0 + 1e-12))
        throw DomainError("ordering error: ||t_1 - t_{k+1}|| is not the maximal gap");

  std::vector<double> v(k + 1);  // v[i] = log beta(a^{t_{k+1} - t_i}), 1-based
  for (int i = 1; i <= k; ++i) v[i] = root_log_gap(cfg, beta, k + 1, i);
  if (!(v[1] > 0.0))
    throw DomainError("ordering error: beta_{i0}(a^{t_{k+1}-t_1}) must exceed 1");

  PartitionPlan plan;
  plan.i0 = i0;
  plan.k = k;
  for (int i = 1; i <= k; ++i)
    (v[i] > 0.0 ? plan.d1 : plan.d2).push_back(i);

  double log_c = 0.0;
  for (int i : plan.d1) log_c = std::max(log_c, v[i]);
  plan.log_c = log_c;

  // valid pigeonhole subintervals: no D1 value strictly inside. Values
  // attaining c sit on the closed top endpoint by construction; the explicit
  // exclusion keeps them from leaking into the last subinterval through
  // floating-point rounding of c^{(j+1)/k}.
  auto valid = [&](int j) {
    const double lo = log_c * j / k, hi = log_c * (j + 1) / k;
    for (int i : plan.d1) {
      if (v[i] >= log_c * (1.0 - 1e-14)) continue;
      if (v[i] > lo && v[i] < hi) return false;
    }
    return true;
  };
  int chosen = -1;
  for (int j = 0; j < k; ++j)
    if (valid(j) && log_c * (j + 1) / k <= v[1]) {
      chosen = j;
      plan.one_in_d12_achievable = true;
      break;
    }
  if (chosen < 0) {
    for (int j = 0; j < k; ++j)
      if (valid(j)) {
        chosen = j;
        break;
      }
  }
  if (chosen < 0) throw Error("pigeonhole failed to find a value-free subinterval");
  plan.j = chosen;

  const double lo = log_c * chosen / k, hi = log_c * (chosen + 1) / k;
  for (int i : plan.d1)
    (v[i] <= lo ? plan.d11 : plan.d12).push_back(i);
  plan.one_in_d12 =
      std::find(plan.d12.begin(), plan.d12.end(), 1) != plan.d12.end();
  (void)hi;

  if (plan.d11.empty()) {
    plan.q1 = k + 1;
  } else {
    plan.q1 = plan.d11.front();
    for (int i : plan.d11)
      if (v[i] > v[plan.q1]) plan.q1 = i;
  }
  if (plan.d12.empty()) throw Error("upper pigeonhole block is empty");
  plan.q2 = plan.d12.front();
  for (int i : plan.d12)
    if (v[i] < v[plan.q2]) plan.q2 = i;
  return plan;
}

VerifyResult verify_partition(const PartitionPlan& plan, const GapConfiguration& cfg,
                              const StronglyOrthogonalSystem& sos) {
  VerifyResult result;
  auto fail = [&](const std::string& what) {
    result.ok = false;
    result.violations.push_back(what);
  };
  const int k = plan.k;
  const RootVec& beta = sos.members[plan.i0 - 1];
  std::vector<double> v(k + 1);
  for (int i = 1; i <= k; ++i) v[i] = root_log_gap(cfg, beta, k + 1, i);
  const double tol = 1e-9 * std::max(1.0, std::abs(plan.log_c));

  // partition structure
  std::vector<int> all = plan.d1;
  all.insert(all.end(), plan.d2.begin(), plan.d2.end());
  std::sort(all.begin(), all.end());
  std::vector<int> expect(k);
  for (int i = 0; i < k; ++i) expect[i] = i + 1;
  if (all != expect) fail("D1 and D2 do not partition {1..k}");
  std::vector<int> d1_split = plan.d11;
  d1_split.insert(d1_split.end(), plan.d12.begin(), plan.d12.end());
  std::sort(d1_split.begin(), d1_split.end());
  std::vector<int> d1_sorted = plan.d1;
  std::sort(d1_sorted.begin(), d1_sorted.end());
  if (d1_split != d1_sorted) fail("D11 and D12 do not partition D1");
  if (std::find(plan.d1.begin(), plan.d1.end(), 1) == plan.d1.end())
    fail("index 1 is not in D1");
  if (plan.one_in_d12_achievable && !plan.one_in_d12)
    fail("index 1 misses D12 although an admissible subinterval allowed it");

  // membership tests
  for (int i : plan.d1)
    if (!(v[i] > 0.0)) fail("D1 member with beta value <= 1");
  for (int i : plan.d2)
    if (v[i] > 0.0) fail("D2 member with beta value > 1");
  const double lo = plan.log_c * plan.j / k, hi = plan.log_c * (plan.j + 1) / k;
  for (int i : plan.d1) {
    if (v[i] >= plan.log_c * (1.0 - 1e-14)) continue;  // attains c
    if (v[i] > lo + tol && v[i] < hi - tol) fail("pigeonhole interval is not value-free");
  }
  for (int i : plan.d11)
    if (v[i] > lo + tol) fail("D11 member above c^{j/k}");
  for (int i : plan.d12)
    if (v[i] < hi - tol) fail("D12 member below c^{(j+1)/k}");

  // pivot-gap lower bound: beta(a^{t_q1 - t_q2}) >= c^{1/k}
  const double pivot = root_log_gap(cfg, beta, plan.q1, plan.q2);
  if (pivot < plan.log_c / k - tol) fail("pivot gap below c^{1/k}");

  // proof steps: (x) beta(a^{t_i - t_q1}) >= 1 on D11, D2 and the reference;
  // (y1) beta(a^{t_i - t_q2}) <= 1 on D12
  std::vector<int> xs = plan.d11;
  xs.insert(xs.end(), plan.d2.begin(), plan.d2.end());
  xs.push_back(k + 1);
  for (int i : xs)
    if (root_log_gap(cfg, beta, i, plan.q1) < -tol)
      fail("step (x): beta(a^{t_i - t_q1}) < 1 for i = " + std::to_string(i));
  for (int i : plan.d12)
    if (root_log_gap(cfg, beta, i, plan.q2) > tol)
      fail("step (y1): beta(a^{t_i - t_q2}) > 1 for i = " + std::to_string(i));
  return result;
}

PlannedPartition plan_partition(const GapConfiguration& cfg,
                                const StronglyOrthogonalSystem& sos,
                                const SpectralGapProfile& gaps, double eps,
                                const RootSystem& rs) {
  PlannedPartition out;
  out.choice = choose_root_index(cfg, sos, gaps, eps, rs);
  const int n = cfg.n();

  out.permutation.clear();
  out.permutation.push_back(out.choice.one);
  for (int i = 1; i <= n; ++i)
    if (i != out.choice.one && i != out.choice.reference) out.permutation.push_back(i);
  out.permutation.push_back(out.choice.reference);

  out.reordered = cfg;
  for (int p = 0; p < n; ++p)
    out.reordered.t_vectors[p] = cfg.t_vectors[out.permutation[p] - 1];

  out.plan = build_partition(out.reordered, sos, out.choice.index, n - 1);
  out.verification = verify_partition(out.plan, out.reordered, sos);
  return out;
}

namespace {

int depth_of_block(const GapConfiguration& cfg, const StronglyOrthogonalSystem& sos,
                   const SpectralGapProfile& gaps, double eps, const RootSystem& rs,
                   int level_guard) {
  const int n = cfg.n();
  if (n <= 1) return 0;
  if (level_guard <= 0) throw Error("induction bookkeeping exceeded n-1 levels");
  auto planned = plan_partition(cfg, sos, gaps, eps, rs);
  const auto& plan = planned.plan;

  auto block_config = [&](const std::vector<int>& members) {
    GapConfiguration sub = cfg;
    sub.t_vectors.clear();
    for (int i : members)
      sub.t_vectors.push_back(planned.reordered.t_vectors[i - 1]);
    return sub;
  };
  std::vector<int> block1 = plan.d11;
  block1.insert(block1.end(), plan.d2.begin(), plan.d2.end());
  block1.push_back(plan.k + 1);
  const std::vector<int>& block2 = plan.d12;

  int depth = 0;
  if (block1.size() > 1)
    depth = std::max(depth, depth_of_block(block_config(block1), sos, gaps, eps, rs,
                                           level_guard - 1));
  if (block2.size() > 1)
    depth = std::max(depth, depth_of_block(block_config(block2), sos, gaps, eps, rs,
                                           level_guard - 1));
  return 1 + depth;
}

}  // namespace

int induction_depth(const GapConfiguration& cfg, const StronglyOrthogonalSystem& sos,
                    const SpectralGapProfile& gaps, double eps, const RootSystem& rs) {
  return depth_of_block(cfg, sos, gaps, eps, rs, cfg.n());
}

HigherOrderBound higher_order_bound(int n, const GapConfiguration& cfg,
                                    const StronglyOrthogonalSystem& sos,
                                    const SpectralGapProfile& gaps, double eps,
                                    double norm_product, const RootSystem& rs) {
  if (n < 2) throw DomainError("higher_order_bound requires n >= 2");
  if (cfg.n() != n) throw DomainError("configuration has the wrong point count");
  validate_config(cfg);
  const int l = static_cast<int>(sos.members.size());

  HigherOrderBound out;
  double best_eta = -1.0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double eta =
          rootsys::eta_epsilon(sos, cartan_of_gap(cfg, i, j), gaps, eps, rs);
      if (eta > best_eta) {
        best_eta = eta;
        out.pair_i = i;
        out.pair_j = j;
      }
    }
  out.kernel = std::pow(best_eta, 1.0 / (static_cast<double>(n - 1) * l));
  if (cfg.penalty_exponent) {
    double max_gap = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        max_gap = std::max(max_gap,
                           std::sqrt(sq_dist(cfg.t_vectors[i - 1], cfg.t_vectors[j - 1])));
    out.penalty_factor = std::pow(max_gap + 1.0, *cfg.penalty_exponent);
  }
  out.bound = out.kernel * norm_product * out.penalty_factor;
  return out;
}

TripleBound triple_bound(const GapConfiguration& cfg, const StronglyOrthogonalSystem& sos,
                         const SpectralGapProfile& gaps, double eps, const RootSystem& rs) {
  if (cfg.n() != 3) throw DomainError("triple_bound requires n = 3");
  validate_config(cfg);
  const int l = static_cast<int>(sos.members.size());

  TripleBound out;
  auto [p, q] = max_gap_pair(cfg);
  out.pair_i = p;
  out.pair_j = q;

  if (!cfg.split()) {
    const double eta = rootsys::eta_epsilon(sos, cartan_of_gap(cfg, p, q), gaps, eps, rs);
    out.value = std::pow(eta, 1.0 / (2.0 * l));
    out.regime = "general-max-gap";
    return out;
  }

  // split regime: the min over pairs of eta, with the J-case tag of the proof
  double min_eta = 2.0;
  int a = 1, b = 3;
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j) {
      const double eta = rootsys::eta_epsilon(sos, cartan_of_gap(cfg, i, j), gaps, eps, rs);
      if (eta < min_eta) {
        min_eta = eta;
        a = i;
        b = j;
      }
    }
  out.value = std::pow(min_eta, 1.0 / (2.0 * l));
  out.regime = "split-min-eta";

  // relabel (a, mid, b) as (1, 2, 3); orientation with log beta_{i0}(a^{t3-t1}) > 0
  int mid = 6 - a - b;
  int best = 0;
  double best_w = -1.0;
  for (int i = 0; i < l; ++i) {
    const double w =
        (gaps.gamma[i] - eps) * std::abs(root_log_gap(cfg, sos.members[i], a, b));
    if (w > best_w * (1.0 + 1e-15)) {
      best_w = w;
      best = i;
    }
  }
  const RootVec& beta = sos.members[best];
  int one = a, three = b;
  if (root_log_gap(cfg, beta, three, one) < 0.0) std::swap(one, three);
  const double B = root_log_gap(cfg, beta, three, one);
  const double x = root_log_gap(cfg, beta, mid, one);
  if (x < 0.0) out.j_case = 1;
  else if (x < 0.5 * B) out.j_case = 2;
  else if (x <= B) out.j_case = 3;
  else out.j_case = 4;
  return out;
}

ObstructionReport quad_obstruction_report(double c_abs, double int_f1_sq, double C,
                                          double eta_rate, double norm_product) {
  if (!(c_abs > 0.0) || !(int_f1_sq > 0.0))
    throw DomainError("quad_obstruction_report requires |c| > 0 and int f1^2 > 0");
  if (C < 0.0 || eta_rate < 0.0 || !(norm_product > 0.0))
    throw DomainError("quad_obstruction_report requires C, rate >= 0 and norms > 0");

  ObstructionReport rep;
  const double target = c_abs * int_f1_sq;
  auto upper = [&](double m) { return C * norm_product * std::exp(-0.5 * eta_rate * m); };

  if (C == 0.0 || upper(0.0) < target) {
    rep.contradiction = true;
    rep.m_star = 0;
  } else if (eta_rate == 0.0) {
    rep.in_range = false;
    rep.note = "no contradiction in range: eta does not decay";
    return rep;
  } else {
    const double threshold = 2.0 / eta_rate * std::log(C * norm_product / target);
    rep.contradiction = true;
    rep.m_star = static_cast<long long>(std::floor(threshold)) + 1;
  }
  rep.lower_bound_at_m_star = target - upper(static_cast<double>(rep.m_star));
  rep.note = "any uniform min-gap bound fails beyond m*";
  return rep;
}

nlohmann::json to_json(const PartitionPlan& plan) {
  nlohmann::json j;
  j["i0"] = plan.i0;
  j["k"] = plan.k;
  j["c"] = std::exp(plan.log_c);
  j["log_c"] = plan.log_c;
  j["j"] = plan.j;
  j["D1"] = plan.d1;
  j["D2"] = plan.d2;
  j["D1_1"] = plan.d11;
  j["D1_2"] = plan.d12;
  j["q1"] = plan.q1;
  j["q2"] = plan.q2;
  j["one_in_D1_2"] = plan.one_in_d12;
  j["one_in_D1_2_achievable"] = plan.one_in_d12_achievable;
  return j;
}

nlohmann::json to_json(const VerifyResult& v) {
  nlohmann::json j;
  j["ok"] = v.ok;
  j["violations"] = v.violations;
  return j;
}

}  // namespace fracmix::mixsched
