#include "fracmix/rootsys.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace fracmix::rootsys {

namespace {

RootVec unit(int dim, int i, int sign = 1) {
  RootVec v(dim, 0);
  v[i] = sign;
  return v;
}

RootVec add(const RootVec& a, const RootVec& b) {
  RootVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RootVec sub(const RootVec& a, const RootVec& b) {
  RootVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RootVec neg(const RootVec& a) {
  RootVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

long long dot_ii(const RootVec& a, const RootVec& b) {
  long long s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += static_cast<long long>(a[i]) * b[i];
  return s;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
    case Family::G2: return "G2";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "A") return Family::A;
  if (s == "B") return Family::B;
  if (s == "C") return Family::C;
  if (s == "D") return Family::D;
  if (s == "G2" || s == "G") return Family::G2;
  throw ConfigError("unknown root-system family: " + s);
}

bool RootSystem::contains(const RootVec& v) const {
  return std::find(roots.begin(), roots.end(), v) != roots.end();
}

int RootSystem::positive_index(const RootVec& v) const {
  auto it = std::find(positive_roots.begin(), positive_roots.end(), v);
  if (it == positive_roots.end()) return -1;
  return static_cast<int>(it - positive_roots.begin());
}

std::vector<long long> RootSystem::simple_coeffs(const RootVec& v) const {
  const int m = static_cast<int>(simple_roots.size());
  const int d = dim();
  // Solve simple * c = v by normal equations, then verify exactly in integers.
  std::vector<std::vector<double>> G(m, std::vector<double>(m + 1, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) G[i][j] = static_cast<double>(dot_ii(simple_roots[i], simple_roots[j]));
    G[i][m] = static_cast<double>(dot_ii(simple_roots[i], v));
  }
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
    std::swap(G[col], G[piv]);
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      double f = G[r][col] / G[col][col];
      for (int c2 = col; c2 <= m; ++c2) G[r][c2] -= f * G[col][c2];
    }
  }
  std::vector<long long> c(m);
  for (int i = 0; i < m; ++i) c[i] = std::llround(G[i][m] / G[i][i]);
  RootVec check(d, 0);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < d; ++k) check[k] += static_cast<int>(c[i]) * simple_roots[i][k];
  if (check != v)
    throw DomainError("root is not an integer combination of the simple roots");
  for (long long ci : c)
    if (ci < 0) throw DomainError("positive root has a negative simple-root coefficient");
  return c;
}

RootSystem build_root_system(Family family, int rank) {
  RootSystem rs;
  rs.family = family;
  rs.rank = rank;
  switch (family) {
    case Family::A: {
      if (rank < 1) throw ConfigError("A requires rank >= 1");
      const int d = rank + 1;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          rs.positive_roots.push_back(sub(unit(d, i), unit(d, j)));
      for (int i = 0; i < rank; ++i)
        rs.simple_roots.push_back(sub(unit(d, i), unit(d, i + 1)));
      break;
    }
    case Family::B: {
      if (rank < 2) throw ConfigError("B requires rank >= 2");
      const int d = rank;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          rs.positive_roots.push_back(sub(unit(d, i), unit(d, j)));
          rs.positive_roots.push_back(add(unit(d, i), unit(d, j)));
        }
      for (int i = 0; i < d; ++i) rs.positive_roots.push_back(unit(d, i));
      for (int i = 0; i + 1 < d; ++i)
        rs.simple_roots.push_back(sub(unit(d, i), unit(d, i + 1)));
      rs.simple_roots.push_back(unit(d, d - 1));
      break;
    }
    case Family::C: {
      if (rank < 2) throw ConfigError("C requires rank >= 2");
      const int d = rank;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          rs.positive_roots.push_back(sub(unit(d, i), unit(d, j)));
          rs.positive_roots.push_back(add(unit(d, i), unit(d, j)));
        }
      for (int i = 0; i < d; ++i) rs.positive_roots.push_back(unit(d, i, 2));
      for (int i = 0; i + 1 < d; ++i)
        rs.simple_roots.push_back(sub(unit(d, i), unit(d, i + 1)));
      rs.simple_roots.push_back(unit(d, d - 1, 2));
      break;
    }
    case Family::D: {
      if (rank < 3) throw ConfigError("D requires rank >= 3");
      const int d = rank;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          rs.positive_roots.push_back(sub(unit(d, i), unit(d, j)));
          rs.positive_roots.push_back(add(unit(d, i), unit(d, j)));
        }
      for (int i = 0; i + 1 < d; ++i)
        rs.simple_roots.push_back(sub(unit(d, i), unit(d, i + 1)));
      rs.simple_roots.push_back(add(unit(d, d - 2), unit(d, d - 1)));
      break;
    }
    case Family::G2: {
      if (rank != 2) throw ConfigError("G2 requires rank 2");
      // Sum-zero integer realization in R^3; alpha short, beta long.
      const RootVec alpha = {1, -1, 0};
      const RootVec beta = {-1, 2, -1};
      rs.positive_roots = {alpha,
                           beta,
                           add(alpha, beta),
                           add(add(alpha, alpha), beta),
                           add(add(add(alpha, alpha), alpha), beta),
                           add(add(add(add(alpha, alpha), alpha), beta), beta)};
      rs.simple_roots = {alpha, beta};
      break;
    }
  }
  for (const auto& r : rs.positive_roots) {
    rs.roots.push_back(r);
    rs.roots.push_back(neg(r));
  }
  rs.field_labels.assign(rs.positive_roots.size(), FieldLabel::Real);

  // Classical positive-root counts, as a construction self-check.
  size_t expected = 0;
  switch (family) {
    case Family::A: expected = static_cast<size_t>(rank) * (rank + 1) / 2; break;
    case Family::B:
    case Family::C: expected = static_cast<size_t>(rank) * rank; break;
    case Family::D: expected = static_cast<size_t>(rank) * (rank - 1); break;
    case Family::G2: expected = 6; break;
  }
  if (rs.positive_roots.size() != expected)
    throw ConfigError("positive-root count mismatch for " + to_string(family));
  return rs;
}

bool is_strongly_orthogonal(const std::vector<RootVec>& candidate, const RootSystem& rs) {
  for (const auto& th : candidate)
    if (rs.positive_index(th) < 0) throw DomainError("candidate root not in the system");
  for (size_t i = 0; i < candidate.size(); ++i)
    for (size_t j = i + 1; j < candidate.size(); ++j) {
      if (candidate[i] == candidate[j]) return false;
      if (rs.contains(add(candidate[i], candidate[j]))) return false;
      if (rs.contains(sub(candidate[i], candidate[j]))) return false;
    }
  return true;
}

namespace {

std::vector<long long> formal_sum(const std::vector<RootVec>& members, const RootSystem& rs) {
  std::vector<long long> total(rs.simple_roots.size(), 0);
  for (const auto& m : members) {
    auto c = rs.simple_coeffs(m);
    for (size_t i = 0; i < c.size(); ++i) total[i] += c[i];
  }
  return total;
}

void enumerate_sos(const RootSystem& rs, size_t start, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
  for (size_t i = start; i < rs.positive_roots.size(); ++i) {
    bool ok = true;
    for (int j : current) {
      const auto& a = rs.positive_roots[i];
      const auto& b = rs.positive_roots[j];
      if (rs.contains(add(a, b)) || rs.contains(sub(a, b))) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    current.push_back(static_cast<int>(i));
    out.push_back(current);
    enumerate_sos(rs, i + 1, current, out);
    current.pop_back();
  }
}

std::vector<RootVec> sorted_members(const std::vector<int>& idx, const RootSystem& rs) {
  std::vector<RootVec> m;
  m.reserve(idx.size());
  for (int i : idx) m.push_back(rs.positive_roots[i]);
  std::sort(m.begin(), m.end());
  return m;
}

}  // namespace

StronglyOrthogonalSystem find_maximal_sos(const RootSystem& rs) {
  if (static_cast<int>(rs.positive_roots.size()) > kSosSearchCap)
    throw CapacityError("positive-root count exceeds the exhaustive-search cap");

  std::vector<std::vector<int>> systems;
  std::vector<int> current;
  enumerate_sos(rs, 0, current, systems);
  if (systems.empty()) throw ConfigError("empty root system");

  const size_t ns = rs.simple_roots.size();
  std::vector<std::vector<long long>> sums(systems.size());
  std::vector<long long> max_coeffs(ns, 0);
  for (size_t k = 0; k < systems.size(); ++k) {
    std::vector<RootVec> mem;
    for (int i : systems[k]) mem.push_back(rs.positive_roots[i]);
    sums[k] = formal_sum(mem, rs);
    for (size_t i = 0; i < ns; ++i) max_coeffs[i] = std::max(max_coeffs[i], sums[k][i]);
  }

  // A dominating system attains the coefficientwise maximum in every slot.
  int best = -1;
  for (size_t k = 0; k < systems.size(); ++k) {
    if (sums[k] != max_coeffs) continue;
    if (best < 0 ||
        sorted_members(systems[k], rs) < sorted_members(systems[best], rs))
      best = static_cast<int>(k);
  }

  StronglyOrthogonalSystem result;
  if (best >= 0) {
    result.members = sorted_members(systems[best], rs);
    result.formal_sum_coeffs = sums[best];
    result.maximal = true;
    return result;
  }

  // Incomparable formal sums: surface the gap. Return a maximal-cardinality
  // system, flagged as not dominating.
  size_t best_card = 0;
  for (const auto& s : systems) best_card = std::max(best_card, s.size());
  for (size_t k = 0; k < systems.size(); ++k) {
    if (systems[k].size() != best_card) continue;
    if (best < 0 ||
        sorted_members(systems[k], rs) < sorted_members(systems[best], rs))
      best = static_cast<int>(k);
  }
  result.members = sorted_members(systems[best], rs);
  result.formal_sum_coeffs = sums[best];
  result.maximal = false;
  return result;
}

double root_log_value(const RootVec& theta, const CartanElement& a) {
  if (theta.size() != a.log_coords.size())
    throw DomainError("CartanElement dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < theta.size(); ++i) s += theta[i] * a.log_coords[i];
  return s;
}

double root_value(const RootVec& theta, const CartanElement& a) {
  return std::exp(root_log_value(theta, a));
}

bool is_dominant(const CartanElement& a, const RootSystem& rs) {
  double scale = 1e-12;
  for (double x : a.log_coords) scale = std::max(scale, std::abs(x));
  for (const auto& s : rs.simple_roots)
    if (root_log_value(s, a) < -1e-12 * scale) return false;
  return true;
}

CartanElement weyl_positive(const CartanElement& a, const RootSystem& rs) {
  if (static_cast<int>(a.log_coords.size()) != rs.dim())
    throw DomainError("CartanElement dimension mismatch");
  // Exhaustive orbit generation from simple reflections with a visited set.
  auto key = [](const std::vector<double>& v) {
    std::string k;
    char buf[32];
    for (double x : v) {
      std::snprintf(buf, sizeof buf, "%.9e|", x);
      k += buf;
    }
    return k;
  };
  std::set<std::string> visited;
  std::vector<CartanElement> frontier = {a};
  visited.insert(key(a.log_coords));
  CartanElement best = a;
  bool found = is_dominant(a, rs);
  while (!frontier.empty()) {
    std::vector<CartanElement> next;
    for (const auto& x : frontier) {
      for (const auto& s : rs.simple_roots) {
        const double denom = static_cast<double>(dot_ii(s, s));
        double proj = 2.0 * root_log_value(s, x) / denom;
        CartanElement y = x;
        for (size_t i = 0; i < s.size(); ++i) y.log_coords[i] -= proj * s[i];
        auto k = key(y.log_coords);
        if (visited.insert(k).second) {
          if (!found && is_dominant(y, rs)) {
            best = y;
            found = true;
          }
          next.push_back(std::move(y));
        }
      }
    }
    if (found) break;
    frontier = std::move(next);
  }
  if (!found) throw DomainError("Weyl orbit contains no dominant element");
  return best;
}

void SpectralGapProfile::validate() const {
  if (field.size() != gamma.size())
    throw DomainError("SpectralGapProfile: field/gamma size mismatch");
  for (size_t i = 0; i < gamma.size(); ++i) {
    const double g = gamma[i];
    if (!(g > 0.0)) throw DomainError("spectral gap must be positive");
    if (field[i] == FieldLabel::Complex) {
      if (g > 1.0) throw DomainError("complex factor requires 0 < gamma <= 1");
    } else {
      const bool discrete = !purely_discrete.empty() && purely_discrete[i];
      if (discrete) {
        double twice = 2.0 * g;
        if (std::abs(twice - std::round(twice)) > 1e-12 || g < 0.5)
          throw DomainError("purely discrete factor requires gamma in {1/2, 1, 3/2, ...}");
      } else if (g > 0.5) {
        throw DomainError("real factor without discrete series requires 0 < gamma <= 1/2");
      }
    }
  }
}

double eta_epsilon(const StronglyOrthogonalSystem& sos, const CartanElement& a,
                   const SpectralGapProfile& gaps, double eps, const RootSystem& rs) {
  gaps.validate();
  if (gaps.gamma.size() != sos.members.size())
    throw DomainError("profile size does not match the SOS");
  double gmin = gaps.gamma.empty() ? 1.0 : *std::min_element(gaps.gamma.begin(), gaps.gamma.end());
  if (!(eps > 0.0) || !(eps < gmin))
    throw DomainError("eta_epsilon requires 0 < eps < min gamma");
  CartanElement ap = weyl_positive(a, rs);
  double log_eta = 0.0;
  for (size_t i = 0; i < sos.members.size(); ++i)
    log_eta -= (gaps.gamma[i] - eps) * root_log_value(sos.members[i], ap);
  return std::exp(log_eta);
}

RegularityExponents regularity_exponents(const StronglyOrthogonalSystem& sos,
                                         const SpectralGapProfile& gaps, double eps) {
  gaps.validate();
  if (gaps.gamma.size() != sos.members.size())
    throw DomainError("profile size does not match the SOS");
  if (!(eps > 0.0)) throw DomainError("regularity_exponents requires eps > 0");
  RegularityExponents out;
  for (size_t i = 0; i < gaps.gamma.size(); ++i) {
    out.zeta += (gaps.field[i] == FieldLabel::Complex) ? 1.0 + eps : gaps.gamma[i] + 2.0 + eps;
    out.p += gaps.gamma[i] - eps;
  }
  return out;
}

double holder_gamma(double s, double s0) {
  if (!(s > 0.0) || !(s0 > 0.0)) throw DomainError("holder_gamma requires s, s0 > 0");
  return std::min(s / (4.0 * s0), 0.5);
}

double mixing_exponent(int n, int sos_size, double eta) {
  if (n < 2) throw DomainError("mixing_exponent requires n >= 2");
  if (sos_size < 1) throw DomainError("mixing_exponent requires |S| >= 1");
  if (!(eta > 0.0) || eta > 1.0) throw DomainError("mixing_exponent requires eta in (0,1]");
  return std::pow(eta, 1.0 / (static_cast<double>(n - 1) * sos_size));
}

nlohmann::json to_json(const RootSystem& rs) {
  nlohmann::json j;
  j["family"] = to_string(rs.family);
  j["rank"] = rs.rank;
  j["roots"] = rs.roots;
  j["positive_roots"] = rs.positive_roots;
  j["simple_roots"] = rs.simple_roots;
  std::vector<std::string> labels;
  for (auto f : rs.field_labels) labels.push_back(f == FieldLabel::Real ? "R" : "C");
  j["field_labels"] = labels;
  return j;
}

nlohmann::json to_json(const StronglyOrthogonalSystem& sos) {
  nlohmann::json j;
  j["members"] = sos.members;
  j["formal_sum_coeffs"] = sos.formal_sum_coeffs;
  j["maximal"] = sos.maximal;
  return j;
}

RootSystem root_system_from_json(const nlohmann::json& j) {
  RootSystem rs;
  rs.family = family_from_string(j.at("family").get<std::string>());
  rs.rank = j.at("rank").get<int>();
  rs.roots = j.at("roots").get<std::vector<RootVec>>();
  rs.positive_roots = j.at("positive_roots").get<std::vector<RootVec>>();
  rs.simple_roots = j.at("simple_roots").get<std::vector<RootVec>>();
  for (const auto& s : j.at("field_labels"))
    rs.field_labels.push_back(s.get<std::string>() == "C" ? FieldLabel::Complex
                                                          : FieldLabel::Real);
  return rs;
}

StronglyOrthogonalSystem sos_from_json(const nlohmann::json& j) {
  StronglyOrthogonalSystem sos;
  sos.members = j.at("members").get<std::vector<RootVec>>();
  sos.formal_sum_coeffs = j.at("formal_sum_coeffs").get<std::vector<long long>>();
  sos.maximal = j.at("maximal").get<bool>();
  return sos;
}

}  // namespace fracmix::rootsys
