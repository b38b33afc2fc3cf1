#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracmix/errors.hpp"

#include <json.hpp>

namespace fracmix::rootsys {

enum class Family { A, B, C, D, G2 };

// θ(k) tag of a root: whether the root subgroup is defined over R or C.
enum class FieldLabel { Real, Complex };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// Roots are integer coordinate vectors in the standard orthogonal basis.
// Coordinate dimension is rank for B/C/D, rank+1 for A (e_i - e_j vectors),
// and 3 for G2 (sum-zero integer realization).
using RootVec = std::vector<int>;

struct RootSystem {
  Family family = Family::A;
  int rank = 1;
  std::vector<RootVec> roots;            // closed under negation
  std::vector<RootVec> positive_roots;
  std::vector<RootVec> simple_roots;
  std::vector<FieldLabel> field_labels;  // per positive root, default Real

  int dim() const { return roots.empty() ? 0 : static_cast<int>(roots[0].size()); }
  bool contains(const RootVec& v) const;
  int positive_index(const RootVec& v) const;  // -1 if not a positive root

  // Exact coefficients of a positive root in the simple-root basis.
  // Throws DomainError if v is not a nonnegative integer combination.
  std::vector<long long> simple_coeffs(const RootVec& v) const;
};

RootSystem build_root_system(Family family, int rank);

bool is_strongly_orthogonal(const std::vector<RootVec>& candidate, const RootSystem& rs);

struct StronglyOrthogonalSystem {
  std::vector<RootVec> members;
  std::vector<long long> formal_sum_coeffs;  // per simple root
  bool maximal = false;
};

// Exhaustive search; throws CapacityError when |Phi+| exceeds the cap.
inline constexpr int kSosSearchCap = 24;
StronglyOrthogonalSystem find_maximal_sos(const RootSystem& rs);

struct CartanElement {
  std::vector<double> log_coords;  // length = rs.dim(); theta(a) = exp(<theta, log_coords>)
};

double root_log_value(const RootVec& theta, const CartanElement& a);
double root_value(const RootVec& theta, const CartanElement& a);

bool is_dominant(const CartanElement& a, const RootSystem& rs);
CartanElement weyl_positive(const CartanElement& a, const RootSystem& rs);

struct SpectralGapProfile {
  std::vector<double> gamma;            // per member of the SOS
  std::vector<FieldLabel> field;        // per member
  std::vector<bool> purely_discrete;    // real factors only; empty means all false

  void validate() const;  // throws DomainError on a value outside Remark-style ranges
};

double eta_epsilon(const StronglyOrthogonalSystem& sos, const CartanElement& a,
                   const SpectralGapProfile& gaps, double eps, const RootSystem& rs);

struct RegularityExponents {
  double zeta = 0.0;  // sum of zeta_{theta,eps}
  double p = 0.0;     // sum of (gamma_theta - eps)
};

RegularityExponents regularity_exponents(const StronglyOrthogonalSystem& sos,
                                         const SpectralGapProfile& gaps, double eps);

double holder_gamma(double s, double s0);

double mixing_exponent(int n, int sos_size, double eta);

nlohmann::json to_json(const RootSystem& rs);
nlohmann::json to_json(const StronglyOrthogonalSystem& sos);
RootSystem root_system_from_json(const nlohmann::json& j);
StronglyOrthogonalSystem sos_from_json(const nlohmann::json& j);

}  // namespace fracmix::rootsys
