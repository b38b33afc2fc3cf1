#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fracmix/errors.hpp"

#include <json.hpp>

namespace fracmix::sl2 {

using cplx = std::complex<double>;

enum class Series { Principal, Complementary, Discrete, Mock };

std::string to_string(Series s);
Series series_from_string(const std::string& s);

// One irreducible unitary representation, classified by the Casimir value mu.
// varpi = sqrt(1 - mu); nu0 follows the complementary-series convention for
// mu in (0,1], is 0 for mu >= 1, and -n+1 in the purely discrete convention.
struct IrrepParams {
  Series series = Series::Complementary;
  double mu = 0.75;
  cplx varpi{0.5, 0.0};
  double nu0 = 0.5;
  int n = 0;  // discrete-series index, 0 unless series == Discrete

  double re_varpi() const { return varpi.real(); }
  bool half_line() const { return series == Series::Discrete || series == Series::Mock; }
  // Optimal geodesic decay exponent in the e^{-2|s| r} normalization.
  double optimal_rate() const;
};

// param is mu for principal/complementary/mock and the integer n >= 2 for discrete.
IrrepParams make_irrep(Series series, double param);

struct GridConfig {
  double lambda_min = 1e-6;
  double lambda_max = 1e3;
  double ratio = 1.05;  // geometric node ratio (clustering toward 0)
};

// Log-uniform nodes per half-line with Simpson weights for the measure
// |lambda|^{-Re varpi} dlambda. Immutable after construction.
class SpectralGrid {
 public:
  SpectralGrid(const IrrepParams& irrep, const GridConfig& cfg);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  size_t size() const { return nodes_.size(); }
  double node(size_t i) const { return nodes_[i]; }
  double weight(size_t i) const { return weights_[i]; }

  bool half_line() const { return half_line_; }
  double re_varpi() const { return re_varpi_; }
  const GridConfig& config() const { return cfg_; }
  double log_step() const { return h_; }
  size_t nodes_per_half() const { return per_half_; }
  // Index of the first positive node (0 on half-line grids).
  size_t positive_offset() const { return half_line_ ? 0 : per_half_; }

  std::shared_ptr<const SpectralGrid> refined(const IrrepParams& irrep) const;

 private:
  GridConfig cfg_;
  bool half_line_ = false;
  double re_varpi_ = 0.0;
  double h_ = 0.0;
  size_t per_half_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(const IrrepParams& irrep, const GridConfig& cfg = {});

// Uniform-lambda companion samples covering the inner region. Log-ladder
// stencils for V are ill-conditioned near the spectral edge (the 1/lambda
// chain-rule factor turns interpolation kinks into a growing mode under
// iteration), so derivative evaluation below the blend window reads these
// samples instead; multiplier operations keep them exact.
struct EdgePatch {
  double x0 = 0.0;     // first abscissa (-extent on full-line grids, 0 on half-line)
  double delta = 0.0;  // uniform spacing
  std::vector<cplx> values;

  double x_max() const { return x0 + delta * static_cast<double>(values.size() - 1); }
};

using PatchPtr = std::shared_ptr<const EdgePatch>;

struct ModelVector {
  GridPtr grid;
  std::vector<cplx> values;
  // Power-law hint f ~ f(lambda_min) (|lambda|/lambda_min)^vanish_order below the
  // inner cutoff; used by the analytic head correction and by resampling.
  double vanish_order = 0.0;
  PatchPtr patch;  // present for edge-regular data on grids that reach the window

  size_t size() const { return values.size(); }
};

// Rebuild the patch for edge-regular data by pointwise multiplication; fn is
// evaluated at the patch abscissae. Returns null when f has no patch.
PatchPtr patch_multiply(const ModelVector& f, const std::function<cplx(double)>& fn);

ModelVector sample_profile(const GridPtr& grid, const std::function<cplx(double)>& f,
                           double vanish_order = 0.0);

// exp(-((lambda-center)/width)^2)
ModelVector gaussian_profile(const GridPtr& grid, double center, double width);
// exp(-lambda^2), even, nonzero at the spectral edge
ModelVector edge_gaussian(const GridPtr& grid);
// lambda^(n-1) exp(-lambda^2) on the positive half-line (discrete-series profile)
ModelVector discrete_profile(const GridPtr& grid, int n);
// C^infinity bump supported on a <= |lambda| <= b (even on full-line grids)
ModelVector bump_away(const GridPtr& grid, double a, double b);

// Cubic interpolation of f at target (same sign half), with the power-law
// extension below the inner cutoff and 0 beyond the outer cutoff.
cplx value_at(const ModelVector& f, double lambda);

cplx inner(const ModelVector& f, const ModelVector& g);
double norm(const ModelVector& f);
double weighted_norm(const ModelVector& f, const IrrepParams& irrep);

// Iterated second-derivative stencils near the inner cutoff amplify roundoff
// by 1/(lambda h^2) per pass, so norms of generator words exclude this many
// innermost ladder nodes per half; the trimmed zone carries |lambda|^{1-Re varpi}
// of quadrature weight and is negligible for regular integrands.
inline constexpr size_t kDerivativeEdgeTrim = 24;

// Norm with the first `skip` ladder nodes of each half excluded.
double trimmed_norm(const ModelVector& f, size_t skip = kDerivativeEdgeTrim);

ModelVector operator*(cplx c, const ModelVector& f);
ModelVector operator+(const ModelVector& f, const ModelVector& g);
ModelVector operator-(const ModelVector& f, const ModelVector& g);

enum class Flow { Geodesic, Horocycle };
enum class Generator { X, U, V };

struct FlowResult {
  ModelVector vec;
  double aliasing_loss = 0.0;  // relative |f|^2-mass outside the representable window
};

// Geodesic: (pi(a_s) f)(lambda) = e^{-(varpi-1)s} f(e^{2s} lambda).
// Horocycle: pointwise multiplication by e^{-i lambda t}.
FlowResult flow_apply(const ModelVector& f, Flow flow, double time, const IrrepParams& irrep);

// Derived actions: U = -i lambda, X = 2 lambda d/dlambda - (varpi-1),
// V = i((varpi-1) d/dlambda - lambda d^2/dlambda^2). These satisfy
// [X,U] = 2U, [X,V] = -2V, [U,V] = X, and X generates the geodesic flow.
ModelVector apply_generator(const ModelVector& f, Generator gen, const IrrepParams& irrep);

cplx matrix_coefficient(const ModelVector& f, const ModelVector& g, Flow flow,
                        double time, const IrrepParams& irrep);

// sqrt of the sum of ||monomial f||^2 over all monomials in the chosen
// generators of degree <= order (the empty monomial included).
double sobolev_norm(const ModelVector& f, std::span<const Generator> gens, int order,
                    const IrrepParams& irrep);

void ensure_compatible(const ModelVector& f, const IrrepParams& irrep);

nlohmann::json to_json(const IrrepParams& p);
nlohmann::json to_json(const GridConfig& cfg);

}  // namespace fracmix::sl2
