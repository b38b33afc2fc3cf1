#include "fracmix/quadrature.hpp"

#include <cmath>
#include <cstdlib>

#include "fracmix/errors.hpp"

namespace fracmix::quad {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa,
                     double b, double fb, double m, double fm, double whole,
                     double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

// phi0(z) = (e^z - 1)/z, phi1(z) = (e^z (z-1) + 1)/z^2, stable near z = 0.
std::complex<double> phi0(std::complex<double> z) {
  if (std::abs(z) < 0.5) {
    std::complex<double> sum = 1.0, term = 1.0;
    for (int k = 1; k <= 12; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) < 0.5) {
    std::complex<double> sum = 0.0, zp = 1.0;
    double fact = 2.0;  // (m+2)! starting at m=0
    for (int m = 0; m <= 12; ++m) {
      sum += zp * (static_cast<double>(m + 1) / fact);
      zp *= z;
      fact *= static_cast<double>(m + 3);
    }
    return sum;
  }
  return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

// Gauss-Legendre 10-point rule on [-1,1].
constexpr double kGlx[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                            0.8650633666889845, 0.9739065285171717};
constexpr double kGlw[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                            0.1494513491505806, 0.0666713443086881};

double gl10_cos(const std::function<double(double)>& f, double a, double b, double t) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double xp = c + h * kGlx[i], xm = c - h * kGlx[i];
    s += kGlw[i] * (f(xp) * std::cos(xp * t) + f(xm) * std::cos(xm * t));
  }
  return s * h;
}

double composite_cos(const std::function<double(double)>& f, double L, double t,
                     int panels) {
  double total = 0.0;
  const double h = L / panels;
  for (int p = 0; p < panels; ++p) total += gl10_cos(f, p * h, (p + 1) * h, t);
  return total;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

std::complex<double> oscillatory_cell(double a, double b, std::complex<double> ga,
                                      std::complex<double> gb, double t) {
  const double h = b - a;
  const std::complex<double> z(0.0, -t * h);
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, -t * a));
  // integral of [ga + (gb-ga) x/h] e^{-i t (a+x)} dx over [0,h]
  return phase * h * (ga * phi0(z) + (gb - ga) * phi1(z));
}

double fourier_transform_even(const std::function<double(double)>& tau, double L,
                              double t, double tol) {
  const double at = std::abs(t);
  // Panels must resolve both the profile and the oscillation.
  int panels = 24;
  if (at > 1.0) {
    const double need = L * at / 4.0;
    if (need > panels) panels = static_cast<int>(need) + 1;
  }
  double coarse = composite_cos(tau, L, t, panels);
  for (int it = 0; it < 6; ++it) {
    const double fine = composite_cos(tau, L, t, panels * 2);
    if (std::abs(fine - coarse) <= tol * std::max(1.0, std::abs(fine)))
      return fine / M_PI;
    coarse = fine;
    panels *= 2;
  }
  throw AccuracyError("fourier_transform_even: oscillatory quadrature did not converge");
}

}  // namespace fracmix::quad
