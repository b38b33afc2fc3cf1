#pragma once

#include <complex>
#include <functional>

namespace fracmix::quad {

// Adaptive Simpson on [a,b] with absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

// Integral of the piecewise-linear interpolant of (ga, gb) on [a,b] against
// e^{-i t lambda}. Stable for all t, including t*(b-a) << 1.
std::complex<double> oscillatory_cell(double a, double b, std::complex<double> ga,
                                      std::complex<double> gb, double t);

// Fourier transform (1/2pi) * integral of tau(lambda) e^{-i lambda t} dlambda
// for an even real profile tau supported in [-L, L]. Uses adaptive panels with
// Filon-type cells so accuracy does not degrade at large |t|.
double fourier_transform_even(const std::function<double(double)>& tau, double L,
                              double t, double tol);

}  // namespace fracmix::quad
