#pragma once

// Transforms between physical samples on the box dual to a FrequencyWindow
// and frequency samples on the window. Convention:
//   u^(xi) = integral u(x) exp(-i x xi) dx,
//   u(x)   = (2 pi)^-1 integral u^(xi) exp(i x xi) dxi.

#include <complex>
#include <vector>

#include "convolab/core.hpp"

namespace convolab::fft {

using cplx = std::complex<double>;

// Riemann/trapezoid transform of x-samples (size fft_size()) onto all
// window.size() frequencies. The last frequency repeats the first (periodic).
std::vector<cplx> forward(const FrequencyWindow& win, const std::vector<cplx>& x_samples);
std::vector<cplx> forward_real(const FrequencyWindow& win, const std::vector<double>& x_samples);

// Inverse of forward: frequency samples (window.size(), last ignored) to x-samples.
std::vector<cplx> inverse(const FrequencyWindow& win, const std::vector<cplx>& xi_samples);

// Exact integral of the linear interpolant between (x0,v0) and (x1,v1)
// against exp(-i x xi).
cplx segment_transform(double x0, double x1, double v0, double v1, double xi);

// sinc(t) = sin(t)/t with sinc(0) = 1.
double sinc(double t);

}  // namespace convolab::fft
