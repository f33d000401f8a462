#include "convolab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace convolab::fft {

namespace {

// FFTW planning is not thread safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::vector<cplx> run_fftw(std::vector<cplx> in, int sign) {
  const int n = static_cast<int>(in.size());
  std::vector<cplx> out(in.size());
  auto* ip = reinterpret_cast<fftw_complex*>(in.data());
  auto* op = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan p;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    p = fftw_plan_dft_1d(n, ip, op, sign, FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(p);
  }
  return out;
}

}  // namespace

std::vector<cplx> forward(const FrequencyWindow& win, const std::vector<cplx>& x) {
  const std::size_t n = win.fft_size();
  if (x.size() != n) throw ShapeError("fft::forward: sample count does not match window");
  std::vector<cplx> in(n);
  for (std::size_t k = 0; k < n; ++k) in[k] = (k & 1) ? -x[k] : x[k];
  auto d = run_fftw(std::move(in), FFTW_FORWARD);
  std::vector<cplx> out(win.size());
  const double dx = win.dx();
  const bool odd_half = win.half() & 1;
  for (std::size_t m = 0; m < win.size(); ++m) {
    cplx v = d[m % n] * dx;
    bool neg = ((m & 1) != 0) != odd_half;
    out[m] = neg ? -v : v;
  }
  return out;
}

std::vector<cplx> forward_real(const FrequencyWindow& win, const std::vector<double>& x) {
  std::vector<cplx> c(x.begin(), x.end());
  return forward(win, c);
}

std::vector<cplx> inverse(const FrequencyWindow& win, const std::vector<cplx>& f) {
  const std::size_t n = win.fft_size();
  if (f.size() != win.size() && f.size() != n)
    throw ShapeError("fft::inverse: sample count does not match window");
  std::vector<cplx> in(n);
  for (std::size_t m = 0; m < n; ++m) in[m] = (m & 1) ? -f[m] : f[m];
  auto d = run_fftw(std::move(in), FFTW_BACKWARD);
  const double s = win.step() / (2 * std::numbers::pi);
  const bool odd_half = win.half() & 1;
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    bool neg = ((k & 1) != 0) != odd_half;
    out[k] = neg ? -d[k] * s : d[k] * s;
  }
  return out;
}

double sinc(double t) {
  if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

cplx segment_transform(double x0, double x1, double v0, double v1, double xi) {
  const double a = 0.5 * (x1 - x0);
  const double c = 0.5 * (x0 + x1);
  const double mean = 0.5 * (v0 + v1);
  const double slope = (x1 - x0) != 0 ? (v1 - v0) / (x1 - x0) : 0.0;
  const double u = a * xi;
  double g;  // (sin u - u cos u) / u^2
  if (std::abs(u) < 1e-3)
    g = u / 3.0 - u * u * u / 30.0;
  else
    g = (std::sin(u) - u * std::cos(u)) / (u * u);
  cplx inner(mean * 2 * a * sinc(u), -slope * 2 * a * a * g);
  return inner * std::polar(1.0, -c * xi);
}

}  // namespace convolab::fft
