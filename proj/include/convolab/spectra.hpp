#pragma once

// Fourier-side objects on a FrequencyWindow: sampled spectra, their weighted
// norms and the slow-decrease test.

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "convolab/core.hpp"
#include "convolab/weights.hpp"

namespace convolab {

using cplx = std::complex<double>;

// A compactly supported (or rapidly decaying) distribution on R given by a
// piecewise smooth density plus an optional point mass.
struct PhysicalModel {
  std::string tag;
  std::function<double(double)> density;  // may be empty (pure point mass)
  double support_lo = 0, support_hi = 0;  // density vanishes outside (may be +-inf)
  std::vector<double> jumps;              // discontinuities of the density
  bool piecewise_linear = false;          // use the Filon rule even without jumps
  double dirac_mass = 0, dirac_at = 0;
  std::function<cplx(double)> closed_form;  // transform of the whole model, optional

  static PhysicalModel dirac(double mass = 1, double at = 0);
  static PhysicalModel indicator(double a, double b);
  static PhysicalModel gaussian(double sigma = 1);
  static PhysicalModel triangle(double halfwidth);
  // "delta", "indicator:a:b", "gaussian:s", "triangle:d", "delta+gaussian:s"
  static PhysicalModel from_key(const std::string& key);
  static std::vector<std::string> catalog_keys();

  // a*this + b*other; closed forms survive when both have one.
  PhysicalModel combine(double a, const PhysicalModel& other, double b) const;
  // Multiply the density by g (point mass scaled by g(dirac_at)); drops the closed form.
  PhysicalModel times(const std::function<double(double)>& g, const std::string& tag_suffix) const;
};

class GridSpectrum {
 public:
  GridSpectrum() = default;
  GridSpectrum(FrequencyWindow win, std::vector<cplx> samples, std::string provenance);
  // Nonnegative real spectrum known through log|u^| only.
  static GridSpectrum from_log_abs(FrequencyWindow win, std::vector<double> log_abs, std::string provenance);

  const FrequencyWindow& window() const { return win_; }
  std::size_t size() const { return win_.size(); }
  bool log_only() const { return samples_.empty(); }
  cplx value(std::size_t i) const;
  double log_abs(std::size_t i) const;
  std::vector<double> log_abs_all() const;
  const std::vector<cplx>& samples() const;
  const std::string& provenance() const { return provenance_; }
  double support_radius = std::numeric_limits<double>::infinity();

  void write_csv(const std::string& path) const;
  static GridSpectrum read_csv(const std::string& path, const FrequencyWindow& win);

 private:
  FrequencyWindow win_;
  std::vector<cplx> samples_;
  std::vector<double> log_abs_;
  std::string provenance_;
};

GridSpectrum fourier_of(const PhysicalModel& m, const FrequencyWindow& win, bool use_closed_form = true);
// Density samples on the physical grid of the window (point mass excluded).
std::vector<double> physical_samples(const PhysicalModel& m, const FrequencyWindow& win);
// Spectrum of arbitrary physical samples (no point mass), plain Riemann rule.
GridSpectrum spectrum_of_samples(const std::vector<double>& x_samples, const FrequencyWindow& win,
                                 const std::string& provenance);

struct NormResult {
  double value = 0;
  bool lower_bound_only = false;  // tail not negligible at the window edge
};
// int |phi^| e^{lambda w}
NormResult w_norm(const GridSpectrum& phi, double lambda, const Weight& w);

struct SupResult {
  double value = 0;
  double argmax = 0;
  bool edge_growth = false;
};
// sup |u^| e^{lambda w}, lambda real
SupResult sup_seminorm(const GridSpectrum& u, double lambda, const Weight& w);

struct PwOrder {
  double lambda = 0, ci_low = 0, ci_high = 0;
  Verdict status = Verdict::inconclusive;
};
// Decay order of |u^| against w, fitted on the per-scale upper envelope.
PwOrder pw_order(const GridSpectrum& u, const Weight& w);

struct SlowDecreaseReport {
  Verdict verdict = Verdict::inconclusive;
  std::optional<double> A_star;
  std::vector<double> ladder;
  std::vector<bool> holds_at;                        // per A: no failing included point
  std::vector<double> min_margin;                    // per A
  std::vector<std::vector<double>> scale_min_margin;  // per A, per ladder scale (NaN if empty)
  std::vector<double> witnesses;      // worst point per scale and sign among those failing for every A
  std::size_t witness_count = 0;      // all points failing for every A
  std::size_t excluded = 0;                          // balls leaving the window at the largest A
  double curve_A = 0;
  std::vector<double> margin_curve;  // at A_star, else at the largest A; NaN where not evaluated
};

// margin(xi, A) = log sup_{|eta| <= A w(xi)} |u^(xi+eta)| + A w(xi) + log A
// for |xi| > 1; NaN where the ball leaves the window or |xi| <= 1.
std::vector<double> slow_decrease_margins(const GridSpectrum& u, const Weight& w, double A);

SlowDecreaseReport slow_decrease_check(const GridSpectrum& u, const Weight& w,
                                       std::vector<double> A_ladder = {0.5, 1, 2, 4, 8});

// Pointwise product of spectra on the same window.
GridSpectrum convolve(const GridSpectrum& a, const GridSpectrum& b);

}  // namespace convolab
