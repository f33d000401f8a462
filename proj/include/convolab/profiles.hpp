#pragma once

// Even nonnegative integrable densities on R, handled in the log domain so
// tails far below double range stay usable.

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace convolab {

// log Gamma(a, z), the upper incomplete gamma function, for a > 0, z >= 0.
double log_upper_gamma(double a, double z);

class EvenProfile {
 public:
  virtual ~EvenProfile() = default;
  // log q(t); even in t.
  virtual double log_density(double t) const = 0;
  // log of integral_x^inf q, for x >= 0.
  virtual double log_upper_tail(double x) const = 0;
  virtual double x_max() const { return std::numeric_limits<double>::infinity(); }
  virtual std::string name() const = 0;

  double log_total() const;
  // log integral_x^inf q for any real x (x may be +-inf).
  double log_tail(double x) const;
  // log integral_lo^hi q, lo < hi, infinities allowed.
  double log_mass(double lo, double hi) const;
};

using ProfilePtr = std::shared_ptr<const EvenProfile>;

// q(t) = exp(-c |t|^beta); tails via the incomplete gamma function.
class StretchedExpProfile final : public EvenProfile {
 public:
  StretchedExpProfile(double beta, double c = 1.0);
  double log_density(double t) const override;
  double log_upper_tail(double x) const override;
  std::string name() const override;
  double beta() const { return beta_; }
  double c() const { return c_; }

 private:
  double beta_, c_, log_prefactor_;
};

// Tabulated log tails on a graded grid with cubic Hermite interpolation;
// slopes come from the exact identity (log T)' = -q / T.
class TabulatedProfile final : public EvenProfile {
 public:
  // Tabulate a profile that already knows its tails (for speed).
  static std::shared_ptr<TabulatedProfile> from_profile(
      const EvenProfile& p, double x_max, std::function<double(double)> exact_log_density = {});
  // Tails computed by quadrature of exp(log_density) on [0, x_max]; the part
  // beyond x_max is estimated from the local log-slope.
  static std::shared_ptr<TabulatedProfile> from_log_density(std::function<double(double)> log_density,
                                                           double x_max, std::string name);

  double log_density(double t) const override;
  double log_upper_tail(double x) const override;
  double x_max() const override { return x_.back(); }
  std::string name() const override { return name_; }

  // Graded grid: uniform up to `knee`, then geometric.
  static std::vector<double> graded_grid(double x_max, double knee = 8.0, double h0 = 1.0 / 64,
                                         double ratio = 1.002);

  TabulatedProfile(std::vector<double> x, std::vector<double> log_tail,
                   std::vector<double> log_density, std::function<double(double)> exact_density,
                   std::string name);

 private:
  std::vector<double> x_, lt_, ld_;
  std::function<double(double)> exact_density_;
  std::string name_;
};

// The convolution f * g of two even profiles, tabulated on a graded grid.
// Density and tails come from quadrature over s of g(s) f(x - s) and
// g(s) T_f(x - s).
std::shared_ptr<TabulatedProfile> convolve_profiles(const EvenProfile& f, const EvenProfile& g,
                                                    double x_max, std::string name);

}  // namespace convolab
