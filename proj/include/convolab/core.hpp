#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace convolab {

// Error taxonomy. The CLI maps these to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : Error {  // hypothesis of an operation not met
  using Error::Error;
};
struct DomainError : Error {  // argument outside the mathematical domain
  using Error::Error;
};
struct ShapeError : Error {  // mismatched windows or grids
  using Error::Error;
};
struct RepresentationError : Error {  // object cannot be evaluated where asked
  using Error::Error;
};
struct AliasingError : Error {  // physical model too wide for the FFT box
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct SolveError : Error {  // root finding without a sign change
  using Error::Error;
};

enum class Verdict { verified, refuted, inconclusive };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

// Worst of a set of verdicts: refuted > inconclusive > verified.
Verdict combine(Verdict a, Verdict b);

// Symmetric frequency window [-radius, radius] sampled with spacing `step`.
// radius/step must be an integer >= 1024. The ladder holds the dyadic
// sub-radii radius/2^k >= 2 in increasing order; trend verdicts read it.
class FrequencyWindow {
 public:
  FrequencyWindow() = default;
  FrequencyWindow(double radius, double step);

  double radius() const { return radius_; }
  double step() const { return step_; }
  std::size_t half() const { return half_; }
  std::size_t size() const { return 2 * half_ + 1; }
  double at(std::size_t i) const { return -radius_ + static_cast<double>(i) * step_; }
  std::size_t center() const { return half_; }
  // Nearest grid index, clamped to the window.
  std::size_t index_of(double xi) const;
  const std::vector<double>& ladder() const { return ladder_; }

  // Physical box dual to the window: [-pi/step, pi/step) with spacing pi/radius.
  std::size_t fft_size() const { return 2 * half_; }
  double dx() const;
  double box_half_width() const;
  double x_at(std::size_t k) const;

  // Same step, doubled radius. Used for differences xi - eta.
  FrequencyWindow doubled() const { return FrequencyWindow(2 * radius_, step_); }

  bool operator==(const FrequencyWindow& o) const {
    return half_ == o.half_ && step_ == o.step_;
  }

 private:
  double radius_ = 0;
  double step_ = 0;
  std::size_t half_ = 0;
  std::vector<double> ladder_;
};

// Dyadic scale index of |xi| with respect to a ladder: the first k with
// |xi| <= ladder[k]. Returns ladder.size() beyond the last rung.
std::size_t scale_of(const std::vector<double>& ladder, double xi);

double logsumexp(double a, double b);
double log1mexp(double a);  // log(1 - e^a) for a < 0

}  // namespace convolab
