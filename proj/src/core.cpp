#include "convolab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace convolab {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::verified: return "verified";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "verified") return Verdict::verified;
  if (s == "refuted") return Verdict::refuted;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw ConfigError("unknown verdict '" + std::string(s) + "'");
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::refuted || b == Verdict::refuted) return Verdict::refuted;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::verified;
}

FrequencyWindow::FrequencyWindow(double radius, double step) : radius_(radius), step_(step) {
  if (!(radius > 0) || !(step > 0) || !std::isfinite(radius) || !std::isfinite(step))
    throw DomainError("window: radius and step must be positive");
  double ratio = radius / step;
  double r = std::round(ratio);
  if (std::abs(ratio - r) > 1e-9 * ratio)
    throw DomainError("window: radius/step must be an integer");
  if (r < 1024) throw DomainError("window: radius/step must be at least 1024");
  half_ = static_cast<std::size_t>(r);
  for (double R = radius; R >= 2.0; R /= 2) ladder_.push_back(R);
  std::reverse(ladder_.begin(), ladder_.end());
}

std::size_t FrequencyWindow::index_of(double xi) const {
  double t = std::round((xi + radius_) / step_);
  t = std::clamp(t, 0.0, static_cast<double>(size() - 1));
  return static_cast<std::size_t>(t);
}

double FrequencyWindow::dx() const { return std::numbers::pi / radius_; }
double FrequencyWindow::box_half_width() const { return std::numbers::pi / step_; }
double FrequencyWindow::x_at(std::size_t k) const {
  return -box_half_width() + static_cast<double>(k) * dx();
}

std::size_t scale_of(const std::vector<double>& ladder, double xi) {
  double a = std::abs(xi);
  auto it = std::lower_bound(ladder.begin(), ladder.end(), a);
  return static_cast<std::size_t>(it - ladder.begin());
}

double logsumexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log1mexp(double a) {
  if (a > -0.693147) return std::log(-std::expm1(a));
  return std::log1p(-std::exp(a));
}

}  // namespace convolab
