#pragma once

// Truncated Taylor series arithmetic. A Jet holds c[k] = f^(k)(x0)/k! for
// k <= order; derivative(k) recovers f^(k)(x0).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace convolab {

class Jet {
 public:
  Jet() : c_(1, 0.0) {}
  Jet(std::size_t order, double value) : c_(order + 1, 0.0) { c_[0] = value; }

  static Jet variable(std::size_t order, double x0) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }
  static Jet constant(std::size_t order, double v) { return Jet(order, v); }

  std::size_t order() const { return c_.size() - 1; }
  double value() const { return c_[0]; }
  double coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
  double& operator[](std::size_t k) { return c_[k]; }
  double operator[](std::size_t k) const { return c_[k]; }
  double derivative(std::size_t k) const {
    double f = 1;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return coeff(k) * f;
  }
  // log|f^(k)(x0)|, stable for large k.
  double log_abs_derivative(std::size_t k) const {
    return std::log(std::abs(coeff(k))) + std::lgamma(static_cast<double>(k) + 1.0);
  }

  Jet like(double v) const { return Jet(order(), v); }

  Jet& operator+=(const Jet& o) {
    check(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator+(double s, Jet a) { return a + s; }
  friend Jet operator-(Jet a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check(b);
    Jet r(a.order(), 0.0);
    const std::size_t n = a.c_.size();
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0;
      for (std::size_t i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    a.check(b);
    if (b.c_[0] == 0.0) throw std::domain_error("jet: division by zero");
    Jet r(a.order(), 0.0);
    const std::size_t n = a.c_.size();
    for (std::size_t k = 0; k < n; ++k) {
      double s = a.c_[k];
      for (std::size_t i = 1; i <= k; ++i) s -= b.c_[i] * r.c_[k - i];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }
  friend Jet operator/(double s, const Jet& b) { return b.like(s) / b; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  friend Jet exp(const Jet& a) {
    Jet r(a.order(), std::exp(a.c_[0]));
    const std::size_t n = a.c_.size();
    for (std::size_t k = 1; k < n; ++k) {
      double s = 0;
      for (std::size_t i = 1; i <= k; ++i) s += static_cast<double>(i) * a.c_[i] * r.c_[k - i];
      r.c_[k] = s / static_cast<double>(k);
    }
    return r;
  }

  friend Jet log(const Jet& a) {
    if (a.c_[0] <= 0.0) throw std::domain_error("jet: log of nonpositive value");
    Jet r(a.order(), std::log(a.c_[0]));
    const std::size_t n = a.c_.size();
    for (std::size_t k = 1; k < n; ++k) {
      double s = static_cast<double>(k) * a.c_[k];
      for (std::size_t i = 1; i < k; ++i) s -= static_cast<double>(i) * r.c_[i] * a.c_[k - i];
      r.c_[k] = s / (static_cast<double>(k) * a.c_[0]);
    }
    return r;
  }

  // a^p for a(x0) > 0 and real p.
  friend Jet pow(const Jet& a, double p) {
    if (a.c_[0] <= 0.0) throw std::domain_error("jet: pow needs a positive base");
    Jet r(a.order(), std::pow(a.c_[0], p));
    const std::size_t n = a.c_.size();
    for (std::size_t k = 1; k < n; ++k) {
      double s = 0;
      for (std::size_t i = 1; i <= k; ++i)
        s += (p * static_cast<double>(i) - static_cast<double>(k - i)) * a.c_[i] * r.c_[k - i];
      r.c_[k] = s / (static_cast<double>(k) * a.c_[0]);
    }
    return r;
  }

  friend Jet sqrt(const Jet& a) { return pow(a, 0.5); }

  // sin and cos together via the coupled recurrence.
  friend void sincos(const Jet& a, Jet& s, Jet& c) {
    const std::size_t n = a.c_.size();
    s = Jet(a.order(), std::sin(a.c_[0]));
    c = Jet(a.order(), std::cos(a.c_[0]));
    for (std::size_t k = 1; k < n; ++k) {
      double ss = 0, cc = 0;
      for (std::size_t i = 1; i <= k; ++i) {
        ss += static_cast<double>(i) * a.c_[i] * c.c_[k - i];
        cc -= static_cast<double>(i) * a.c_[i] * s.c_[k - i];
      }
      s.c_[k] = ss / static_cast<double>(k);
      c.c_[k] = cc / static_cast<double>(k);
    }
  }
  friend Jet sin(const Jet& a) {
    Jet s, c;
    sincos(a, s, c);
    return s;
  }
  friend Jet cos(const Jet& a) {
    Jet s, c;
    sincos(a, s, c);
    return c;
  }

 private:
  void check(const Jet& o) const {
    if (o.c_.size() != c_.size()) throw std::invalid_argument("jet: order mismatch");
  }
  std::vector<double> c_;
};

}  // namespace convolab
