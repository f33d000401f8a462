#include "convolab/functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace convolab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double num(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("function key '" + key + "': bad number '" + s + "'");
}

Jet abs_jet(const Jet& t) { return t.value() < 0 ? -t : t; }

std::vector<double> poly_coeffs(const std::string& body, const std::string& key) {
  std::vector<double> c;
  for (const auto& s : split(body, ',')) c.push_back(num(s, key));
  if (c.empty()) throw ConfigError("function key '" + key + "': no coefficients");
  return c;
}

}  // namespace

Jet smooth_step(const Jet& y) {
  const double v = y.value();
  if (v <= 1e-4) return y.like(0.0);
  if (v >= 1 - 1e-4) return y.like(1.0);
  Jet a = exp(-1.0 / y), b = exp(-1.0 / (1.0 - y));
  return a / (a + b);
}

SmoothFn smooth_from_key(const std::string& key) {
  auto p = split(key, ':');
  if (p.empty()) throw ConfigError("empty function key");
  const auto& h = p[0];
  if (p.size() == 1) {
    if (h == "one") return [](const Jet& t) { return t.like(1.0); };
    if (h == "id") return [](const Jet& t) { return t; };
    if (h == "exp") return [](const Jet& t) { return exp(t); };
    if (h == "sin") return [](const Jet& t) { return sin(t); };
    if (h == "cos") return [](const Jet& t) { return cos(t); };
    if (h == "gauss") return [](const Jet& t) { return exp(-0.5 * (t * t)); };
    if (h == "cutoff") return [](const Jet& t) { return smooth_step(2.0 - abs_jet(t)); };
  } else if (p.size() == 2) {
    if (h == "exp") {
      double c = num(p[1], key);
      return [c](const Jet& t) { return exp(c * t); };
    }
    if (h == "poly") {
      auto c = poly_coeffs(p[1], key);
      return [c](const Jet& t) {
        Jet r = t.like(c.back());
        for (std::size_t i = c.size() - 1; i-- > 0;) r = r * t + c[i];
        return r;
      };
    }
    if (h == "bracket") {
      double m = num(p[1], key);
      return [m](const Jet& t) { return pow(1.0 + abs_jet(t), m); };
    }
    if (h == "japanese") {
      double m = num(p[1], key);
      return [m](const Jet& t) { return pow(1.0 + t * t, m / 2); };
    }
    if (h == "gbump") {
      double beta = num(p[1], key);
      if (!(beta > 0 && beta < 1)) throw DomainError("gbump: need 0 < beta < 1");
      double k = beta / (1 - beta);
      return [k](const Jet& t) {
        double q = 1 - t.value() * t.value();
        if (q <= 0 || std::pow(q, -k) > 700) return t.like(0.0);
        return exp(-pow(1.0 - t * t, -k));
      };
    }
  }
  throw ConfigError("unknown function key '" + key + "'");
}

std::vector<std::string> smooth_catalog_keys() {
  return {"one", "id", "exp", "exp:<c>", "sin", "cos", "gauss", "poly:<c0,c1,...>", "bracket:<m>",
          "japanese:<m>", "gbump:<beta>", "cutoff"};
}

double natural_order(const std::string& key) {
  auto p = split(key, ':');
  if (p.empty()) return 0;
  if (p[0] == "id") return 1;
  if ((p[0] == "bracket" || p[0] == "japanese") && p.size() == 2) return num(p[1], key);
  if (p[0] == "poly" && p.size() == 2) {
    auto c = poly_coeffs(p[1], key);
    std::size_t d = c.size() - 1;
    while (d > 0 && c[d] == 0) --d;
    return static_cast<double>(d);
  }
  if (p[0] == "gbump" || p[0] == "cutoff" || p[0] == "gauss") return -std::numeric_limits<double>::infinity();
  return 0;
}

std::vector<double> derivatives(const SmoothFn& f, double x, int n) {
  auto j = f(Jet::variable(static_cast<std::size_t>(n), x));
  std::vector<double> d(n + 1);
  for (int k = 0; k <= n; ++k) d[k] = j.derivative(k);
  return d;
}

}  // namespace convolab
