#pragma once

// Catalog of smooth scalar functions with Taylor jets, used for symbol
// factors in x and in xi.

#include <string>
#include <vector>

#include "convolab/dcclasses.hpp"

namespace convolab {

// Keys:
//   "one", "id", "exp", "exp:<c>" (e^{cx}), "sin", "cos", "gauss" (e^{-x^2/2}),
//   "poly:<c0,c1,...>", "bracket:<m>" ((1+|x|)^m), "japanese:<m>" ((1+x^2)^{m/2}),
//   "gbump:<beta>" (e^{-(1-x^2)^{-k}}, k = beta/(1-beta), on (-1,1)),
//   "cutoff" (smooth, 1 on [-1,1], 0 outside [-2,2]).
SmoothFn smooth_from_key(const std::string& key);
std::vector<std::string> smooth_catalog_keys();

// Growth order in xi implied by a key (degree, m, or 0; -inf for compact support).
double natural_order(const std::string& key);

// Smooth step: 0 for y <= 0, 1 for y >= 1.
Jet smooth_step(const Jet& y);

inline double eval(const SmoothFn& f, double x) { return f(Jet::variable(0, x)).value(); }
// f(x), f'(x), ..., f^(n)(x)
std::vector<double> derivatives(const SmoothFn& f, double x, int n);

}  // namespace convolab
