#include "convolab/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

namespace convolab::kernels {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

namespace serial {

std::vector<double> ball_max(std::span<const double> v, std::span<const std::size_t> radius) {
  const std::size_t n = v.size();
  std::vector<double> out(n, kNegInf);
  for (std::size_t i = 0; i < n; ++i) {
    if (radius[i] == npos) continue;
    std::size_t lo = i >= radius[i] ? i - radius[i] : 0;
    std::size_t hi = std::min(n - 1, i + radius[i]);
    double m = kNegInf;
    for (std::size_t j = lo; j <= hi; ++j) m = std::max(m, v[j]);
    out[i] = m;
  }
  return out;
}

double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

std::vector<double> row_integrals(std::size_t rows, std::span<const double> weight,
                                  const RowEntry& f) {
  std::vector<double> out(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0;
    for (std::size_t k = 0; k < weight.size(); ++k) s += weight[k] * f(i, k);
    out[i] = s;
  }
  return out;
}

}  // namespace serial

MaxTree::MaxTree(std::span<const double> v) : n_(v.size()), t_(2 * v.size(), kNegInf) {
  std::copy(v.begin(), v.end(), t_.begin() + static_cast<std::ptrdiff_t>(n_));
  for (std::size_t i = n_ - 1; i > 0; --i) t_[i] = std::max(t_[2 * i], t_[2 * i + 1]);
}

double MaxTree::query(std::size_t lo, std::size_t hi) const {
  double m = kNegInf;
  for (std::size_t l = lo + n_, r = hi + n_ + 1; l < r; l >>= 1, r >>= 1) {
    if (l & 1) m = std::max(m, t_[l++]);
    if (r & 1) m = std::max(m, t_[--r]);
  }
  return m;
}

namespace omp {

std::vector<double> ball_max(std::span<const double> v, std::span<const std::size_t> radius) {
  const std::size_t n = v.size();
  std::vector<double> out(n, kNegInf);
  if (n == 0) return out;
  MaxTree tree(v);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    auto i = static_cast<std::size_t>(si);
    if (radius[i] == npos) continue;
    std::size_t lo = i >= radius[i] ? i - radius[i] : 0;
    std::size_t hi = std::min(n - 1, i + radius[i]);
    out[i] = tree.query(lo, hi);
  }
  return out;
}

double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  double s = 0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::ptrdiff_t i = 1; i < n - 1; ++i) s += v[static_cast<std::size_t>(i)];
  s += 0.5 * (v.front() + v.back());
  return s * h;
}

std::vector<double> row_integrals(std::size_t rows, std::span<const double> weight,
                                  const RowEntry& f) {
  std::vector<double> out(rows, 0.0);
  const auto sr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t si = 0; si < sr; ++si) {
    auto i = static_cast<std::size_t>(si);
    double s = 0;
    for (std::size_t k = 0; k < weight.size(); ++k) s += weight[k] * f(i, k);
    out[i] = s;
  }
  return out;
}

}  // namespace omp

std::vector<double> tabulate(std::size_t n, const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
  return out;
}

void configure_threads_from_env() {
  if (const char* s = std::getenv("CONVOLAB_THREADS")) {
    try {
      int n = std::stoi(s);
      if (n > 0) omp_set_num_threads(n);
    } catch (...) {
    }
  }
}

}  // namespace convolab::kernels
