#pragma once

// Data-parallel grid scans. Each kernel has a plain serial reference and an
// OpenMP version; tests check they agree and bench/ times them.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace convolab::kernels {

// out[i] = max v[j] over |j - i| <= radius[i], clamped to the array.
// Entries with radius == npos are skipped (out = -inf).
inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Per-row integrals: out[i] = sum_k weight[k] * f(i, k).
using RowEntry = std::function<double(std::size_t, std::size_t)>;

namespace serial {
std::vector<double> ball_max(std::span<const double> v, std::span<const std::size_t> radius);
double trapezoid(std::span<const double> v, double h);
std::vector<double> row_integrals(std::size_t rows, std::span<const double> weight,
                                  const RowEntry& f);
}  // namespace serial

namespace omp {
std::vector<double> ball_max(std::span<const double> v, std::span<const std::size_t> radius);
double trapezoid(std::span<const double> v, double h);
std::vector<double> row_integrals(std::size_t rows, std::span<const double> weight,
                                  const RowEntry& f);
}  // namespace omp

// Iterative max segment tree; the OpenMP ball_max queries it in parallel.
class MaxTree {
 public:
  explicit MaxTree(std::span<const double> v);
  double query(std::size_t lo, std::size_t hi) const;  // inclusive range
 private:
  std::size_t n_;
  std::vector<double> t_;
};

// Evaluate fn(i) for i < n into a vector, in parallel.
std::vector<double> tabulate(std::size_t n, const std::function<double(std::size_t)>& fn);

// Apply CONVOLAB_THREADS if set. Called once by the CLI.
void configure_threads_from_env();

}  // namespace convolab::kernels
