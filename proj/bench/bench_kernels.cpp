#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "convolab/kernels.hpp"

using namespace convolab;

namespace {

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<std::size_t> radii(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = 1 + static_cast<std::size_t>(std::sqrt(static_cast<double>(i)));
  return r;
}

template <auto Fn>
void ball_max(benchmark::State& st) {
  auto v = noise(st.range(0));
  auto r = radii(v.size());
  for (auto _ : st) benchmark::DoNotOptimize(Fn(v, r));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void row_integrals(benchmark::State& st) {
  const std::size_t n = st.range(0);
  std::vector<double> w(n, 1.0 / n);
  kernels::RowEntry f = [n](std::size_t i, std::size_t k) {
    double d = (static_cast<double>(i) - static_cast<double>(k)) / n;
    return std::exp(-d * d);
  };
  for (auto _ : st) benchmark::DoNotOptimize(Fn(n, w, f));
  st.SetItemsProcessed(st.iterations() * n * n);
}

}  // namespace

BENCHMARK(ball_max<kernels::serial::ball_max>)->Name("ball_max/serial")->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(ball_max<kernels::omp::ball_max>)->Name("ball_max/omp")->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(row_integrals<kernels::serial::row_integrals>)->Name("row_integrals/serial")->Arg(512)->Arg(2048);
BENCHMARK(row_integrals<kernels::omp::row_integrals>)->Name("row_integrals/omp")->Arg(512)->Arg(2048);

BENCHMARK_MAIN();
