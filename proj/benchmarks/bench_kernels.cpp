// Microbenchmarks pitting the serial kernels against their OpenMP variants.
// The two produce bit-identical results (see the kernels test suite); this
// target measures where the parallel dispatch actually pays.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "adausm/kernels.hpp"
#include "adausm/rng.hpp"

namespace {

using namespace adausm;

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 2.0 * uniform01(mix64(seed, i)) - 1.0;
  return v;
}

void bench_usm_step(benchmark::State& state, bool parallel) {
  const std::size_t d = std::size_t(state.range(0));
  std::vector<double> g = random_vec(d, 1);
  std::vector<double> x = random_vec(d, 2);
  std::vector<double> m(d, 0.0), r(d, 0.0), lr(d);
  const UsmStepParams p{0.9, 0.45, 1e-8, 1e-3, 0.97, 1.1};
  for (auto _ : state) {
    if (parallel)
      usm_step_parallel(g, p, x, m, r, lr);
    else
      usm_step_serial(g, p, x, m, r, lr);
    benchmark::DoNotOptimize(x.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(d));
}

void bench_logistic_grad(benchmark::State& state, bool parallel) {
  const std::size_t n = std::size_t(state.range(0)), d = 64;
  std::vector<double> features = random_vec(n * d, 3);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = double(i % 2);
  std::vector<double> w = random_vec(d, 4), out(d);
  for (auto _ : state) {
    if (parallel)
      logistic_grad_sum_parallel(features.data(), labels.data(), nullptr, n, d, w, out);
    else
      logistic_grad_sum_serial(features.data(), labels.data(), nullptr, n, d, w, out);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}

void bench_logistic_loss(benchmark::State& state, bool parallel) {
  const std::size_t n = std::size_t(state.range(0)), d = 64;
  std::vector<double> features = random_vec(n * d, 5);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = double(i % 2);
  std::vector<double> w = random_vec(d, 6);
  for (auto _ : state) {
    double sum = parallel ? logistic_loss_sum_parallel(features.data(), labels.data(), n, d, w)
                          : logistic_loss_sum_serial(features.data(), labels.data(), n, d, w);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}

}  // namespace

BENCHMARK_CAPTURE(bench_usm_step, serial, false)->Arg(1024)->Arg(32768)->Arg(1 << 20);
BENCHMARK_CAPTURE(bench_usm_step, parallel, true)->Arg(1024)->Arg(32768)->Arg(1 << 20);
BENCHMARK_CAPTURE(bench_logistic_grad, serial, false)->Arg(256)->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(bench_logistic_grad, parallel, true)->Arg(256)->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(bench_logistic_loss, serial, false)->Arg(256)->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(bench_logistic_loss, parallel, true)->Arg(256)->Arg(4096)->Arg(65536);

BENCHMARK_MAIN();
