#include <random>

#include <benchmark/benchmark.h>

#include "sigsar/signature.hpp"
#include "sigsar/simgen.hpp"

namespace {

sigsar::DiscretePath walk(int points, int p) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd v(points, p);
  for (int i = 0; i < points; ++i)
    for (int c = 0; c < p; ++c) v(i, c) = (i ? v(i - 1, c) : 0.0) + normal(rng);
  return sigsar::DiscretePath::uniform(v);
}

void BM_PathSignature(benchmark::State& state) {
  const auto path = walk(101, static_cast<int>(state.range(0)));
  const int depth = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sigsar::path_signature(path, depth));
  state.counters["coeffs"] = static_cast<double>(sigsar::sig_dim(static_cast<int>(state.range(0)), depth));
}
BENCHMARK(BM_PathSignature)->Args({2, 2})->Args({2, 4})->Args({3, 5})->Args({4, 4})->Args({6, 3})->Args({10, 2});

void BM_TensorMul(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const int depth = static_cast<int>(state.range(1));
  const auto a = sigsar::path_signature(walk(3, p), depth);
  const auto b = sigsar::path_signature(walk(4, p), depth);
  for (auto _ : state) benchmark::DoNotOptimize(sigsar::tensor_mul(a, b));
}
BENCHMARK(BM_TensorMul)->Args({2, 4})->Args({3, 5})->Args({4, 4});

void BM_GaussianProcessSample(benchmark::State& state) {
  const sigsar::GaussianProcess gp(sigsar::uniform_times(101));
  std::mt19937_64 rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(gp.sample(rng));
}
BENCHMARK(BM_GaussianProcessSample);

}  // namespace
