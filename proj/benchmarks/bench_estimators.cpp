#include <map>
#include <string>

#include <benchmark/benchmark.h>

#include "sigsar/estimators.hpp"
#include "sigsar/experiment.hpp"
#include "sigsar/simgen.hpp"

namespace {

const sigsar::SimulatedDataset& dataset(int n) {
  static std::map<int, sigsar::SimulatedDataset> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    sigsar::ExperimentConfig cfg;
    cfg.n = n;
    it = cache.emplace(n, sigsar::gen_dataset(cfg, 0)).first;
  }
  return it->second;
}

void BM_LogDetLU(benchmark::State& state) {
  const auto& w = dataset(static_cast<int>(state.range(0))).weights;
  for (auto _ : state) benchmark::DoNotOptimize(sigsar::log_det_S(w, 0.4));
}
BENCHMARK(BM_LogDetLU)->Arg(100)->Arg(200)->Arg(400);

void BM_LogDetSpectral(benchmark::State& state) {
  const sigsar::SpectralLogDet ld(dataset(static_cast<int>(state.range(0))).weights);
  for (auto _ : state) benchmark::DoNotOptimize(ld(0.4));
}
BENCHMARK(BM_LogDetSpectral)->Arg(100)->Arg(200)->Arg(400);

void BM_FitPenalized(benchmark::State& state) {
  const auto& data = dataset(static_cast<int>(state.range(0)));
  const auto xi = sigsar::build_signature_design(data.paths, static_cast<int>(state.range(1)), {true, true});
  const sigsar::SarSystem system(data.weights);
  for (auto _ : state) benchmark::DoNotOptimize(sigsar::fit_penalized(data.y, xi, system, 1e-4));
}
BENCHMARK(BM_FitPenalized)->Args({200, 2})->Args({200, 3})->Unit(benchmark::kMillisecond);

void BM_FitProjection(benchmark::State& state) {
  const auto& data = dataset(200);
  const Eigen::MatrixXd rows = sigsar::build_signature_design(data.paths, 4, {true, true}).rightCols(120);
  const auto basis = sigsar::pca_fit(rows, true);
  const Eigen::MatrixXd z = basis.scores(rows).leftCols(state.range(0));
  Eigen::VectorXd y = data.y.array() - data.y.mean();
  const sigsar::SarSystem system(data.weights);
  for (auto _ : state) benchmark::DoNotOptimize(sigsar::fit_projection(y, z, system));
}
BENCHMARK(BM_FitProjection)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_RunMethodReplicate(benchmark::State& state) {
  sigsar::ExperimentConfig cfg;
  const auto data = sigsar::gen_dataset(cfg, 0);
  auto rng = sigsar::replicate_rng(cfg, 0, sigsar::SeedStream::split);
  const auto split = sigsar::split_dataset(data, cfg.split, cfg.k, rng);
  const auto method = sigsar::all_methods()[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(std::string(sigsar::method_name(method)));
  const sigsar::TuningOptions tuning;
  for (auto _ : state) benchmark::DoNotOptimize(sigsar::run_method(method, split, tuning));
}
BENCHMARK(BM_RunMethodReplicate)->DenseRange(0, 6)->Unit(benchmark::kMillisecond);

}  // namespace
