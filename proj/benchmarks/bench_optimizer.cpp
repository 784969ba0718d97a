#include <benchmark/benchmark.h>

#include "mpp/linalg.hpp"
#include "mpp/model.hpp"
#include "mpp/optimizer.hpp"
#include "mpp/rng.hpp"

namespace {

mpp::MixtureParams bench_mixture() {
  mpp::MixtureParams mix;
  mix.alpha1 = 0.3;
  mix.A = mpp::ar1_covariance(5, 0.6);
  mix.B = mpp::ar1_covariance(3, 0.3);
  mpp::Rng ru(mpp::mix_seed(7, {1}));
  mpp::Rng rv(mpp::mix_seed(7, {2}));
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(5, 3);
  lambda(0, 0) = 4.0;
  mix.T1 = Eigen::MatrixXd::Zero(5, 3);
  mix.T2 = mpp::sym_sqrt(mix.A) * mpp::random_orthogonal(5, ru) * lambda *
           mpp::random_orthogonal(3, rv).transpose() * mpp::sym_sqrt(mix.B);
  return mix;
}

void BM_ExtractFirstPair(benchmark::State& state) {
  const mpp::MatrixSample sample = mpp::sample_mixture(bench_mixture(), state.range(0), 3);
  mpp::OptimizerConfig config;
  config.direction = mpp::Direction::Minimize;
  config.restarts = 5;
  config.seed = 11;
  for (auto _ : state)
    benchmark::DoNotOptimize(mpp::extract_sequence(sample, config));
}

void BM_FlipFlopFirstPair(benchmark::State& state) {
  const mpp::MatrixSample sample = mpp::sample_mixture(bench_mixture(), state.range(0), 3);
  mpp::OptimizerConfig config;
  config.direction = mpp::Direction::Minimize;
  config.restarts = 5;
  config.seed = 11;
  for (auto _ : state)
    benchmark::DoNotOptimize(mpp::flipflop_extract(sample, config));
}

}  // namespace

BENCHMARK(BM_ExtractFirstPair)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FlipFlopFirstPair)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
