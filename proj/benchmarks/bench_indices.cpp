#include <benchmark/benchmark.h>

#include "mpp/indices.hpp"
#include "mpp/model.hpp"
#include "mpp/rng.hpp"

namespace {

mpp::MatrixSample make_centered(mpp::Index n) {
  mpp::MatrixNormalParams params{Eigen::MatrixXd::Zero(5, 3),
                                 mpp::ar1_covariance(5, 0.6),
                                 mpp::ar1_covariance(3, 0.3)};
  return mpp::center(mpp::sample_matrix_normal(params, n, 42));
}

void BM_KappaSample(benchmark::State& state) {
  const mpp::MatrixSample s = make_centered(state.range(0));
  mpp::Rng rng(1);
  const Eigen::VectorXd u = mpp::random_unit_vector(5, rng);
  const Eigen::VectorXd v = mpp::random_unit_vector(3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mpp::kappa_sample(s, u, v));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_KappaEval(benchmark::State& state) {
  const mpp::MatrixSample s = make_centered(state.range(0));
  mpp::Rng rng(1);
  const Eigen::VectorXd u = mpp::random_unit_vector(5, rng);
  const Eigen::VectorXd v = mpp::random_unit_vector(3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mpp::kappa_eval(s, u, v));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PsiSample(benchmark::State& state) {
  const mpp::MatrixSample s = make_centered(state.range(0));
  mpp::Rng rng(1);
  const Eigen::VectorXd u = mpp::random_unit_vector(5, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mpp::psi_sample(s, u));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_KappaSample)->Arg(1000)->Arg(8000)->Arg(64000);
BENCHMARK(BM_KappaEval)->Arg(1000)->Arg(8000)->Arg(64000);
BENCHMARK(BM_PsiSample)->Arg(1000)->Arg(8000)->Arg(64000);
