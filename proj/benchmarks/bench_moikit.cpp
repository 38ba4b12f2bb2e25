#include <benchmark/benchmark.h>

#include "moikit/calculus.hpp"
#include "moikit/harness.hpp"
#include "moikit/moi.hpp"
#include "moikit/random_operator.hpp"

using namespace moikit;

namespace {

SeparableIntegrand quadratic_integrand(std::size_t arity) {
  SeparableIntegrand s{arity, {}};
  std::vector<ScalarFunction> row;
  for (std::size_t i = 0; i < arity; ++i) row.push_back(ScalarFunction::polynomial(Polynomial({1.0, 0.5, 0.25})));
  s.terms.push_back(row);
  return s;
}

void BM_MoiApply(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const int workers = static_cast<int>(state.range(2));
  Rng rng(1);
  const RandomOperatorModel model{n, UniformLaw{-1.0, 1.0}, 0};
  std::vector<HermitianOperator> ops;
  std::vector<ComplexMatrix> args;
  for (std::size_t j = 0; j < m; ++j) ops.push_back(sample_random_hermitian(model, rng));
  for (std::size_t j = 0; j + 1 < m; ++j) args.push_back(sample_hermitian_direction(n, 1.0, rng).matrix());
  const auto refs = spectral_refs<HermitianOperator>(ops);
  const auto psi = MultivariateFunction::from_separable(quadratic_integrand(m));
  for (auto _ : state) benchmark::DoNotOptimize(moi_apply(refs, psi, args, {workers}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MoiApply)
    ->ArgsProduct({{4, 8, 16, 32}, {2, 3}, {1}})
    ->Args({16, 4, 1})
    ->Args({32, 3, 2})
    ->Unit(benchmark::kMicrosecond);

void BM_HaarSample(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<Index>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_haar_unitary(n, rng));
}
BENCHMARK(BM_HaarSample)->RangeMultiplier(2)->Range(2, 64);

void BM_KthDerivative(benchmark::State& state) {
  Rng rng(3);
  const RandomOperatorModel model{8, UniformLaw{-1.0, 1.0}, 0};
  const auto a = sample_random_hermitian(model, rng);
  const auto b = sample_hermitian_direction(8, 1.0, rng).matrix();
  const auto f = ScalarFunction::polynomial(Polynomial({0.0, 1.0, -0.5, 0.25, 0.1}));
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kth_derivative(f, a, b, k));
}
BENCHMARK(BM_KthDerivative)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

void BM_TailBoundSamples(benchmark::State& state) {
  TailBoundExperiment e;
  e.theorem = TheoremId::kth_derivative;
  e.operator_models = {{4, UniformLaw{-1.0, 1.0}, 0}};
  e.fixed_inputs = {ComplexMatrix::Identity(4, 4) * 0.5};
  e.function = ScalarFunction::polynomial(Polynomial({0.0, 1.0, -0.5, 0.25}));
  e.order = 2;
  e.theta_grid = {0.1, 1.0};
  e.samples = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(run_tail_bound(e, {static_cast<int>(state.range(0))}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1000);
}
BENCHMARK(BM_TailBoundSamples)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
