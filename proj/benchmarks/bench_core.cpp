#include <benchmark/benchmark.h>

#include "opspace/bioperators.hpp"
#include "opspace/rng.hpp"
#include "opspace/tensor_products.hpp"

using namespace opspace;

namespace {

AmplifiedElement random_element(const SpacePtr& space, int level, Rng& rng) {
  std::vector<CMatrix> coeffs(space->dim());
  for (auto& c : coeffs) c = rng.gaussian_matrix(level, level);
  return AmplifiedElement(space, level, std::move(coeffs));
}

}  // namespace

static void BM_OpNorm(benchmark::State& state) {
  Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  const CMatrix m = rng.gaussian_matrix(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(op_norm(m));
  state.SetComplexityN(n);
}
BENCHMARK(BM_OpNorm)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_Diamond(benchmark::State& state) {
  Rng rng(2);
  const int m = static_cast<int>(state.range(0));
  const DiamondContext ctx(m);
  const CMatrix a = rng.gaussian_matrix(m, m);
  const CMatrix b = rng.gaussian_matrix(m, m);
  for (auto _ : state) benchmark::DoNotOptimize(diamond(a, b, ctx));
}
BENCHMARK(BM_Diamond)->Arg(4)->Arg(8);

static void BM_AmplifiedNorm(benchmark::State& state) {
  Rng rng(3);
  const int level = static_cast<int>(state.range(0));
  const SpacePtr e = make_random_space(3, 2, 2, rng);
  const AmplifiedElement u = random_element(e, level, rng);
  for (auto _ : state) benchmark::DoNotOptimize(amplified_norm(u));
}
BENCHMARK(BM_AmplifiedNorm)->Arg(4)->Arg(8)->Arg(16);

static void BM_DiamondFactorization(benchmark::State& state) {
  Rng rng(4);
  const int m = static_cast<int>(state.range(0));
  const DiamondContext ctx(m);
  const CMatrix a = rng.gaussian_matrix(m * m, m * m);
  for (auto _ : state)
    benchmark::DoNotOptimize(factor_through_diamond(a, ctx));
}
BENCHMARK(BM_DiamondFactorization)->Arg(2)->Arg(3)->Arg(4);

static void BM_CbEstimateGrowth(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpacePtr hc = make_column_hilbertian(n);
  const SpacePtr hr = make_row_hilbertian(n);
  const LinearMap identity = LinearMap::identity(hc, hr);
  const AmplifiedElement witnesses[] = {make_omega(n, n, hc)};
  const Budget budget{4, 30};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        cb_norm_estimate(identity, n, budget, 7, witnesses));
}
BENCHMARK(BM_CbEstimateGrowth)->Arg(2)->Arg(4);

static void BM_HaagerupBracket(benchmark::State& state) {
  Rng rng(5);
  const SpacePtr e = make_random_space(2, 2, 2, rng);
  const SpacePtr f = make_random_space(2, 2, 2, rng);
  const EffrosTerm term{random_element(e, 2, rng), random_element(f, 2, rng)};
  const TensorRepresentation rep = TensorRepresentation::single(term);
  const Budget budget{4, 30};
  for (auto _ : state)
    benchmark::DoNotOptimize(haagerup_bracket(rep, budget, 11));
}
BENCHMARK(BM_HaagerupBracket);

static void BM_WeakAmplification(benchmark::State& state) {
  Rng rng(6);
  const int n = static_cast<int>(state.range(0));
  const SpacePtr hc = make_column_hilbertian(n);
  const SpacePtr hc_bar = make_conjugate_column(n);
  const Bioperator pairing = make_inner_product(hc, hc_bar);
  const DiamondContext ctx(n);
  const AmplifiedElement omega = make_omega(n, n, hc);
  const AmplifiedElement omega_bar = make_omega(n, n, hc_bar);
  for (auto _ : state)
    benchmark::DoNotOptimize(weak_amplify(pairing, omega, omega_bar, ctx));
}
BENCHMARK(BM_WeakAmplification)->Arg(3)->Arg(6);

BENCHMARK_MAIN();
