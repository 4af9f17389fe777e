#include <benchmark/benchmark.h>

#include <random>

#include "equistab/dynamics.hpp"
#include "equistab/methods.hpp"
#include "equistab/registry.hpp"

using namespace equistab;

namespace {

numkit::SymmetricMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  numkit::SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, u(rng));
  return m;
}

methods::AnalysisProblem rigid_body_problem() {
  const auto rb = app::rigid_body();
  return methods::AnalysisProblem(rb.vector_field, rb.constant_fields(), 1,
                                  fields::EquilibriumPoint(rb.vector_field, {1, 0, 0}));
}

void BM_SymmetricEigen(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(numkit::symmetric_eigen(a));
}
BENCHMARK(BM_SymmetricEigen)->Arg(3)->Arg(6)->Arg(12)->Arg(24);

void BM_NullSpace(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rows = random_symmetric(n, 2).rows();
  const std::vector<numkit::Vector> half(rows.begin(), rows.begin() + static_cast<long>(n / 2));
  for (auto _ : state) benchmark::DoNotOptimize(numkit::null_space(half, n));
}
BENCHMARK(BM_NullSpace)->Arg(6)->Arg(12)->Arg(24);

void BM_FinslerSearch(benchmark::State& state) {
  // P = diag(1, -s): needs alpha of order s on Q = e2 e2^T.
  const double s = static_cast<double>(state.range(0));
  const auto p = numkit::SymmetricMatrix::diagonal({1.0, -s});
  const auto q = numkit::SymmetricMatrix::diagonal({0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(numkit::finsler_alpha_search(p, q, 1));
}
BENCHMARK(BM_FinslerSearch)->Arg(1)->Arg(1000)->Arg(1000000);

void BM_EquivalenceHarness(benchmark::State& state) {
  const auto problem = rigid_body_problem();
  for (auto _ : state) benchmark::DoNotOptimize(methods::equivalence_harness(problem));
}
BENCHMARK(BM_EquivalenceHarness);

void BM_Integrate(benchmark::State& state) {
  const auto rb = app::rigid_body();
  const dynamics::IntegratorConfig cfg{1e-3, 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::integrate(rb.vector_field, {0.6, 0.7, 0.8}, cfg, 1000));
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

void BM_Probe(benchmark::State& state) {
  const auto rb = app::rigid_body();
  dynamics::ProbeSettings s;
  s.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::stability_probe(rb.vector_field, {1, 0, 0}, s));
}
BENCHMARK(BM_Probe)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
