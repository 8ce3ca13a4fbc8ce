#include <benchmark/benchmark.h>

#include <cmath>

#include "lao/estimators.hpp"
#include "lao/smoothing.hpp"

using namespace lao;

namespace {

std::vector<double> ramp(std::size_t d, double scale) {
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = scale * std::sin(1.0 + static_cast<double>(i));
    return v;
}

} // namespace

static void BM_SampleSparseInstance(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    const LabeledInstance inst(ramp(d, 1.0 / std::sqrt(double(d))), 0.3);
    BudgetLedger ledger;
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_sparse_instance(inst, k, ledger, rng));
}
BENCHMARK(BM_SampleSparseInstance)->Args({784, 1})->Args({784, 4})->Args({784, 64});

static void BM_ResidualEstimateL2(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto w = ramp(d, 0.05);
    const LabeledInstance inst(ramp(d, 1.0 / std::sqrt(double(d))), 0.3);
    BudgetLedger ledger;
    Rng rng(2);
    for (auto _ : state) benchmark::DoNotOptimize(residual_estimate_l2(w, inst, ledger, rng));
}
BENCHMARK(BM_ResidualEstimateL2)->Arg(20)->Arg(784)->Arg(10000);

static void BM_ResidualEstimateL1(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto w = ramp(d, 0.01);
    const LabeledInstance inst(ramp(d, 1.0), 0.3);
    BudgetLedger ledger;
    Rng rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(residual_estimate_l1(w, inst, ledger, rng));
}
BENCHMARK(BM_ResidualEstimateL1)->Arg(20)->Arg(784)->Arg(10000);

static void BM_GenEstErf(benchmark::State& state) {
    const std::size_t d = 64;
    const auto w = ramp(d, 0.1);
    const LabeledInstance inst(ramp(d, 0.1), 0.2);
    BudgetLedger ledger;
    Rng rng(4);
    for (auto _ : state) benchmark::DoNotOptimize(gen_est(w, inst, erf_taylor_coeff, 1.0, ledger, rng));
}
BENCHMARK(BM_GenEstErf);

static void BM_Rho(benchmark::State& state) {
    double x = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rho(x));
        x = x > 3.0 ? -3.0 : x + 1e-3;
    }
}
BENCHMARK(BM_Rho);
