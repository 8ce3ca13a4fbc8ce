#include <benchmark/benchmark.h>

#include "lao/learners.hpp"

using namespace lao;

namespace {

const Dataset& l2_data() {
    static const auto task = synth_linear(784, 2000, 784, 0.05, NormCertificate::L2, 1);
    return task.data;
}

const Dataset& linf_data() {
    static const auto task = synth_linear(784, 2000, 50, 0.05, NormCertificate::Linf, 1);
    return task.data;
}

void run(benchmark::State& state, Algorithm algo, const Dataset& data) {
    LearnerConfig c;
    c.k = static_cast<int>(state.range(0));
    c.epsilon = 0.2;
    for (auto _ : state) benchmark::DoNotOptimize(fit(algo, data, c).w_bar);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}

} // namespace

static void BM_AerrFit(benchmark::State& state) { run(state, Algorithm::Aerr, l2_data()); }
BENCHMARK(BM_AerrFit)->Arg(1)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_AelrFit(benchmark::State& state) { run(state, Algorithm::Aelr, linf_data()); }
BENCHMARK(BM_AelrFit)->Arg(1)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_AesvrFit(benchmark::State& state) { run(state, Algorithm::Aesvr, l2_data()); }
BENCHMARK(BM_AesvrFit)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_OgdFit(benchmark::State& state) { run(state, Algorithm::Ogd, l2_data()); }
BENCHMARK(BM_OgdFit)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_EgFit(benchmark::State& state) { run(state, Algorithm::Eg, linf_data()); }
BENCHMARK(BM_EgFit)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
