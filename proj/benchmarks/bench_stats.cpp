#include <benchmark/benchmark.h>

#include "choroid/rng.hpp"
#include "choroid/stats.hpp"

using namespace choroid;

namespace {

void bm_auc(benchmark::State& state) {
    const size_t n = static_cast<size_t>(state.range(0));
    Rng rng(1);
    std::vector<double> scores(n);
    std::vector<uint8_t> labels(n);
    labels[0] = 1;
    labels[1] = 0;
    for (size_t i = 0; i < n; ++i) {
        scores[i] = rng.uniform();
        if (i > 1) labels[i] = rng.uniform() < 0.5;
    }
    for (auto _ : state) benchmark::DoNotOptimize(stats::auc(scores, labels));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_auc)->Arg(1 << 10)->Arg(1 << 16)->Arg(589824);  // last: one 768x768 map

void bm_dice(benchmark::State& state) {
    Rng rng(2);
    Mask a(768, 768), b(768, 768);
    for (auto& v : a.data) v = rng.uniform() < 0.3;
    for (auto& v : b.data) v = rng.uniform() < 0.3;
    for (auto _ : state) benchmark::DoNotOptimize(stats::dice(a, b));
}
BENCHMARK(bm_dice)->Unit(benchmark::kMicrosecond);

void bm_linfit(benchmark::State& state) {
    Rng rng(3);
    std::vector<double> x(54), y(54);
    for (int i = 0; i < 54; ++i) {
        x[i] = 200 + rng.normal(0, 40);
        y[i] = x[i] + rng.normal(0, 12);
    }
    for (auto _ : state) {
        stats::LinFit f = stats::linfit_ci(x, y);
        benchmark::DoNotOptimize(f.slope_ci_lo);
    }
}
BENCHMARK(bm_linfit)->Unit(benchmark::kMicrosecond);

} // namespace
