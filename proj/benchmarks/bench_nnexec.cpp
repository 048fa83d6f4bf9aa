#include <benchmark/benchmark.h>

#include "choroid/nnexec.hpp"
#include "choroid/rng.hpp"

#ifndef CHOROID_FIXTURE_DIR
#define CHOROID_FIXTURE_DIR "fixtures"
#endif

using namespace choroid;
using namespace choroid::nn;

namespace {

Tensor random_tensor(int c, int h, int w, uint64_t seed) {
    Rng rng(seed);
    Tensor t(c, h, w);
    for (float& v : t.data) v = static_cast<float>(rng.normal());
    return t;
}

std::vector<float> random_floats(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<float> v(n);
    for (float& x : v) x = static_cast<float>(rng.normal(0, 0.5));
    return v;
}

void bm_conv1x1(benchmark::State& state) {
    const int c_in = static_cast<int>(state.range(0));
    const int c_out = static_cast<int>(state.range(1));
    Tensor x = random_tensor(c_in, 136, 192, 1);
    auto w = random_floats(static_cast<size_t>(c_out) * c_in, 2);
    auto b = random_floats(c_out, 3);
    for (auto _ : state) {
        Tensor y = conv2d(x, w, b, {c_in, c_out, 1, 1, 0, 1});
        benchmark::DoNotOptimize(y.data.data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(c_in) * c_out * 136 * 192);
}
BENCHMARK(bm_conv1x1)->Args({16, 24})->Args({64, 24})->Args({120, 40});

void bm_conv3x3_depthwise(benchmark::State& state) {
    const int c = static_cast<int>(state.range(0));
    Tensor x = random_tensor(c, 136, 192, 4);
    auto w = random_floats(static_cast<size_t>(c) * 9, 5);
    auto b = random_floats(c, 6);
    for (auto _ : state) {
        Tensor y = conv2d(x, w, b, {c, c, 3, 1, 1, c});
        benchmark::DoNotOptimize(y.data.data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(c) * 9 * 136 * 192);
}
BENCHMARK(bm_conv3x3_depthwise)->Arg(16)->Arg(40);

void bm_fixture_forward(benchmark::State& state) {
    Network net = load_network(std::string(CHOROID_FIXTURE_DIR) + "/small_unet.json",
                               std::string(CHOROID_FIXTURE_DIR) + "/small_unet.nnx");
    Rng rng(7);
    Image in(net.in_height, net.in_width);
    for (float& v : in.data) v = static_cast<float>(rng.normal());
    for (auto _ : state) {
        ProbabilityMap out = forward(net, in);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(bm_fixture_forward)->Unit(benchmark::kMillisecond);

} // namespace
