#include <benchmark/benchmark.h>

#include "choroid/boundary.hpp"
#include "choroid/measure.hpp"
#include "choroid/phantom.hpp"
#include "choroid/segment.hpp"

using namespace choroid;

namespace {

phantom::PhantomSpec bench_spec() {
    phantom::PhantomSpec spec;
    spec.meta.width_px = 768;
    spec.meta.height_px = 768;
    spec.meta.axial_scale_um = 3.87;
    spec.meta.fovea_col = 384;
    spec.upper_a0 = 1000.0;
    spec.upper_a1 = 0.02;
    spec.thick_t0 = 280.0;
    spec.seed = 9;
    return spec;
}

void bm_phantom_generate(benchmark::State& state) {
    const phantom::PhantomSpec spec = bench_spec();
    for (auto _ : state) {
        phantom::PhantomResult res = phantom::generate(spec);
        benchmark::DoNotOptimize(res.scan.pixels.data.data());
    }
}
BENCHMARK(bm_phantom_generate)->Unit(benchmark::kMillisecond);

void bm_preprocess(benchmark::State& state) {
    phantom::PhantomResult res = phantom::generate(bench_spec());
    const PreprocessConfig cfg;
    for (auto _ : state) {
        auto [cropped, rec] = crop_black_space(res.scan, cfg);
        Image grid = standardize(resize_to_model(cropped, cfg), cfg);
        benchmark::DoNotOptimize(grid.data.data());
        benchmark::DoNotOptimize(rec.top_rows_removed);
    }
}
BENCHMARK(bm_preprocess)->Unit(benchmark::kMillisecond);

void bm_mask_to_measurements(benchmark::State& state) {
    phantom::PhantomResult res = phantom::generate(bench_spec());
    for (auto _ : state) {
        ChoroidMask mask = largest_component(binarize(res.truth_pmap, 0.5));
        BoundaryPair bnd = boundaries_from_mask(mask);
        Measurements m = measure_all(bnd, &mask, 384, res.scan.meta);
        benchmark::DoNotOptimize(m.mean_thickness_um);
    }
}
BENCHMARK(bm_mask_to_measurements)->Unit(benchmark::kMillisecond);

} // namespace
