#include <iostream>
#include <string>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "CLI11.hpp"

#include "choroid/commands.hpp"
#include "choroid/error.hpp"

using choroid::cmd::RunConfig;

namespace {

/// --config is applied before flag parsing so flags override file values.
RunConfig preload_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config")
            return choroid::cmd::load_run_config(argv[i + 1]);
    return RunConfig{};
}

void add_common_flags(CLI::App* sub, RunConfig& cfg) {
    std::string ignored;
    sub->add_option("--config", ignored, "JSON config file; flags override its values");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--workers", cfg.workers, "worker thread count");
    sub->add_option("--seed", cfg.seed, "master seed");
}

void add_metadata_flags(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--fovea-col", [&cfg](const CLI::results_t& v) {
        cfg.fovea_col = std::stoi(v[0]);
        return true;
    }, "fovea column override (pixels, native resolution)");
    sub->add_option("--fovea-csv", cfg.fovea_csv, "per-file fovea CSV (file,fovea_col)");
    sub->add_option("--lateral-um", [&cfg](const CLI::results_t& v) {
        cfg.lateral_um = std::stod(v[0]);
        return true;
    }, "lateral scale override, μm per pixel");
    sub->add_option("--axial-um", [&cfg](const CLI::results_t& v) {
        cfg.axial_um = std::stod(v[0]);
        return true;
    }, "axial scale override, μm per pixel");
}

} // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
    // the per-image forward pass churns through multi-MB tensors; without
    // these, glibc services them via mmap/munmap and page-zeroing dominates
    mallopt(M_MMAP_THRESHOLD, 64 * 1024 * 1024);
    mallopt(M_TRIM_THRESHOLD, 512 * 1024 * 1024);
#endif
    RunConfig cfg = preload_config(argc, argv);

    CLI::App app{"choroid: raw OCT B-scans to choroid measurements and agreement statistics"};
    app.require_subcommand(1);

    auto* seg = app.add_subcommand("segment", "segment a directory of B-scans");
    seg->add_option("--in", cfg.input, "input image directory")->required();
    seg->add_option("--backend", cfg.backend, "cnn | external | oracle");
    seg->add_option("--spec", cfg.spec_path, "network spec JSON (cnn backend)");
    seg->add_option("--weights", cfg.weights_path, "weights blob (cnn backend)");
    seg->add_option("--maps", cfg.maps, "probability-map pattern or directory (external/oracle)");
    seg->add_option("--threshold", cfg.threshold, "binarization threshold");
    add_metadata_flags(seg, cfg);
    add_common_flags(seg, cfg);

    auto* mea = app.add_subcommand("measure", "measure masks/maps into a CSV");
    mea->add_option("--in", cfg.input, "directory of *_mask.png or *.pmap")->required();
    mea->add_option("--threshold", cfg.threshold, "binarization threshold for maps");
    mea->add_option("--window", cfg.smoothing_window, "boundary smoothing window (columns, odd)");
    std::string area_mode = "integrate";
    mea->add_option("--area-mode", area_mode, "integrate | pixels");
    add_metadata_flags(mea, cfg);
    add_common_flags(mea, cfg);

    auto* cmp = app.add_subcommand("compare", "method agreement between two series");
    std::string series_a, series_b;
    cmp->add_option("series_a", series_a, "measurements CSV or mask directory")->required();
    cmp->add_option("series_b", series_b, "measurements CSV or mask directory")->required();
    cmp->add_option("--threshold", cfg.threshold, "binarization threshold for maps");
    bool no_plots = false;
    cmp->add_flag("--no-plots", no_plots, "skip SVG emission");
    add_common_flags(cmp, cfg);

    auto* pha = app.add_subcommand("phantom", "generate a synthetic phantom corpus");
    pha->add_option("--n", cfg.phantom_count, "number of phantoms");
    pha->add_option("--width", cfg.phantom_width, "image width, px");
    pha->add_option("--height", cfg.phantom_height, "image height, px");
    add_common_flags(pha, cfg);

    auto* aug = app.add_subcommand("augment", "apply the augmentation stack to a directory");
    aug->add_option("--in", cfg.input, "input image directory")->required();
    aug->add_option("--p-flip", cfg.augment.p_flip, "flip probability");
    aug->add_option("--p-brightness", cfg.augment.p_brightness_contrast,
                    "brightness/contrast probability");
    aug->add_option("--p-speckle", cfg.augment.p_speckle, "speckle probability");
    aug->add_option("--p-blur", cfg.augment.p_blur, "blur probability");
    aug->add_option("--p-affine", cfg.augment.p_affine, "affine probability");
    add_common_flags(aug, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (seg->parsed()) return choroid::cmd::cmd_segment(cfg);
        if (mea->parsed()) {
            cfg.measure.area_mode = area_mode == "pixels" ? choroid::AreaMode::PixelCount
                                                          : choroid::AreaMode::Integrate;
            return choroid::cmd::cmd_measure(cfg);
        }
        if (cmp->parsed()) {
            cfg.plots = cfg.plots && !no_plots;
            return choroid::cmd::cmd_compare(cfg, series_a, series_b);
        }
        if (pha->parsed()) return choroid::cmd::cmd_phantom(cfg);
        if (aug->parsed()) return choroid::cmd::cmd_augment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
