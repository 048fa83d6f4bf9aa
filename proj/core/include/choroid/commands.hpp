#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "choroid/augment.hpp"
#include "choroid/ingest.hpp"
#include "choroid/measure.hpp"

namespace choroid::cmd {

/// Batch run configuration shared by all subcommands; populated from the JSON
/// config file, then overridden by CLI flags.
struct RunConfig {
    std::string input;    // directory of images / masks / maps
    std::string out_dir;  // created if missing

    std::string backend = "cnn";  // cnn | external | oracle
    std::string spec_path;
    std::string weights_path;
    std::string maps;  // external-map pattern or directory

    double threshold = 0.5;
    int workers = 1;
    uint64_t seed = 0;
    bool plots = true;

    std::optional<int> fovea_col;  // global override
    std::string fovea_csv;         // per-file override: file,fovea_col
    std::optional<double> lateral_um;
    std::optional<double> axial_um;

    int smoothing_window = 31;
    double extent_margin_px = 0.5;

    int phantom_count = 5;
    int phantom_width = 768;
    int phantom_height = 768;

    PreprocessConfig pre;
    MeasureConfig measure;
    AugmentConfig augment;
};

RunConfig load_run_config(const std::string& json_path);

/// Segments every readable image in cfg.input: writes <stem>.pmap,
/// <stem>_mask.png and a metadata sidecar per image, failures.csv for
/// per-image errors and timing.csv with wall-clock seconds per image.
/// Returns 0 unless the batch itself cannot run.
int cmd_segment(const RunConfig& cfg);

/// Measures every mask (or probability map) in cfg.input into
/// measurements.csv; rows that cannot be measured carry the error text.
int cmd_measure(const RunConfig& cfg);

/// Compares two measurement CSVs (numeric agreement + plots) or two
/// directories of masks/maps (Dice/AUC). Writes report.json and SVGs.
int cmd_compare(const RunConfig& cfg, const std::string& series_a, const std::string& series_b);

/// Deterministic phantom corpus: image + sidecar + ground truth per case.
int cmd_phantom(const RunConfig& cfg);

/// Applies the augmentation stack to every image with per-image split seeds;
/// writes augmented images and one JSONL transform log each.
int cmd_augment(const RunConfig& cfg);

} // namespace choroid::cmd
