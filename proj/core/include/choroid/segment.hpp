#pragma once

#include <memory>
#include <string>
#include <variant>

#include "choroid/image.hpp"
#include "choroid/ingest.hpp"
#include "choroid/nnexec.hpp"

namespace choroid {

/// Runs the embedded executor on the preprocessed, standardized scan.
struct EmbeddedCnnBackend {
    std::shared_ptr<const nn::Network> net;
};

/// Resolves a per-image probability map file from a pattern; "{}" in the
/// pattern is replaced by the scan id, a bare directory maps to dir/<id>.pmap.
/// Maps at model resolution are mapped back to native; maps already at native
/// resolution pass through.
struct ExternalMapBackend {
    std::string pattern;
};

/// Resolves the phantom ground-truth map (dir/<id>_truth.pmap by default) and
/// passes it through untouched, so downstream stages see exact 0/1 values.
struct PhantomOracleBackend {
    std::string pattern;
};

using SegmenterBackend = std::variant<EmbeddedCnnBackend, ExternalMapBackend, PhantomOracleBackend>;

/// Full scan -> native-resolution probability map. Preprocesses (crop, resize),
/// invokes the backend, and maps model-resolution output back to native
/// (bilinear, zero re-padding). An all-black scan yields an all-zero map
/// rather than an error; an empty segmentation is a legal output.
ProbabilityMap segment(const BScan& scan, const SegmenterBackend& backend,
                       const PreprocessConfig& cfg = {});

/// value >= threshold -> 1. Threshold must lie in [0,1].
ChoroidMask binarize(const ProbabilityMap& pmap, double threshold = 0.5);

/// Keeps only the largest 8-connected component; ties broken by the earliest
/// (topmost, then leftmost) anchor pixel in scan order. Empty in, empty out.
ChoroidMask largest_component(const ChoroidMask& mask);

} // namespace choroid
