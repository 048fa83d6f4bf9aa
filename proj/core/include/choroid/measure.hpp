#pragma once

#include <string>
#include <vector>

#include "choroid/boundary.hpp"
#include "choroid/image.hpp"
#include "choroid/ingest.hpp"

namespace choroid {

enum class AreaMode { Integrate, PixelCount };

struct MeasureConfig {
    std::vector<double> thickness_offsets_um = {-2000.0, 0.0, 2000.0};
    double area_halfwidth_um = 3000.0;
    double ray_step_um = 1.0;
    double ray_refine_um = 0.01;
    int tangent_halfwidth_cols = 15;
    // Integrate measures the subpixel boundary gap per column; PixelCount
    // counts binarized mask pixels, the literal (jitter-prone) reading.
    AreaMode area_mode = AreaMode::Integrate;
};

struct Measurements {
    std::vector<double> offsets_um;       // requested loci offsets
    std::vector<double> thickness_um;     // per offset
    double mean_thickness_um = 0.0;
    double area_mm2 = 0.0;
    std::vector<int> loci_cols;           // resolved column per offset
    int roi_col_start = 0, roi_col_end = -1;
    std::vector<std::string> warnings;
};

/// Perpendicular choroid thickness at a locus column: casts a ray from the
/// upper boundary along the inward unit normal (physical μm coordinates) and
/// returns the distance to its first crossing of the piecewise-linear lower
/// boundary, refined by bisection to cfg.ray_refine_um.
/// Errors: LocusOutsideSpan; RoiExceedsSegmentation when the ray leaves the
/// lateral span before crossing.
double thickness_at(const BoundaryPair& bnd, int locus_col, const ScanMetadata& meta,
                    const MeasureConfig& cfg = {});

struct ThicknessResult {
    std::vector<int> loci_cols;
    std::vector<double> values_um;
    double mean_um;
};

/// Thickness at fovea and at each configured offset (loci resolved by rounding
/// offset/lateral_scale to whole columns), plus their arithmetic mean.
/// If any locus fails, the error lists every failing locus; no partial mean.
ThicknessResult mean_thickness(const BoundaryPair& bnd, int fovea_col, const ScanMetadata& meta,
                               const MeasureConfig& cfg = {});

struct AreaResult {
    double area_mm2;
    int roi_col_start, roi_col_end;
    std::vector<std::string> warnings;
};

/// Column integration of max(0, lower-upper)*axial*lateral over the ROI
/// |x - x_fovea| <= area_halfwidth_um, in mm². ROI columns beyond the
/// segmentation span produce a RoiTruncated warning, not silent zeros.
AreaResult choroid_area(const BoundaryPair& bnd, int fovea_col, const ScanMetadata& meta,
                        const MeasureConfig& cfg = {});

/// Literal pixel counting inside the ROI columns.
AreaResult choroid_area_pixel_count(const ChoroidMask& mask, int fovea_col,
                                    const ScanMetadata& meta, const MeasureConfig& cfg = {});

/// Thickness + area in one record; mask may be null when area_mode is Integrate.
Measurements measure_all(const BoundaryPair& bnd, const ChoroidMask* mask, int fovea_col,
                         const ScanMetadata& meta, const MeasureConfig& cfg = {});

} // namespace choroid
