#include "choroid/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace choroid {

namespace {

/// Piecewise-linear lower boundary value at lateral position x (μm), over the
/// span's column grid. x must lie within the span.
double lower_at_um(const BoundaryPair& bnd, const ScanMetadata& meta, double x_um) {
    const double col = x_um / meta.lateral_scale_um;
    const double f = col - bnd.col_start;
    const int n = bnd.ncols();
    const int i0 = std::clamp(static_cast<int>(std::floor(f)), 0, n - 1);
    const int i1 = std::min(i0 + 1, n - 1);
    const double t = std::clamp(f - i0, 0.0, 1.0);
    return (bnd.lower[i0] + t * (bnd.lower[i1] - bnd.lower[i0])) * meta.axial_scale_um;
}

} // namespace

double thickness_at(const BoundaryPair& bnd, int locus_col, const ScanMetadata& meta,
                    const MeasureConfig& cfg) {
    if (!bnd.contains(locus_col))
        raise(ErrorCode::LocusOutsideSpan,
              "thickness_at: locus column " + std::to_string(locus_col) + " outside span");
    if (cfg.ray_step_um <= 0.0 || cfg.ray_refine_um <= 0.0)
        raise(ErrorCode::InvalidArgument, "thickness_at: ray steps must be positive");

    const Vec2 t = tangent_at(bnd, locus_col, meta, cfg.tangent_halfwidth_cols);
    // inward normal: perpendicular to the tangent, oriented toward greater depth
    Vec2 n{-t.y, t.x};
    if (n.y < 0.0) {
        n.x = -n.x;
        n.y = -n.y;
    }

    const double x0 = locus_col * meta.lateral_scale_um;
    const double y0 = bnd.upper_at(locus_col) * meta.axial_scale_um;
    const double x_lo = bnd.col_start * meta.lateral_scale_um;
    const double x_hi = bnd.col_end * meta.lateral_scale_um;

    auto f = [&](double s) {
        return (y0 + s * n.y) - lower_at_um(bnd, meta, x0 + s * n.x);
    };

    // march until the ray crosses the lower boundary, then bisect
    const double s_max =
        (static_cast<double>(bnd.ncols()) * meta.lateral_scale_um +
         2.0 * std::abs(bnd.lower[0] - bnd.upper[0] + 1.0) * meta.axial_scale_um) +
        65536.0 * meta.axial_scale_um;
    double s_prev = 0.0;
    double f_prev = f(0.0);
    if (f_prev >= 0.0) return 0.0;  // degenerate: boundaries touch at the locus

    double s = cfg.ray_step_um;
    while (true) {
        const double x = x0 + s * n.x;
        if (x < x_lo || x > x_hi)
            raise(ErrorCode::RoiExceedsSegmentation,
                  "thickness_at: perpendicular ray leaves the segmented span at column " +
                      std::to_string(locus_col));
        const double fs = f(s);
        if (fs >= 0.0) break;
        s_prev = s;
        f_prev = fs;
        s += cfg.ray_step_um;
        if (s > s_max)
            raise(ErrorCode::RoiExceedsSegmentation,
                  "thickness_at: no lower-boundary crossing found");
    }

    double lo = s_prev, hi = s;
    while (hi - lo > cfg.ray_refine_um) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

ThicknessResult mean_thickness(const BoundaryPair& bnd, int fovea_col, const ScanMetadata& meta,
                               const MeasureConfig& cfg) {
    ThicknessResult res;
    std::vector<std::string> failures;
    for (double offset : cfg.thickness_offsets_um) {
        const int col = fovea_col + static_cast<int>(std::lround(offset / meta.lateral_scale_um));
        res.loci_cols.push_back(col);
        try {
            res.values_um.push_back(thickness_at(bnd, col, meta, cfg));
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "locus " << std::showpos << offset << std::noshowpos << " um (col " << col
                << "): " << e.what();
            failures.push_back(msg.str());
        }
    }
    if (!failures.empty()) {
        std::string msg = "mean_thickness failed at " + std::to_string(failures.size()) +
                          " of " + std::to_string(cfg.thickness_offsets_um.size()) + " loci: ";
        for (size_t i = 0; i < failures.size(); ++i)
            msg += (i ? "; " : "") + failures[i];
        raise(ErrorCode::LocusOutsideSpan, msg);
    }
    double sum = 0.0;
    for (double v : res.values_um) sum += v;
    res.mean_um = sum / static_cast<double>(res.values_um.size());
    return res;
}

namespace {

struct RoiCols {
    int lo, hi;  // inclusive requested ROI in columns
};

RoiCols roi_columns(int fovea_col, const ScanMetadata& meta, double halfwidth_um) {
    const int half_cols = static_cast<int>(std::floor(halfwidth_um / meta.lateral_scale_um));
    return {fovea_col - half_cols, fovea_col + half_cols};
}

void check_fovea(int fovea_col, const ScanMetadata& meta) {
    if (fovea_col < 0 || fovea_col >= meta.width_px)
        raise(ErrorCode::InvalidArgument, "fovea column outside image");
}

} // namespace

AreaResult choroid_area(const BoundaryPair& bnd, int fovea_col, const ScanMetadata& meta,
                        const MeasureConfig& cfg) {
    check_fovea(fovea_col, meta);
    const RoiCols roi = roi_columns(fovea_col, meta, cfg.area_halfwidth_um);
    const int lo = std::max(roi.lo, bnd.col_start);
    const int hi = std::min(roi.hi, bnd.col_end);

    AreaResult res{0.0, lo, hi, {}};
    if (lo > hi) {  // empty intersection, conveyed by start > end
        res.warnings.push_back("RoiTruncated: ROI does not overlap the segmentation span");
        return res;
    }
    if (roi.lo < bnd.col_start || roi.hi > bnd.col_end) {
        const int missing = (std::max(0, bnd.col_start - roi.lo)) +
                            (std::max(0, roi.hi - bnd.col_end));
        res.warnings.push_back("RoiTruncated: " + std::to_string(missing) +
                               " ROI columns beyond segmentation span");
    }

    double sum_px = 0.0;  // vertical extent in pixels, summed over columns
    for (int c = lo; c <= hi; ++c)
        sum_px += std::max(0.0, bnd.lower_at(c) - bnd.upper_at(c));
    res.area_mm2 = sum_px * meta.axial_scale_um * meta.lateral_scale_um / 1e6;
    return res;
}

AreaResult choroid_area_pixel_count(const ChoroidMask& mask, int fovea_col,
                                    const ScanMetadata& meta, const MeasureConfig& cfg) {
    check_fovea(fovea_col, meta);
    const RoiCols roi = roi_columns(fovea_col, meta, cfg.area_halfwidth_um);
    const int lo = std::max(roi.lo, 0);
    const int hi = std::min(roi.hi, mask.width - 1);

    AreaResult res{0.0, lo, hi, {}};
    size_t count = 0;
    for (int r = 0; r < mask.height; ++r)
        for (int c = lo; c <= hi; ++c) count += mask.at(r, c) != 0;
    res.area_mm2 = static_cast<double>(count) * meta.axial_scale_um * meta.lateral_scale_um / 1e6;
    if (roi.lo < 0 || roi.hi >= mask.width)
        res.warnings.push_back("RoiTruncated: ROI extends beyond the image");
    return res;
}

Measurements measure_all(const BoundaryPair& bnd, const ChoroidMask* mask, int fovea_col,
                         const ScanMetadata& meta, const MeasureConfig& cfg) {
    Measurements m;
    m.offsets_um = cfg.thickness_offsets_um;

    ThicknessResult t = mean_thickness(bnd, fovea_col, meta, cfg);
    m.thickness_um = t.values_um;
    m.loci_cols = t.loci_cols;
    m.mean_thickness_um = t.mean_um;

    AreaResult a = (cfg.area_mode == AreaMode::PixelCount && mask)
                       ? choroid_area_pixel_count(*mask, fovea_col, meta, cfg)
                       : choroid_area(bnd, fovea_col, meta, cfg);
    if (cfg.area_mode == AreaMode::PixelCount && !mask)
        m.warnings.push_back("pixel-count area requested without a mask; used integration");
    m.area_mm2 = a.area_mm2;
    m.roi_col_start = a.roi_col_start;
    m.roi_col_end = a.roi_col_end;
    m.warnings.insert(m.warnings.end(), a.warnings.begin(), a.warnings.end());
    return m;
}

} // namespace choroid
