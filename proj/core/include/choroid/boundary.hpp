#pragma once

#include <string>
#include <vector>

#include "choroid/image.hpp"
#include "choroid/ingest.hpp"

namespace choroid {

struct Vec2 {
    double x = 0.0;  // lateral, μm
    double y = 0.0;  // axial (depth, downward positive), μm
};

/// Subpixel upper/lower choroid boundary rows as functions of column over the
/// contiguous hull of nonempty columns. gap[i] marks columns whose values were
/// interpolated across an interior hole.
struct BoundaryPair {
    int col_start = 0;
    int col_end = -1;  // inclusive
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<uint8_t> gap;
    int smoothing_window = 1;

    int ncols() const { return col_end - col_start + 1; }
    bool contains(int col) const { return col >= col_start && col <= col_end; }
    double upper_at(int col) const { return upper[col - col_start]; }
    double lower_at(int col) const { return lower[col - col_start]; }
};

/// Per column with any positive pixel: upper = min positive row, lower = max
/// positive row. Interior empty columns are linearly interpolated and flagged.
/// Errors with EmptyMask on an empty mask.
BoundaryPair extract_boundaries(const ChoroidMask& mask);

/// Centered moving average; the window shrinks symmetrically near the ends, so
/// affine sequences pass through unchanged everywhere. window must be odd >= 1.
std::vector<double> smooth_boundary(const std::vector<double>& rows, int window);

/// Smooths both curves of a pair with the same window.
BoundaryPair smooth_pair(const BoundaryPair& bnd, int window);

/// Unit tangent of the (smoothed) upper boundary at a column, computed in
/// physical μm coordinates: OCT pixels are anisotropic, and a perpendicular
/// constructed in pixel space would point in the wrong physical direction.
/// Central difference over ±halfwidth columns, one-sided near the span ends.
Vec2 tangent_at(const BoundaryPair& bnd, int col, const ScanMetadata& meta, int halfwidth = 15);

/// Mask -> measurement-ready boundaries: extract, widen each pixel extent by
/// extent_margin_px toward the true continuum boundary (a pixel run [r0,r1]
/// estimates a band [r0-0.5, r1+0.5]), then smooth. This keeps mask-derived
/// thickness and area unbiased against rasterization.
BoundaryPair boundaries_from_mask(const ChoroidMask& mask, int window = 31,
                                  double extent_margin_px = 0.5);

std::string boundary_to_json(const BoundaryPair& bnd);
BoundaryPair boundary_from_json(const std::string& text);

} // namespace choroid
