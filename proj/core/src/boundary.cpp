#include "choroid/boundary.hpp"

#include <cmath>

#include "json.hpp"

namespace choroid {

BoundaryPair extract_boundaries(const ChoroidMask& mask) {
    const int h = mask.height, w = mask.width;
    std::vector<double> upper(w), lower(w);
    std::vector<uint8_t> nonempty(w, 0);

    int first = -1, last = -1;
    for (int c = 0; c < w; ++c) {
        int lo = -1, hi = -1;
        for (int r = 0; r < h; ++r) {
            if (mask.at(r, c)) {
                if (lo < 0) lo = r;
                hi = r;
            }
        }
        if (lo >= 0) {
            nonempty[c] = 1;
            upper[c] = lo;
            lower[c] = hi;
            if (first < 0) first = c;
            last = c;
        }
    }
    if (first < 0) raise(ErrorCode::EmptyMask, "extract_boundaries: empty mask");

    BoundaryPair bnd;
    bnd.col_start = first;
    bnd.col_end = last;
    const int n = bnd.ncols();
    bnd.upper.resize(n);
    bnd.lower.resize(n);
    bnd.gap.assign(n, 0);

    // fill gaps by linear interpolation between the flanking nonempty columns
    int prev = first;
    for (int c = first; c <= last; ++c) {
        if (nonempty[c]) {
            if (c > prev + 1) {
                const double span = c - prev;
                for (int g = prev + 1; g < c; ++g) {
                    const double t = (g - prev) / span;
                    bnd.upper[g - first] = upper[prev] + t * (upper[c] - upper[prev]);
                    bnd.lower[g - first] = lower[prev] + t * (lower[c] - lower[prev]);
                    bnd.gap[g - first] = 1;
                }
            }
            bnd.upper[c - first] = upper[c];
            bnd.lower[c - first] = lower[c];
            prev = c;
        }
    }
    return bnd;
}

std::vector<double> smooth_boundary(const std::vector<double>& rows, int window) {
    if (window < 1 || window % 2 == 0)
        raise(ErrorCode::InvalidArgument, "smooth_boundary: window must be odd and >= 1");
    const int n = static_cast<int>(rows.size());
    if (window == 1 || n <= 1) return rows;

    const int half = window / 2;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int reach = std::min({half, i, n - 1 - i});
        double acc = 0.0;
        for (int j = i - reach; j <= i + reach; ++j) acc += rows[j];
        out[i] = acc / (2 * reach + 1);
    }
    return out;
}

BoundaryPair smooth_pair(const BoundaryPair& bnd, int window) {
    BoundaryPair out = bnd;
    out.upper = smooth_boundary(bnd.upper, window);
    out.lower = smooth_boundary(bnd.lower, window);
    out.smoothing_window = window;
    return out;
}

Vec2 tangent_at(const BoundaryPair& bnd, int col, const ScanMetadata& meta, int halfwidth) {
    if (!bnd.contains(col))
        raise(ErrorCode::LocusOutsideSpan, "tangent_at: column outside boundary span");
    const int c0 = std::max(bnd.col_start, col - halfwidth);
    const int c1 = std::min(bnd.col_end, col + halfwidth);
    if (c0 == c1) return {1.0, 0.0};

    const double dx = (c1 - c0) * meta.lateral_scale_um;
    const double dy = (bnd.upper_at(c1) - bnd.upper_at(c0)) * meta.axial_scale_um;
    const double norm = std::hypot(dx, dy);
    return {dx / norm, dy / norm};
}

BoundaryPair boundaries_from_mask(const ChoroidMask& mask, int window, double extent_margin_px) {
    BoundaryPair bnd = extract_boundaries(mask);
    for (double& v : bnd.upper) v -= extent_margin_px;
    for (double& v : bnd.lower) v += extent_margin_px;
    return smooth_pair(bnd, window);
}

std::string boundary_to_json(const BoundaryPair& bnd) {
    nlohmann::ordered_json j;
    j["col_start"] = bnd.col_start;
    j["col_end"] = bnd.col_end;
    j["smoothing_window"] = bnd.smoothing_window;
    j["upper"] = bnd.upper;
    j["lower"] = bnd.lower;
    std::vector<int> gap_cols;
    for (int i = 0; i < bnd.ncols(); ++i)
        if (bnd.gap[i]) gap_cols.push_back(bnd.col_start + i);
    j["gap_cols"] = gap_cols;
    return j.dump();
}

BoundaryPair boundary_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::IoError, std::string("bad boundary JSON: ") + e.what());
    }
    BoundaryPair bnd;
    bnd.col_start = j.at("col_start").get<int>();
    bnd.col_end = j.at("col_end").get<int>();
    bnd.smoothing_window = j.value("smoothing_window", 1);
    bnd.upper = j.at("upper").get<std::vector<double>>();
    bnd.lower = j.at("lower").get<std::vector<double>>();
    bnd.gap.assign(bnd.ncols(), 0);
    for (int c : j.value("gap_cols", std::vector<int>{}))
        if (bnd.contains(c)) bnd.gap[c - bnd.col_start] = 1;
    if (static_cast<int>(bnd.upper.size()) != bnd.ncols() ||
        static_cast<int>(bnd.lower.size()) != bnd.ncols())
        raise(ErrorCode::IoError, "boundary JSON: array sizes disagree with span");
    return bnd;
}

} // namespace choroid
