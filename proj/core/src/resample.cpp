#include "choroid/resample.hpp"

#include <cmath>

namespace choroid {

namespace {
inline double src_coord(int dst, int in_n, int out_n) {
    if (out_n <= 1 || in_n <= 1) return 0.0;
    return static_cast<double>(dst) * (in_n - 1) / (out_n - 1);
}
} // namespace

Image resize_bilinear(const Image& in, int out_h, int out_w) {
    if (in.height <= 0 || in.width <= 0)
        raise(ErrorCode::InvalidArgument, "resize_bilinear: empty input");
    if (out_h <= 0 || out_w <= 0)
        raise(ErrorCode::InvalidArgument, "resize_bilinear: bad output dims");
    if (out_h == in.height && out_w == in.width) return in;

    Image out(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
        const double sy = src_coord(r, in.height, out_h);
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, in.height - 1);
        const float fy = static_cast<float>(sy - y0);
        for (int c = 0; c < out_w; ++c) {
            const double sx = src_coord(c, in.width, out_w);
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, in.width - 1);
            const float fx = static_cast<float>(sx - x0);

            const float v00 = in.at(y0, x0), v01 = in.at(y0, x1);
            const float v10 = in.at(y1, x0), v11 = in.at(y1, x1);
            const float top = v00 + (v01 - v00) * fx;
            const float bot = v10 + (v11 - v10) * fx;
            out.at(r, c) = top + (bot - top) * fy;
        }
    }
    return out;
}

Mask resize_nearest(const Mask& in, int out_h, int out_w) {
    if (in.height <= 0 || in.width <= 0)
        raise(ErrorCode::InvalidArgument, "resize_nearest: empty input");
    if (out_h <= 0 || out_w <= 0)
        raise(ErrorCode::InvalidArgument, "resize_nearest: bad output dims");
    if (out_h == in.height && out_w == in.width) return in;

    Mask out(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
        const int sr = static_cast<int>(std::lround(src_coord(r, in.height, out_h)));
        for (int c = 0; c < out_w; ++c) {
            const int sc = static_cast<int>(std::lround(src_coord(c, in.width, out_w)));
            out.at(r, c) = in.at(sr, sc);
        }
    }
    return out;
}

} // namespace choroid
