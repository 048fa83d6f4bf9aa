#pragma once

#include <cstdint>
#include <vector>

#include "choroid/error.hpp"

namespace choroid {

/// Row-major single-channel float image. Index order is (row, col).
struct Image {
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Image() = default;
    Image(int h, int w, float fill = 0.0f)
        : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {}

    float& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    float at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }

    size_t size() const { return data.size(); }
    bool same_dims(const Image& o) const { return height == o.height && width == o.width; }
};

/// Row-major binary mask; values are 0 or 1.
struct Mask {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    Mask() = default;
    Mask(int h, int w, uint8_t fill = 0)
        : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {}

    uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    uint8_t at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }

    size_t size() const { return data.size(); }
    bool same_dims(const Mask& o) const { return height == o.height && width == o.width; }

    size_t count() const {
        size_t n = 0;
        for (uint8_t v : data) n += v != 0;
        return n;
    }
};

// Per-pixel choroid probability in [0,1].
using ProbabilityMap = Image;
// Thresholded, regularized choroid region.
using ChoroidMask = Mask;

inline void require_same_dims(const Image& a, const Image& b, const char* what) {
    if (!a.same_dims(b))
        raise(ErrorCode::DimensionMismatch, std::string(what) + ": dimension mismatch");
}

inline void require_same_dims(const Mask& a, const Mask& b, const char* what) {
    if (!a.same_dims(b))
        raise(ErrorCode::DimensionMismatch, std::string(what) + ": dimension mismatch");
}

} // namespace choroid
