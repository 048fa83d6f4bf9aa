#pragma once

#include <vector>

#include "choroid/error.hpp"

namespace choroid::nn {

/// CHW float tensor.
struct Tensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int c, int h, int w, float fill = 0.0f)
        : channels(c), height(h), width(w),
          data(static_cast<size_t>(c) * h * w, fill) {}

    float* plane(int c) { return data.data() + static_cast<size_t>(c) * height * width; }
    const float* plane(int c) const { return data.data() + static_cast<size_t>(c) * height * width; }

    float& at(int c, int r, int x) {
        return data[(static_cast<size_t>(c) * height + r) * width + x];
    }
    float at(int c, int r, int x) const {
        return data[(static_cast<size_t>(c) * height + r) * width + x];
    }

    size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

} // namespace choroid::nn
