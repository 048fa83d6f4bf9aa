#pragma once

#include <filesystem>
#include <string>

#include "choroid/image.hpp"

namespace choroid::io {

struct GrayFile {
    Image image;    // intensities already scaled to [0,1]
    int bit_depth;  // 8 or 16
};

/// Reads an 8- or 16-bit grayscale PNG or PGM (P2/P5), dispatching on file magic.
/// Color, palette or alpha PNGs are rejected.
GrayFile read_grayscale(const std::filesystem::path& path);

/// 8-bit grayscale PNG; input values clamped to [0,1] and quantized by round(v*255).
void write_png8(const std::filesystem::path& path, const Image& img);

/// 16-bit grayscale PNG; quantized by round(v*65535).
void write_png16(const std::filesystem::path& path, const Image& img);

/// Mask rendered as 8-bit PNG with foreground 255.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);

Mask read_mask_png(const std::filesystem::path& path, float threshold = 0.5f);

/// ".pmap" probability map: one JSON header line {"height":H,"width":W} followed
/// by H*W little-endian float32 values in row-major order.
void write_pmap(const std::filesystem::path& path, const Image& pmap);
Image read_pmap(const std::filesystem::path& path);

/// Reads a probability map from either a .pmap file or a 16-bit grayscale PNG
/// (interpreted as value/65535), dispatching on extension.
Image read_probability_map(const std::filesystem::path& path);

} // namespace choroid::io
