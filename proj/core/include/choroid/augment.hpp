#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "choroid/image.hpp"

namespace choroid {

struct AugmentConfig {
    double p_flip = 0.5;
    double p_brightness_contrast = 0.5;
    double p_speckle = 0.5;
    double p_blur = 0.25;
    double p_affine = 0.25;
    double brightness_delta_lo = -0.2, brightness_delta_hi = 0.2;
    double contrast_factor_lo = 0.8, contrast_factor_hi = 1.25;
    double speckle_gaussian_sigma = 0.05;
    double speckle_mult_sigma = 0.1;
    double blur_sigma_lo = 0.5, blur_sigma_hi = 2.0;
    double affine_max_rotate_deg = 10.0;
    double affine_max_translate_frac = 0.05;
    double affine_scale_lo = 0.95, affine_scale_hi = 1.05;
    uint64_t seed = 0;

    void validate() const;
};

/// One applied transform with its sampled parameters; params are keyed floats
/// except speckle's sub-seed which is stored in seed.
struct AppliedTransform {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    uint64_t seed = 0;  // speckle only
};

using TransformLog = std::vector<AppliedTransform>;

Image horizontal_flip(const Image& grid);

/// x -> clamp(factor*(x-0.5) + 0.5 + delta, 0, 1); contrast pivots at mid-gray.
Image brightness_contrast(const Image& grid, double delta, double factor);

/// y = clamp((x + N(0,g^2)) * (1 + N(0,m^2)), 0, 1), per-pixel draws from the seed.
Image speckle(const Image& grid, double g_sigma, double m_sigma, uint64_t seed);

/// Separable Gaussian, kernel radius ceil(3*sigma), reflect-101 padding,
/// kernel normalized to sum 1.
Image gaussian_blur(const Image& grid, double sigma);

/// Inverse-mapped bilinear warp about the image center: rotate, scale, then
/// translate by (tx*W, ty*H) pixels. Out-of-bounds samples fill with 0.
Image random_affine(const Image& grid, double rotate_deg, double translate_frac_x,
                    double translate_frac_y, double scale);

/// Applies the stack in the fixed order flip -> brightness/contrast -> speckle
/// -> blur -> affine, each with its configured probability, all randomness
/// derived from cfg.seed. The log replayed through replay_transforms
/// reproduces the output bit for bit.
std::pair<Image, TransformLog> apply_pipeline(const Image& grid, const AugmentConfig& cfg);

Image replay_transforms(const Image& grid, const TransformLog& log);

/// JSON-lines serialization of a transform log (one transform per line).
std::string log_to_jsonl(const TransformLog& log);
TransformLog log_from_jsonl(const std::string& text);

} // namespace choroid
