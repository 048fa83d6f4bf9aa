#include "choroid/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "choroid/rng.hpp"

namespace choroid {

void AugmentConfig::validate() const {
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob_ok(p_flip) || !prob_ok(p_brightness_contrast) || !prob_ok(p_speckle) ||
        !prob_ok(p_blur) || !prob_ok(p_affine))
        raise(ErrorCode::InvalidArgument, "augment config: probabilities must be in [0,1]");
    if (brightness_delta_lo > brightness_delta_hi || contrast_factor_lo > contrast_factor_hi ||
        blur_sigma_lo > blur_sigma_hi || affine_scale_lo > affine_scale_hi)
        raise(ErrorCode::InvalidArgument, "augment config: empty range");
    if (speckle_gaussian_sigma < 0 || speckle_mult_sigma < 0 || blur_sigma_lo <= 0)
        raise(ErrorCode::InvalidArgument, "augment config: bad sigma");
}

Image horizontal_flip(const Image& grid) {
    Image out(grid.height, grid.width);
    for (int r = 0; r < grid.height; ++r)
        for (int c = 0; c < grid.width; ++c)
            out.at(r, c) = grid.at(r, grid.width - 1 - c);
    return out;
}

Image brightness_contrast(const Image& grid, double delta, double factor) {
    Image out(grid.height, grid.width);
    const float d = static_cast<float>(delta);
    const float f = static_cast<float>(factor);
    for (size_t i = 0; i < grid.size(); ++i) {
        float v = f * (grid.data[i] - 0.5f) + 0.5f + d;
        out.data[i] = std::clamp(v, 0.0f, 1.0f);
    }
    return out;
}

Image speckle(const Image& grid, double g_sigma, double m_sigma, uint64_t seed) {
    Image out(grid.height, grid.width);
    Rng rng(seed);
    for (size_t i = 0; i < grid.size(); ++i) {
        const double additive = grid.data[i] + g_sigma * rng.normal();
        const double v = additive * (1.0 + m_sigma * rng.normal());
        out.data[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return out;
}

namespace {

std::vector<float> gaussian_kernel(double sigma, int radius) {
    std::vector<float> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[i + radius] = static_cast<float>(v);
        sum += v;
    }
    for (float& v : k) v = static_cast<float>(v / sum);
    return k;
}

// reflect-101: -1 -> 1, n -> n-2
inline int reflect(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

} // namespace

Image gaussian_blur(const Image& grid, double sigma) {
    if (sigma <= 0.0) raise(ErrorCode::InvalidArgument, "gaussian_blur: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const std::vector<float> k = gaussian_kernel(sigma, radius);

    Image tmp(grid.height, grid.width);
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * grid.at(r, reflect(c + i, grid.width));
            tmp.at(r, c) = acc;
        }
    }
    Image out(grid.height, grid.width);
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * tmp.at(reflect(r + i, grid.height), c);
            out.at(r, c) = acc;
        }
    }
    return out;
}

Image random_affine(const Image& grid, double rotate_deg, double translate_frac_x,
                    double translate_frac_y, double scale) {
    if (scale <= 0.0) raise(ErrorCode::InvalidArgument, "random_affine: scale must be > 0");
    const double theta = rotate_deg * std::numbers::pi / 180.0;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    const double cx = (grid.width - 1) / 2.0, cy = (grid.height - 1) / 2.0;
    const double tx = translate_frac_x * grid.width, ty = translate_frac_y * grid.height;

    // forward map: p' = R*s*(p - ctr) + ctr + t; sample by the inverse
    Image out(grid.height, grid.width);
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            const double dx = c - cx - tx;
            const double dy = r - cy - ty;
            const double sx = (cos_t * dx + sin_t * dy) / scale + cx;
            const double sy = (-sin_t * dx + cos_t * dy) / scale + cy;

            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0, fy = sy - y0;

            auto sample = [&](int y, int x) -> double {
                if (x < 0 || x >= grid.width || y < 0 || y >= grid.height) return 0.0;
                return grid.at(y, x);
            };
            const double top = sample(y0, x0) * (1 - fx) + sample(y0, x0 + 1) * fx;
            const double bot = sample(y0 + 1, x0) * (1 - fx) + sample(y0 + 1, x0 + 1) * fx;
            out.at(r, c) = static_cast<float>(top * (1 - fy) + bot * fy);
        }
    }
    return out;
}

std::pair<Image, TransformLog> apply_pipeline(const Image& grid, const AugmentConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Image img = grid;
    TransformLog log;

    if (rng.uniform() < cfg.p_flip) {
        img = horizontal_flip(img);
        log.push_back({"horizontal_flip", {}, 0});
    }
    if (rng.uniform() < cfg.p_brightness_contrast) {
        const double delta = rng.uniform(cfg.brightness_delta_lo, cfg.brightness_delta_hi);
        const double factor = rng.uniform(cfg.contrast_factor_lo, cfg.contrast_factor_hi);
        img = brightness_contrast(img, delta, factor);
        log.push_back({"brightness_contrast", {{"delta", delta}, {"factor", factor}}, 0});
    }
    if (rng.uniform() < cfg.p_speckle) {
        const uint64_t sub = rng.next_u64();
        img = speckle(img, cfg.speckle_gaussian_sigma, cfg.speckle_mult_sigma, sub);
        log.push_back({"speckle",
                       {{"g_sigma", cfg.speckle_gaussian_sigma}, {"m_sigma", cfg.speckle_mult_sigma}},
                       sub});
    }
    if (rng.uniform() < cfg.p_blur) {
        const double sigma = rng.uniform(cfg.blur_sigma_lo, cfg.blur_sigma_hi);
        img = gaussian_blur(img, sigma);
        log.push_back({"gaussian_blur", {{"sigma", sigma}}, 0});
    }
    if (rng.uniform() < cfg.p_affine) {
        const double rot = rng.uniform(-cfg.affine_max_rotate_deg, cfg.affine_max_rotate_deg);
        const double tfx = rng.uniform(-cfg.affine_max_translate_frac, cfg.affine_max_translate_frac);
        const double tfy = rng.uniform(-cfg.affine_max_translate_frac, cfg.affine_max_translate_frac);
        const double scale = rng.uniform(cfg.affine_scale_lo, cfg.affine_scale_hi);
        img = random_affine(img, rot, tfx, tfy, scale);
        log.push_back({"random_affine",
                       {{"rotate_deg", rot}, {"translate_frac_x", tfx},
                        {"translate_frac_y", tfy}, {"scale", scale}},
                       0});
    }
    return {std::move(img), std::move(log)};
}

namespace {
double param(const AppliedTransform& t, const std::string& key) {
    for (const auto& [k, v] : t.params)
        if (k == key) return v;
    raise(ErrorCode::InvalidArgument, "transform log: missing param " + key);
}
} // namespace

Image replay_transforms(const Image& grid, const TransformLog& log) {
    Image img = grid;
    for (const auto& t : log) {
        if (t.name == "horizontal_flip") {
            img = horizontal_flip(img);
        } else if (t.name == "brightness_contrast") {
            img = brightness_contrast(img, param(t, "delta"), param(t, "factor"));
        } else if (t.name == "speckle") {
            img = speckle(img, param(t, "g_sigma"), param(t, "m_sigma"), t.seed);
        } else if (t.name == "gaussian_blur") {
            img = gaussian_blur(img, param(t, "sigma"));
        } else if (t.name == "random_affine") {
            img = random_affine(img, param(t, "rotate_deg"), param(t, "translate_frac_x"),
                                param(t, "translate_frac_y"), param(t, "scale"));
        } else {
            raise(ErrorCode::InvalidArgument, "transform log: unknown transform " + t.name);
        }
    }
    return img;
}

std::string log_to_jsonl(const TransformLog& log) {
    std::ostringstream out;
    for (const auto& t : log) {
        nlohmann::ordered_json j;
        j["transform"] = t.name;
        for (const auto& [k, v] : t.params) j[k] = v;
        if (t.name == "speckle") j["seed"] = t.seed;
        out << j.dump() << "\n";
    }
    return out.str();
}

TransformLog log_from_jsonl(const std::string& text) {
    TransformLog log;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::IoError, std::string("bad transform log line: ") + e.what());
        }
        AppliedTransform t;
        t.name = j.at("transform").get<std::string>();
        for (auto& [k, v] : j.items()) {
            if (k == "transform") continue;
            if (k == "seed")
                t.seed = v.get<uint64_t>();
            else
                t.params.emplace_back(k, v.get<double>());
        }
        log.push_back(std::move(t));
    }
    return log;
}

} // namespace choroid
