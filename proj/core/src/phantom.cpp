#include "choroid/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "choroid/io.hpp"

namespace choroid::phantom {

namespace {

struct Normal {
    double nx, ny;
};

Normal unit_normal(const PhantomSpec& spec, double x) {
    const double du = spec.upper_slope(x);
    const double inv = 1.0 / std::sqrt(1.0 + du * du);
    return {-du * inv, inv};  // inward: positive depth component
}

/// Lateral coordinate of the offset (lower) curve at parameter x.
double offset_lateral(const PhantomSpec& spec, double x) {
    return x + spec.thickness_um(x) * unit_normal(spec, x).nx;
}

/// Solve offset_lateral(x) == target for x by bisection.
double solve_offset_param(const PhantomSpec& spec, double target) {
    const double t_here = std::abs(spec.thickness_um(target));
    const double reach = t_here + 64.0;
    double lo = target - reach, hi = target + reach;
    // offset_lateral(x) - x is bounded by |T|, so the bracket holds for any
    // band whose thickness varies slowly at the μm scale
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (offset_lateral(spec, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double lower_um_at_lateral(const PhantomSpec& spec, double x_um) {
    const double xs = solve_offset_param(spec, x_um);
    const Normal n = unit_normal(spec, xs);
    return spec.upper_um(xs) + spec.thickness_um(xs) * n.ny;
}

void PhantomSpec::validate() const {
    meta.validate();
    if (!meta.fovea_col)
        raise(ErrorCode::InvalidArgument, "phantom spec: fovea_col required");
    if (margin_top_px < 0 || margin_bottom_px < 0 ||
        margin_top_px + margin_bottom_px >= meta.height_px)
        raise(ErrorCode::InvalidArgument, "phantom spec: bad margins");

    const double half_span = std::max(*meta.fovea_col, meta.width_px - 1 - *meta.fovea_col) *
                             meta.lateral_scale_um;
    for (double x = -half_span; x <= half_span; x += meta.lateral_scale_um) {
        if (thickness_um(x) <= 0.0)
            raise(ErrorCode::InvalidArgument, "phantom spec: nonpositive thickness in image");
    }
    for (int c = 0; c < meta.width_px; ++c) {
        const double x = (c - *meta.fovea_col) * meta.lateral_scale_um;
        const double top_row = (upper_um(x) - retina_band_um) / meta.axial_scale_um;
        const double bot_row = lower_um_at_lateral(*this, x) / meta.axial_scale_um;
        if (top_row < margin_top_px + 1 || bot_row > meta.height_px - margin_bottom_px - 2)
            raise(ErrorCode::InvalidArgument, "phantom spec: boundaries exit image");
    }
}

PhantomResult generate(const PhantomSpec& spec) {
    spec.validate();
    const ScanMetadata& meta = spec.meta;
    const int h = meta.height_px, w = meta.width_px;
    const int fovea = *meta.fovea_col;

    Image img(h, w, spec.intensity_background);
    ChoroidMask mask(h, w, 0);

    for (int c = 0; c < w; ++c) {
        const double x = (c - fovea) * meta.lateral_scale_um;
        const double upper_row = spec.upper_um(x) / meta.axial_scale_um;
        const double lower_row = lower_um_at_lateral(spec, x) / meta.axial_scale_um;
        const double retina_row = upper_row - spec.retina_band_um / meta.axial_scale_um;

        for (int r = 0; r < h; ++r) {
            float v;
            if (r < retina_row)
                v = spec.intensity_background;
            else if (r < upper_row)
                v = spec.intensity_retina;
            else if (r <= lower_row)
                v = spec.intensity_choroid;
            else
                v = spec.intensity_below;
            img.at(r, c) = v;
            if (r >= upper_row && r <= lower_row) mask.at(r, c) = 1;
        }
    }

    // seeded speckle, then device-style exact-black padding rows
    Rng rng(spec.seed);
    for (size_t i = 0; i < img.size(); ++i) {
        const double additive = img.data[i] + spec.speckle_g_sigma * rng.normal();
        const double v = additive * (1.0 + spec.speckle_m_sigma * rng.normal());
        img.data[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    for (int r = 0; r < spec.margin_top_px; ++r)
        std::fill_n(&img.data[static_cast<size_t>(r) * w], w, 0.0f);
    for (int r = h - spec.margin_bottom_px; r < h; ++r)
        std::fill_n(&img.data[static_cast<size_t>(r) * w], w, 0.0f);

    PhantomResult out;
    out.scan = BScan{std::move(img), meta, ""};
    out.truth_pmap = ProbabilityMap(h, w);
    for (size_t i = 0; i < mask.size(); ++i) out.truth_pmap.data[i] = mask.data[i] ? 1.0f : 0.0f;
    out.truth_mask = std::move(mask);
    return out;
}

AnalyticTruth analytic_measurements(const PhantomSpec& spec, const MeasureConfig& cfg) {
    spec.validate();
    const ScanMetadata& meta = spec.meta;
    const int fovea = *meta.fovea_col;

    AnalyticTruth truth;
    truth.offsets_um = cfg.thickness_offsets_um;
    double sum = 0.0;
    for (double off : cfg.thickness_offsets_um) {
        const double t = spec.thickness_um(off);
        truth.thickness_um.push_back(t);
        sum += t;
    }
    truth.mean_thickness_um = sum / static_cast<double>(cfg.thickness_offsets_um.size());

    // vertical-extent area over the same discrete ROI columns as the measure
    // module's integration
    const int half_cols = static_cast<int>(std::floor(cfg.area_halfwidth_um / meta.lateral_scale_um));
    double sum_extent_um = 0.0;
    for (int c = fovea - half_cols; c <= fovea + half_cols; ++c) {
        const double x = (c - fovea) * meta.lateral_scale_um;
        sum_extent_um += lower_um_at_lateral(spec, x) - spec.upper_um(x);
    }
    truth.area_mm2 = sum_extent_um * meta.lateral_scale_um / 1e6;

    // Simpson over the curve parameter: band area = ∫ T ds
    const int n_intervals = 10000;
    const double a = -cfg.area_halfwidth_um, b = cfg.area_halfwidth_um;
    const double step = (b - a) / n_intervals;
    auto f = [&](double x) {
        const double du = spec.upper_slope(x);
        return spec.thickness_um(x) * std::sqrt(1.0 + du * du);
    };
    double acc = f(a) + f(b);
    for (int i = 1; i < n_intervals; ++i) acc += f(a + i * step) * (i % 2 ? 4.0 : 2.0);
    truth.area_perpendicular_mm2 = acc * step / 3.0 / 1e6;
    return truth;
}

PhantomSpec random_spec(Rng& rng, int width_px, int height_px) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        PhantomSpec spec;
        spec.meta.width_px = width_px;
        spec.meta.height_px = height_px;
        spec.meta.lateral_scale_um = 8700.0 / 768.0;
        spec.meta.axial_scale_um = rng.uniform(3.0, 4.5);
        spec.meta.fovea_col = width_px / 2 + static_cast<int>(rng.uniform(-30.0, 30.0));
        spec.meta.edi = rng.uniform() < 0.86;
        spec.meta.eye = rng.uniform() < 0.5 ? Eye::Right : Eye::Left;

        spec.upper_a0 = rng.uniform(0.31, 0.42) * height_px * spec.meta.axial_scale_um;
        spec.upper_a1 = rng.uniform(-0.05, 0.05);
        spec.upper_a2 = rng.uniform(-4e-6, 4e-6);
        spec.thick_t0 = rng.uniform(150.0, 400.0);
        spec.thick_t1 = rng.uniform(-0.015, 0.015);
        spec.thick_t2 = rng.uniform(-1.5e-6, 1.5e-6);
        spec.seed = rng.next_u64();

        try {
            spec.validate();
            return spec;
        } catch (const Error&) {
            continue;  // resample; rejection keeps determinism
        }
    }
    raise(ErrorCode::InvalidArgument, "random_spec: could not sample a valid phantom");
}

std::string truth_to_json(const AnalyticTruth& truth) {
    nlohmann::ordered_json j;
    j["offsets_um"] = truth.offsets_um;
    j["thickness_um"] = truth.thickness_um;
    j["mean_thickness_um"] = truth.mean_thickness_um;
    j["area_mm2"] = truth.area_mm2;
    j["area_perpendicular_mm2"] = truth.area_perpendicular_mm2;
    return j.dump(2);
}

AnalyticTruth truth_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::IoError, std::string("bad truth JSON: ") + e.what());
    }
    AnalyticTruth truth;
    truth.offsets_um = j.at("offsets_um").get<std::vector<double>>();
    truth.thickness_um = j.at("thickness_um").get<std::vector<double>>();
    truth.mean_thickness_um = j.at("mean_thickness_um").get<double>();
    truth.area_mm2 = j.at("area_mm2").get<double>();
    truth.area_perpendicular_mm2 = j.value("area_perpendicular_mm2", 0.0);
    return truth;
}

void write_case(const std::filesystem::path& dir, const std::string& stem,
                const PhantomSpec& spec, const MeasureConfig& cfg) {
    PhantomResult res = generate(spec);
    io::write_png8(dir / (stem + ".png"), res.scan.pixels);
    write_metadata_sidecar(dir / (stem + ".json"), spec.meta);
    io::write_pmap(dir / (stem + "_truth.pmap"), res.truth_pmap);

    std::ofstream out(dir / (stem + "_truth.json"));
    if (!out) raise(ErrorCode::IoError, "cannot write truth JSON for " + stem);
    out << truth_to_json(analytic_measurements(spec, cfg)) << "\n";
}

} // namespace choroid::phantom
