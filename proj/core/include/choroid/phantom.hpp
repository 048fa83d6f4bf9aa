#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "choroid/image.hpp"
#include "choroid/ingest.hpp"
#include "choroid/measure.hpp"
#include "choroid/rng.hpp"

namespace choroid::phantom {

/// Synthetic B-scan family with closed-form boundaries. The upper boundary is
/// a quadratic in lateral μm about the fovea; the thickness profile T(x) is
/// applied along the local upper-boundary normal, so T(x) IS the perpendicular
/// thickness by construction and serves as exact ground truth.
struct PhantomSpec {
    ScanMetadata meta;  // fovea_col required
    // upper boundary depth (μm): u(x) = a0 + a1*x + a2*x^2
    double upper_a0 = 1000.0, upper_a1 = 0.0, upper_a2 = 0.0;
    // perpendicular thickness (μm): T(x) = t0 + t1*x + t2*x^2; plausible t0
    // range mirrors cohort means (~220-260 μm)
    double thick_t0 = 250.0, thick_t1 = 0.0, thick_t2 = 0.0;
    double retina_band_um = 250.0;
    float intensity_background = 0.08f;
    float intensity_retina = 0.72f;
    float intensity_choroid = 0.45f;
    float intensity_below = 0.18f;
    double speckle_g_sigma = 0.02;
    double speckle_m_sigma = 0.08;
    int margin_top_px = 32;
    int margin_bottom_px = 32;
    uint64_t seed = 0;

    double upper_um(double x) const { return upper_a0 + upper_a1 * x + upper_a2 * x * x; }
    double upper_slope(double x) const { return upper_a1 + 2.0 * upper_a2 * x; }
    double thickness_um(double x) const { return thick_t0 + thick_t1 * x + thick_t2 * x * x; }

    void validate() const;
};

struct PhantomResult {
    BScan scan;
    ChoroidMask truth_mask;      // native resolution
    ProbabilityMap truth_pmap;   // mask as exact 0/1 floats
};

/// Rasterizes the band, renders intensity bands, applies seeded speckle, and
/// blanks the top/bottom margin rows (the device-style black padding).
/// Deterministic in (spec, seed).
PhantomResult generate(const PhantomSpec& spec);

/// Lower-boundary depth (μm) at a lateral position, via the normal-offset
/// construction (root-solve on the offset curve's lateral coordinate).
double lower_um_at_lateral(const PhantomSpec& spec, double x_um);

struct AnalyticTruth {
    std::vector<double> offsets_um;
    std::vector<double> thickness_um;  // T at each exact offset
    double mean_thickness_um = 0.0;
    // column integration of the vertical extent over the ROI, matching the
    // measure module's area definition
    double area_mm2 = 0.0;
    // Simpson integral of T(x)*sqrt(1+u'(x)^2): band area along the curve
    double area_perpendicular_mm2 = 0.0;
};

AnalyticTruth analytic_measurements(const PhantomSpec& spec, const MeasureConfig& cfg = {});

/// Random spec in ranges that keep the band inside the image; deterministic
/// rejection sampling from the rng.
PhantomSpec random_spec(Rng& rng, int width_px = 768, int height_px = 768);

std::string truth_to_json(const AnalyticTruth& truth);
AnalyticTruth truth_from_json(const std::string& text);

/// Writes <stem>.png, <stem>.json (metadata sidecar), <stem>_truth.pmap and
/// <stem>_truth.json into dir.
void write_case(const std::filesystem::path& dir, const std::string& stem,
                const PhantomSpec& spec, const MeasureConfig& cfg = {});

} // namespace choroid::phantom
