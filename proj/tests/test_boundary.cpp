#include "doctest.h"

#include <cmath>

#include "choroid/boundary.hpp"
#include "choroid/phantom.hpp"
#include "choroid/segment.hpp"

#include "test_support.hpp"

using namespace choroid;

TEST_SUITE_BEGIN("boundary");

TEST_CASE("rectangle mask extracts flat boundaries") {
    Mask m(200, 768, 0);
    for (int r = 100; r <= 150; ++r)
        for (int c = 10; c <= 700; ++c) m.at(r, c) = 1;

    BoundaryPair bnd = extract_boundaries(m);
    CHECK(bnd.col_start == 10);
    CHECK(bnd.col_end == 700);
    for (int c = 10; c <= 700; ++c) {
        CHECK(bnd.upper_at(c) == 100.0);
        CHECK(bnd.lower_at(c) == 150.0);
        CHECK(bnd.gap[c - 10] == 0);
    }
}

TEST_CASE("interior empty column is interpolated and flagged") {
    Mask m(20, 9, 0);
    for (int c = 2; c <= 6; ++c) {
        if (c == 4) continue;
        for (int r = 5; r <= 9; ++r) m.at(r, c) = 1;
    }
    BoundaryPair bnd = extract_boundaries(m);
    CHECK(bnd.col_start == 2);
    CHECK(bnd.col_end == 6);
    CHECK(bnd.gap[4 - 2] == 1);
    CHECK(bnd.upper_at(4) == doctest::Approx(5.0));
    CHECK(bnd.lower_at(4) == doctest::Approx(9.0));

    CHECK_THROWS_AS(extract_boundaries(Mask(5, 5, 0)), Error);
}

TEST_CASE("extraction matches a per-column brute scan on random single components") {
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        // random band-like component
        Mask m(40, 30, 0);
        int upper = 8 + static_cast<int>(rng.below(6));
        for (int c = 3; c < 27; ++c) {
            upper += static_cast<int>(rng.below(3)) - 1;
            upper = std::clamp(upper, 2, 20);
            const int lower = upper + 4 + static_cast<int>(rng.below(8));
            for (int r = upper; r <= std::min(lower, 39); ++r) m.at(r, c) = 1;
        }
        BoundaryPair bnd = extract_boundaries(m);
        for (int c = bnd.col_start; c <= bnd.col_end; ++c) {
            int lo = -1, hi = -1;
            for (int r = 0; r < 40; ++r)
                if (m.at(r, c)) {
                    if (lo < 0) lo = r;
                    hi = r;
                }
            REQUIRE(lo >= 0);
            CHECK(bnd.upper_at(c) == doctest::Approx(lo));
            CHECK(bnd.lower_at(c) == doctest::Approx(hi));
        }
    }
}

TEST_CASE("smoothing: identity window, constants, and affine pass-through") {
    std::vector<double> rows{3, 1, 4, 1, 5, 9, 2, 6};
    CHECK(smooth_boundary(rows, 1) == rows);

    std::vector<double> flat(50, 7.0);
    CHECK(smooth_boundary(flat, 9) == flat);

    std::vector<double> ramp(60);
    for (size_t i = 0; i < ramp.size(); ++i) ramp[i] = 2.5 * i + 1.0;
    std::vector<double> sm = smooth_boundary(ramp, 11);
    for (size_t i = 0; i < ramp.size(); ++i)
        CHECK(sm[i] == doctest::Approx(ramp[i]).epsilon(1e-12));

    CHECK_THROWS_AS(smooth_boundary(rows, 2), Error);   // even
    CHECK_THROWS_AS(smooth_boundary(rows, -3), Error);  // negative
}

TEST_CASE("tangent is computed in physical coordinates") {
    ScanMetadata meta;
    meta.width_px = 100;
    meta.height_px = 100;
    meta.axial_scale_um = 11.328125;  // isotropic with the default lateral

    BoundaryPair flat;
    flat.col_start = 0;
    flat.col_end = 99;
    flat.upper.assign(100, 50.0);
    flat.lower.assign(100, 80.0);
    flat.gap.assign(100, 0);
    Vec2 t = tangent_at(flat, 50, meta);
    CHECK(t.x == doctest::Approx(1.0));
    CHECK(t.y == doctest::Approx(0.0));

    // one pixel-row per column at isotropic scales: 45 degrees
    BoundaryPair diag = flat;
    for (int c = 0; c < 100; ++c) diag.upper[c] = 10.0 + c;
    Vec2 d = tangent_at(diag, 50, meta);
    CHECK(d.x == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(d.y == doctest::Approx(1.0 / std::sqrt(2.0)));

    // anisotropic scales change the physical angle exactly as predicted
    ScanMetadata aniso = meta;
    aniso.axial_scale_um = 3.87;
    Vec2 a = tangent_at(diag, 50, aniso);
    const double angle = std::atan2(3.87, 11.328125);
    CHECK(std::atan2(a.y, a.x) == doctest::Approx(angle).epsilon(1e-9));

    // doubling the axial scale doubles tan(angle)
    ScanMetadata doubled = aniso;
    doubled.axial_scale_um *= 2.0;
    Vec2 a2 = tangent_at(diag, 50, doubled);
    CHECK(a2.y / a2.x == doctest::Approx(2.0 * a.y / a.x).epsilon(1e-9));

    CHECK_THROWS_AS(tangent_at(flat, 100, meta), Error);
}

TEST_CASE("rasterized analytic bands recover boundaries within one pixel") {
    Rng rng(13);
    for (int t = 0; t < 10; ++t) {
        phantom::PhantomSpec spec;
        spec.meta.width_px = 300;
        spec.meta.height_px = 400;
        spec.meta.axial_scale_um = 3.5;
        spec.meta.fovea_col = 150;
        spec.upper_a0 = rng.uniform(700, 900);
        spec.upper_a1 = rng.uniform(-0.05, 0.05);
        spec.upper_a2 = rng.uniform(-4e-6, 4e-6);
        spec.thick_t0 = rng.uniform(180, 320);
        spec.seed = rng.next_u64();
        spec.margin_top_px = 10;
        spec.margin_bottom_px = 10;

        phantom::PhantomResult res = phantom::generate(spec);
        BoundaryPair bnd = extract_boundaries(res.truth_mask);
        for (int c = bnd.col_start; c <= bnd.col_end; c += 7) {
            const double x = (c - 150) * spec.meta.lateral_scale_um;
            const double want_upper = spec.upper_um(x) / spec.meta.axial_scale_um;
            const double want_lower = phantom::lower_um_at_lateral(spec, x) / spec.meta.axial_scale_um;
            CHECK(std::abs(bnd.upper_at(c) - want_upper) <= 1.0);
            CHECK(std::abs(bnd.lower_at(c) - want_lower) <= 1.0);
        }
    }
}

TEST_CASE("lower >= upper survives smoothing and the mask pipeline") {
    Rng rng(17);
    for (int t = 0; t < 50; ++t) {
        Mask m(40, 30, 0);
        for (int c = 0; c < 30; ++c) {
            const int upper = 5 + static_cast<int>(rng.below(10));
            const int lower = upper + static_cast<int>(rng.below(15));
            for (int r = upper; r <= lower; ++r) m.at(r, c) = 1;
        }
        BoundaryPair bnd = boundaries_from_mask(largest_component(m), 7);
        for (int i = 0; i < bnd.ncols(); ++i) CHECK(bnd.lower[i] >= bnd.upper[i]);
    }
}

TEST_CASE("boundary JSON round trip") {
    BoundaryPair bnd;
    bnd.col_start = 5;
    bnd.col_end = 9;
    bnd.upper = {10.5, 11.0, 11.5, 12.0, 12.5};
    bnd.lower = {40.0, 41.0, 42.0, 43.0, 44.0};
    bnd.gap = {0, 1, 0, 0, 0};
    bnd.smoothing_window = 31;

    BoundaryPair back = boundary_from_json(boundary_to_json(bnd));
    CHECK(back.col_start == 5);
    CHECK(back.col_end == 9);
    CHECK(back.upper == bnd.upper);
    CHECK(back.lower == bnd.lower);
    CHECK(back.gap == bnd.gap);
    CHECK(back.smoothing_window == 31);
}

TEST_SUITE_END();
