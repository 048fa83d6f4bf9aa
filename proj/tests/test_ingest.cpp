#include "doctest.h"

#include <cmath>
#include <fstream>

#include "choroid/ingest.hpp"
#include "choroid/io.hpp"
#include "choroid/resample.hpp"
#include "choroid/rng.hpp"

#include "test_support.hpp"

using namespace choroid;
using test_support::temp_dir;

namespace {

ScanMetadata meta_for(int h, int w) {
    ScanMetadata m;
    m.width_px = w;
    m.height_px = h;
    m.axial_scale_um = 3.87;
    return m;
}

BScan scan_of(const Image& img) {
    return BScan{img, meta_for(img.height, img.width), "test"};
}

} // namespace

TEST_SUITE_BEGIN("ingest");

TEST_CASE("load_bscan rescales by bit-depth maximum") {
    const auto dir = temp_dir("ingest");
    Image img(2, 2);
    img.at(0, 0) = 1.0f;   // -> 255 in 8-bit
    img.at(0, 1) = 0.0f;
    img.at(1, 0) = 0.5f;
    io::write_png8(dir / "a.png", img);

    BScan scan = load_bscan(dir / "a.png", meta_for(2, 2));
    CHECK(scan.pixels.at(0, 0) == doctest::Approx(1.0));
    CHECK(scan.pixels.at(0, 1) == doctest::Approx(0.0));
    CHECK(scan.id == "a");

    // 16-bit: pixel 32768 -> 32768/65535
    Image img16(1, 1);
    img16.at(0, 0) = 32768.0f / 65535.0f;
    io::write_png16(dir / "b.png", img16);
    BScan scan16 = load_bscan(dir / "b.png", meta_for(1, 1));
    CHECK(scan16.pixels.at(0, 0) == doctest::Approx(32768.0 / 65535.0).epsilon(1e-9));
}

TEST_CASE("load_bscan reads P2 and P5 PGM") {
    const auto dir = temp_dir("ingest");
    {
        std::ofstream out(dir / "a.pgm");
        out << "P2\n# comment\n3 2\n255\n0 128 255\n10 20 30\n";
    }
    BScan scan = load_bscan(dir / "a.pgm", meta_for(2, 3));
    CHECK(scan.pixels.at(0, 1) == doctest::Approx(128.0 / 255.0));
    CHECK(scan.pixels.at(1, 2) == doctest::Approx(30.0 / 255.0));

    {
        std::ofstream out(dir / "b.pgm", std::ios::binary);
        out << "P5\n2 1\n255\n";
        const unsigned char px[2] = {0, 255};
        out.write(reinterpret_cast<const char*>(px), 2);
    }
    BScan b = load_bscan(dir / "b.pgm", meta_for(1, 2));
    CHECK(b.pixels.at(0, 0) == 0.0f);
    CHECK(b.pixels.at(0, 1) == 1.0f);
}

TEST_CASE("load_bscan errors") {
    const auto dir = temp_dir("ingest");
    Image img(2, 2, 0.5f);
    io::write_png8(dir / "a.png", img);

    CHECK_THROWS_AS(load_bscan(dir / "missing.png", meta_for(2, 2)), Error);
    CHECK_THROWS_AS(load_bscan(dir / "a.png", meta_for(3, 3)), Error);  // dim mismatch

    {
        std::ofstream out(dir / "color.pgm", std::ios::binary);
        out << "P6\n1 1\n255\n";
        out.write("abc", 3);
    }
    CHECK_THROWS_AS(load_bscan(dir / "color.pgm", meta_for(1, 1)), Error);
}

TEST_CASE("crop_black_space removes edge runs only") {
    Image img(20, 8, 0.5f);
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 8; ++c) img.at(r, c) = 0.0f;
    for (int r = 14; r < 20; ++r)
        for (int c = 0; c < 8; ++c) img.at(r, c) = 0.0f;

    auto [cropped, rec] = crop_black_space(scan_of(img), {});
    CHECK(rec.top_rows_removed == 10);
    CHECK(rec.bottom_rows_removed == 6);
    CHECK(rec.native_height == 20);
    CHECK(cropped.pixels.height == 4);
}

TEST_CASE("crop_black_space identity when no black rows") {
    Image img(6, 4, 0.3f);
    auto [cropped, rec] = crop_black_space(scan_of(img), {});
    CHECK(rec.top_rows_removed == 0);
    CHECK(rec.bottom_rows_removed == 0);
    CHECK(cropped.pixels.data == img.data);
}

TEST_CASE("crop_black_space keeps interior black rows, matches brute-force scan") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int h = 12 + static_cast<int>(rng.below(20));
        const int w = 4 + static_cast<int>(rng.below(10));
        Image img(h, w);
        for (int r = 0; r < h; ++r) {
            const bool black = rng.uniform() < 0.35;
            for (int c = 0; c < w; ++c)
                img.at(r, c) = black ? 0.0f : static_cast<float>(0.05 + 0.9 * rng.uniform());
        }

        // brute-force reference on row maxima
        const PreprocessConfig cfg;
        std::vector<bool> is_black(h);
        bool any_bright = false;
        for (int r = 0; r < h; ++r) {
            float mx = 0.0f;
            for (int c = 0; c < w; ++c) mx = std::max(mx, img.at(r, c));
            is_black[r] = mx < cfg.black_threshold;
            any_bright |= !is_black[r];
        }
        if (!any_bright) {
            CHECK_THROWS_AS(crop_black_space(scan_of(img), cfg), Error);
            continue;
        }
        int top = 0;
        while (is_black[top]) ++top;
        int bottom = 0;
        while (is_black[h - 1 - bottom]) ++bottom;

        auto [cropped, rec] = crop_black_space(scan_of(img), cfg);
        CHECK(rec.top_rows_removed == top);
        CHECK(rec.bottom_rows_removed == bottom);
        CHECK(cropped.pixels.height == h - top - bottom);

        // idempotence
        auto [again, rec2] = crop_black_space(cropped, cfg);
        CHECK(rec2.top_rows_removed == 0);
        CHECK(rec2.bottom_rows_removed == 0);
        CHECK(again.pixels.data == cropped.pixels.data);
    }
}

TEST_CASE("crop_black_space all-black errors") {
    Image img(5, 5, 0.0f);
    CHECK_THROWS_AS(crop_black_space(scan_of(img), {}), Error);
}

TEST_CASE("resize preserves constants and identity") {
    Image img(7, 5, 0.42f);
    PreprocessConfig cfg;
    cfg.model_height = 13;
    cfg.model_width = 11;
    Image out = resize_to_model(scan_of(img), cfg);
    for (float v : out.data) CHECK(v == doctest::Approx(0.42).epsilon(1e-6));

    PreprocessConfig same;
    same.model_height = 7;
    same.model_width = 5;
    Image id = resize_to_model(scan_of(img), same);
    CHECK(id.data == img.data);
}

TEST_CASE("resize matches per-pixel bilinear formula on a ramp") {
    Image img(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) img.at(r, c) = static_cast<float>(r + 2 * c);

    Image out = resize_bilinear(img, 8, 8);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            // corner-aligned source coordinates
            const double sy = r * 3.0 / 7.0, sx = c * 3.0 / 7.0;
            const int y0 = static_cast<int>(sy), x0 = static_cast<int>(sx);
            const int y1 = std::min(y0 + 1, 3), x1 = std::min(x0 + 1, 3);
            const double fy = sy - y0, fx = sx - x0;
            const double expect =
                (1 - fy) * ((1 - fx) * img.at(y0, x0) + fx * img.at(y0, x1)) +
                fy * ((1 - fx) * img.at(y1, x0) + fx * img.at(y1, x1));
            CHECK(out.at(r, c) == doctest::Approx(expect).epsilon(1e-5));
        }
    }
    // bilinear of an affine field is the field itself
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            CHECK(out.at(r, c) == doctest::Approx(r * 3.0 / 7.0 + 2 * c * 3.0 / 7.0).epsilon(1e-5));
}

TEST_CASE("standardize formula and exact inverse") {
    PreprocessConfig cfg;
    Image img(1, 3);
    img.at(0, 0) = 0.1f;
    img.at(0, 1) = 0.3f;
    img.at(0, 2) = 0.0f;
    Image out = standardize(img, cfg);
    CHECK(out.at(0, 0) == doctest::Approx(0.0));
    CHECK(out.at(0, 1) == doctest::Approx(1.0));
    CHECK(out.at(0, 2) == doctest::Approx(-0.5));

    // invertibility within one ulp, 1000 random values
    Rng rng(11);
    Image big(10, 100);
    for (float& v : big.data) v = static_cast<float>(rng.uniform());
    Image round_trip = unstandardize(standardize(big, cfg), cfg);
    for (size_t i = 0; i < big.size(); ++i) {
        const float a = big.data[i], b = round_trip.data[i];
        CHECK(std::abs(a - b) <=
              std::numeric_limits<float>::epsilon() * std::max(1.0f, std::abs(a)));
    }
}

TEST_CASE("map_mask_to_native identity and padding") {
    ScanMetadata meta = meta_for(10, 6);
    CropRecord none{0, 0, 10};
    Mask m(10, 6, 1);
    Mask out = map_mask_to_native(m, none, meta);
    CHECK(out.data == m.data);

    CropRecord crop{3, 2, 10};
    Mask model(5, 6, 1);
    Mask padded = map_mask_to_native(model, crop, meta);
    CHECK(padded.height == 10);
    for (int c = 0; c < 6; ++c) {
        CHECK(padded.at(0, c) == 0);
        CHECK(padded.at(2, c) == 0);
        CHECK(padded.at(3, c) == 1);
        CHECK(padded.at(7, c) == 1);
        CHECK(padded.at(8, c) == 0);
    }

    CropRecord bad{8, 8, 10};
    CHECK_THROWS_AS(map_mask_to_native(model, bad, meta), Error);
}

TEST_CASE("mask round-trip at equal dims is bitwise identical") {
    Rng rng(21);
    ScanMetadata meta = meta_for(24, 16);
    CropRecord none{0, 0, 24};
    for (int trial = 0; trial < 100; ++trial) {
        Mask m = test_support::random_mask(rng, 24, 16, 0.4);
        CHECK(map_mask_to_native(m, none, meta).data == m.data);
    }
}

TEST_CASE("mask area fraction preserved within 2% through model-size round trip") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        // blocky mask so it survives resampling with its area roughly intact
        Mask native(200, 160, 0);
        for (int b = 0; b < 12; ++b) {
            const int r0 = static_cast<int>(rng.below(160)), c0 = static_cast<int>(rng.below(120));
            for (int r = r0; r < r0 + 36 && r < 200; ++r)
                for (int c = c0; c < c0 + 36 && c < 160; ++c) native.at(r, c) = 1;
        }
        if (native.count() < 1000) continue;

        Mask model = resize_nearest(native, 150, 120);
        ScanMetadata meta = meta_for(200, 160);
        Mask back = map_mask_to_native(model, CropRecord{0, 0, 200}, meta);

        const double f0 = static_cast<double>(native.count()) / native.size();
        const double f1 = static_cast<double>(back.count()) / back.size();
        CHECK(std::abs(f0 - f1) / f0 < 0.02);
    }
}

TEST_CASE("default lateral scale is the 8.7 mm / 768 px geometry") {
    ScanMetadata meta;
    CHECK(meta.lateral_scale_um == doctest::Approx(11.328125).epsilon(1e-6));
}

TEST_CASE("metadata sidecar round trip and validation") {
    const auto dir = temp_dir("ingest");
    ScanMetadata meta = meta_for(768, 768);
    meta.fovea_col = 384;
    meta.eye = Eye::Left;
    meta.edi = false;
    write_metadata_sidecar(dir / "scan.json", meta);

    ScanMetadata back = read_metadata_sidecar(dir / "scan.json");
    CHECK(back.lateral_scale_um == doctest::Approx(meta.lateral_scale_um));
    CHECK(back.axial_scale_um == doctest::Approx(3.87));
    CHECK(back.fovea_col.value() == 384);
    CHECK(back.eye == Eye::Left);
    CHECK_FALSE(back.edi);

    ScanMetadata no_axial = meta;
    no_axial.axial_scale_um = 0.0;  // axial scale is required, no default
    CHECK_THROWS_AS(no_axial.validate(), Error);

    ScanMetadata bad_fovea = meta;
    bad_fovea.fovea_col = 768;
    CHECK_THROWS_AS(bad_fovea.validate(), Error);
}

TEST_SUITE_END();
