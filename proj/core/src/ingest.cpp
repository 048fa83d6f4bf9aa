#include "choroid/ingest.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

#include "choroid/io.hpp"
#include "choroid/resample.hpp"

namespace choroid {

void ScanMetadata::validate() const {
    if (lateral_scale_um <= 0.0 || axial_scale_um <= 0.0)
        raise(ErrorCode::InvalidArgument, "scan metadata: scales must be positive (axial_scale_um is required)");
    if (width_px <= 0 || height_px <= 0)
        raise(ErrorCode::InvalidArgument, "scan metadata: dims must be positive");
    if (fovea_col && (*fovea_col < 0 || *fovea_col >= width_px))
        raise(ErrorCode::InvalidArgument, "scan metadata: fovea_col outside image");
}

void BScan::validate() const {
    meta.validate();
    if (pixels.height != meta.height_px || pixels.width != meta.width_px)
        raise(ErrorCode::DimensionMismatch, "bscan: pixel grid does not match metadata dims");
}

BScan load_bscan(const std::filesystem::path& path, ScanMetadata meta) {
    io::GrayFile g = io::read_grayscale(path);
    if (meta.width_px == 0 && meta.height_px == 0) {
        meta.width_px = g.image.width;
        meta.height_px = g.image.height;
    } else if (meta.width_px != g.image.width || meta.height_px != g.image.height) {
        raise(ErrorCode::DimensionMismatch,
              "image dims do not match metadata: " + path.string());
    }
    BScan scan{std::move(g.image), meta, path.stem().string()};
    scan.validate();
    return scan;
}

std::pair<BScan, CropRecord> crop_black_space(const BScan& scan, const PreprocessConfig& cfg) {
    const Image& img = scan.pixels;
    const float thr = static_cast<float>(cfg.black_threshold);

    auto row_is_black = [&](int r) {
        const float* p = &img.data[static_cast<size_t>(r) * img.width];
        for (int c = 0; c < img.width; ++c)
            if (p[c] >= thr) return false;
        return true;
    };

    int top = 0;
    while (top < img.height && row_is_black(top)) ++top;
    if (top == img.height)
        raise(ErrorCode::AllRowsBlack, "crop_black_space: entire image below black threshold");
    int bottom = 0;
    while (bottom < img.height - top && row_is_black(img.height - 1 - bottom)) ++bottom;

    CropRecord rec{top, bottom, img.height};
    if (top == 0 && bottom == 0) return {scan, rec};

    const int new_h = img.height - top - bottom;
    BScan out;
    out.meta = scan.meta;
    out.meta.height_px = new_h;
    out.id = scan.id;
    out.pixels = Image(new_h, img.width);
    std::copy_n(&img.data[static_cast<size_t>(top) * img.width], out.pixels.size(),
                out.pixels.data.begin());
    return {std::move(out), rec};
}

Image resize_to_model(const BScan& scan, const PreprocessConfig& cfg) {
    return resize_bilinear(scan.pixels, cfg.model_height, cfg.model_width);
}

Image standardize(const Image& grid, const PreprocessConfig& cfg) {
    if (cfg.standardize_scale == 0.0)
        raise(ErrorCode::InvalidArgument, "standardize: zero scale");
    Image out = grid;
    const float shift = static_cast<float>(cfg.standardize_shift);
    const float inv = static_cast<float>(1.0 / cfg.standardize_scale);
    for (float& v : out.data) v = (v - shift) * inv;
    return out;
}

Image unstandardize(const Image& grid, const PreprocessConfig& cfg) {
    Image out = grid;
    const float shift = static_cast<float>(cfg.standardize_shift);
    const float scale = static_cast<float>(cfg.standardize_scale);
    for (float& v : out.data) v = v * scale + shift;
    return out;
}

namespace {
void check_crop(const CropRecord& crop, const ScanMetadata& meta) {
    const int cropped_h = crop.native_height - crop.top_rows_removed - crop.bottom_rows_removed;
    if (crop.top_rows_removed < 0 || crop.bottom_rows_removed < 0 || cropped_h <= 0 ||
        crop.native_height != meta.height_px)
        raise(ErrorCode::InvalidArgument, "inconsistent CropRecord");
}
} // namespace

Mask map_mask_to_native(const Mask& mask, const CropRecord& crop, const ScanMetadata& meta) {
    check_crop(crop, meta);
    const int cropped_h = crop.native_height - crop.top_rows_removed - crop.bottom_rows_removed;
    Mask up = resize_nearest(mask, cropped_h, meta.width_px);

    Mask out(crop.native_height, meta.width_px, 0);
    std::copy(up.data.begin(), up.data.end(),
              out.data.begin() + static_cast<size_t>(crop.top_rows_removed) * meta.width_px);
    return out;
}

Image map_pmap_to_native(const Image& pmap, const CropRecord& crop, const ScanMetadata& meta) {
    check_crop(crop, meta);
    const int cropped_h = crop.native_height - crop.top_rows_removed - crop.bottom_rows_removed;
    Image up = resize_bilinear(pmap, cropped_h, meta.width_px);

    Image out(crop.native_height, meta.width_px, 0.0f);
    std::copy(up.data.begin(), up.data.end(),
              out.data.begin() + static_cast<size_t>(crop.top_rows_removed) * meta.width_px);
    return out;
}

namespace {
std::string eye_to_string(Eye e) {
    switch (e) {
        case Eye::Right: return "right";
        case Eye::Left: return "left";
        default: return "unknown";
    }
}

Eye eye_from_string(const std::string& s) {
    if (s == "right") return Eye::Right;
    if (s == "left") return Eye::Left;
    return Eye::Unknown;
}
} // namespace

ScanMetadata read_metadata_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open sidecar " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::IoError, "bad sidecar JSON " + path.string() + ": " + e.what());
    }

    ScanMetadata m;
    if (j.contains("lateral_scale_um")) m.lateral_scale_um = j["lateral_scale_um"].get<double>();
    if (j.contains("axial_scale_um")) m.axial_scale_um = j["axial_scale_um"].get<double>();
    if (j.contains("edi")) m.edi = j["edi"].get<bool>();
    if (j.contains("eye")) m.eye = eye_from_string(j["eye"].get<std::string>());
    if (j.contains("fovea_col") && !j["fovea_col"].is_null())
        m.fovea_col = j["fovea_col"].get<int>();
    if (j.contains("width_px")) m.width_px = j["width_px"].get<int>();
    if (j.contains("height_px")) m.height_px = j["height_px"].get<int>();
    return m;
}

void write_metadata_sidecar(const std::filesystem::path& path, const ScanMetadata& meta) {
    nlohmann::json j;
    j["lateral_scale_um"] = meta.lateral_scale_um;
    j["axial_scale_um"] = meta.axial_scale_um;
    j["edi"] = meta.edi;
    j["eye"] = eye_to_string(meta.eye);
    if (meta.fovea_col)
        j["fovea_col"] = *meta.fovea_col;
    else
        j["fovea_col"] = nullptr;
    if (meta.width_px > 0) j["width_px"] = meta.width_px;
    if (meta.height_px > 0) j["height_px"] = meta.height_px;

    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write sidecar " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace choroid
