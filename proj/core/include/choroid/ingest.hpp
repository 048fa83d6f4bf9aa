#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "choroid/image.hpp"

namespace choroid {

enum class Eye { Right, Left, Unknown };

/// Physical acquisition metadata for one B-scan. Axial scale is required —
/// there is no defensible default, and thickness values are wrong without it.
/// Lateral default follows the Heidelberg 30-degree (8.7 mm) field over 768 px.
struct ScanMetadata {
    double lateral_scale_um = 8700.0 / 768.0;  // μm per pixel, horizontal
    double axial_scale_um = 0.0;               // μm per pixel, vertical; must be set
    int width_px = 0;
    int height_px = 0;
    bool edi = true;
    Eye eye = Eye::Unknown;
    std::optional<int> fovea_col;

    void validate() const;
};

struct BScan {
    Image pixels;  // intensities in [0,1]
    ScanMetadata meta;
    std::string id;  // source stem; used to resolve sidecar/oracle files

    void validate() const;
};

/// Record of the black-border crop, sufficient to map row indices back.
struct CropRecord {
    int top_rows_removed = 0;
    int bottom_rows_removed = 0;
    int native_height = 0;
};

struct PreprocessConfig {
    int model_height = 544;
    int model_width = 768;
    double standardize_shift = 0.1;
    double standardize_scale = 0.2;
    double black_threshold = 0.01;  // row-max below this counts as black border
};

/// Loads an 8/16-bit grayscale PNG or PGM, rescales intensities by the
/// bit-depth maximum and attaches metadata. Image dims must match the metadata
/// when the metadata carries dims; otherwise dims are taken from the file.
BScan load_bscan(const std::filesystem::path& path, ScanMetadata meta);

/// Removes the maximal contiguous black row runs at the top and bottom.
/// A row is black when its maximum intensity is below cfg.black_threshold.
/// Errors with AllRowsBlack when nothing remains.
std::pair<BScan, CropRecord> crop_black_space(const BScan& scan, const PreprocessConfig& cfg);

/// Bilinear corner-aligned resize of the cropped scan to model resolution.
Image resize_to_model(const BScan& scan, const PreprocessConfig& cfg);

/// x -> (x - shift) / scale, the model's input normalization.
Image standardize(const Image& grid, const PreprocessConfig& cfg);

/// Inverse of standardize, x = scale*y + shift.
Image unstandardize(const Image& grid, const PreprocessConfig& cfg);

/// Nearest-neighbor upsample of a model-resolution mask to the cropped native
/// size, then re-pad with empty rows per the CropRecord.
Mask map_mask_to_native(const Mask& mask, const CropRecord& crop, const ScanMetadata& meta);

/// Same mapping for probability maps, bilinear, zero-padded rows.
Image map_pmap_to_native(const Image& pmap, const CropRecord& crop, const ScanMetadata& meta);

/// Metadata sidecar JSON: {lateral_scale_um, axial_scale_um, edi, eye, fovea_col}.
ScanMetadata read_metadata_sidecar(const std::filesystem::path& path);
void write_metadata_sidecar(const std::filesystem::path& path, const ScanMetadata& meta);

} // namespace choroid
