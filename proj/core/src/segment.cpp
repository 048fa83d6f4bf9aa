#include "choroid/segment.hpp"

#include <filesystem>

#include "choroid/io.hpp"
#include "choroid/resample.hpp"

namespace choroid {

namespace {

std::string resolve_map_path(const std::string& pattern, const std::string& id,
                             const char* default_suffix) {
    const auto pos = pattern.find("{}");
    if (pos != std::string::npos) {
        std::string out = pattern;
        out.replace(pos, 2, id);
        return out;
    }
    return (std::filesystem::path(pattern) / (id + default_suffix)).string();
}

} // namespace

ProbabilityMap segment(const BScan& scan, const SegmenterBackend& backend,
                       const PreprocessConfig& cfg) {
    scan.validate();

    BScan cropped;
    CropRecord crop;
    try {
        std::tie(cropped, crop) = crop_black_space(scan, cfg);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::AllRowsBlack) throw;
        // fully black scan: no choroid anywhere
        return ProbabilityMap(scan.meta.height_px, scan.meta.width_px, 0.0f);
    }

    struct Visitor {
        const BScan& scan;
        const BScan& cropped;
        const CropRecord& crop;
        const PreprocessConfig& cfg;

        ProbabilityMap from_file(const std::string& path_str, bool require_native) const {
            const std::filesystem::path path(path_str);
            if (!std::filesystem::exists(path))
                raise(ErrorCode::BackendError, "probability map not found: " + path_str);
            ProbabilityMap m = io::read_probability_map(path);
            const bool native = m.height == scan.meta.height_px && m.width == scan.meta.width_px;
            const bool model = m.height == cfg.model_height && m.width == cfg.model_width;
            if (native) return m;
            if (model && !require_native)
                return map_pmap_to_native(m, crop, scan.meta);
            raise(ErrorCode::DimensionMismatch,
                  "probability map dims do not match scan (" + path_str + ")");
        }

        ProbabilityMap operator()(const EmbeddedCnnBackend& b) const {
            if (!b.net) raise(ErrorCode::BackendError, "embedded CNN backend has no network");
            Image grid = resize_to_model(cropped, cfg);
            Image x = standardize(grid, cfg);
            ProbabilityMap model_map = nn::forward(*b.net, x);
            return map_pmap_to_native(model_map, crop, scan.meta);
        }
        ProbabilityMap operator()(const ExternalMapBackend& b) const {
            return from_file(resolve_map_path(b.pattern, scan.id, ".pmap"), false);
        }
        ProbabilityMap operator()(const PhantomOracleBackend& b) const {
            return from_file(resolve_map_path(b.pattern, scan.id, "_truth.pmap"), true);
        }
    };
    return std::visit(Visitor{scan, cropped, crop, cfg}, backend);
}

ChoroidMask binarize(const ProbabilityMap& pmap, double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        raise(ErrorCode::InvalidArgument, "binarize: threshold must be in [0,1]");
    ChoroidMask mask(pmap.height, pmap.width);
    const float t = static_cast<float>(threshold);
    for (size_t i = 0; i < pmap.size(); ++i) mask.data[i] = pmap.data[i] >= t ? 1 : 0;
    return mask;
}

ChoroidMask largest_component(const ChoroidMask& mask) {
    const int h = mask.height, w = mask.width;
    std::vector<int32_t> label(mask.size(), 0);
    std::vector<size_t> comp_size;  // 1-based label -> pixel count
    std::vector<int64_t> stack;

    int32_t next = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const size_t idx = static_cast<size_t>(r) * w + c;
            if (!mask.data[idx] || label[idx]) continue;
            ++next;
            size_t size = 0;
            stack.push_back(idx);
            label[idx] = next;
            while (!stack.empty()) {
                const size_t cur = static_cast<size_t>(stack.back());
                stack.pop_back();
                ++size;
                const int cr = static_cast<int>(cur / w), cc = static_cast<int>(cur % w);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (!dr && !dc) continue;
                        const int nr = cr + dr, nc = cc + dc;
                        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                        const size_t nidx = static_cast<size_t>(nr) * w + nc;
                        if (mask.data[nidx] && !label[nidx]) {
                            label[nidx] = next;
                            stack.push_back(nidx);
                        }
                    }
                }
            }
            comp_size.push_back(size);
        }
    }
    if (next == 0) return ChoroidMask(h, w, 0);

    // first strict maximum, i.e. earliest anchor in row-major order among ties
    int32_t best = 1;
    for (int32_t i = 2; i <= next; ++i)
        if (comp_size[i - 1] > comp_size[best - 1]) best = i;

    ChoroidMask out(h, w, 0);
    for (size_t i = 0; i < out.size(); ++i) out.data[i] = label[i] == best ? 1 : 0;
    return out;
}

} // namespace choroid
