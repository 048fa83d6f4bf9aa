#include "choroid/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include "json.hpp"

#include "choroid/boundary.hpp"
#include "choroid/io.hpp"
#include "choroid/phantom.hpp"
#include "choroid/rng.hpp"
#include "choroid/segment.hpp"
#include "choroid/stats.hpp"
#include "choroid/svgplot.hpp"

namespace fs = std::filesystem;

namespace choroid::cmd {

namespace {

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<fs::path> list_sorted(const std::string& dir, auto&& pred) {
    if (!fs::is_directory(dir))
        raise(ErrorCode::IoError, "input directory not found: " + dir);
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && pred(e.path())) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<fs::path> list_images(const std::string& dir) {
    return list_sorted(dir, [](const fs::path& p) {
        const std::string ext = p.extension().string();
        if (ext != ".png" && ext != ".pgm") return false;
        return !ends_with(p.stem().string(), "_mask");
    });
}

/// Runs fn(i) for i in [0,n) on `workers` threads. Item order inside a worker
/// is arbitrary; callers index into pre-sized result vectors, so outputs do
/// not depend on the worker count.
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

ScanMetadata resolve_metadata(const fs::path& image_path, const RunConfig& cfg) {
    ScanMetadata meta;
    const fs::path sidecar = fs::path(image_path).replace_extension(".json");
    if (fs::exists(sidecar)) meta = read_metadata_sidecar(sidecar);
    if (cfg.lateral_um) meta.lateral_scale_um = *cfg.lateral_um;
    if (cfg.axial_um) meta.axial_scale_um = *cfg.axial_um;
    if (cfg.fovea_col) meta.fovea_col = *cfg.fovea_col;
    return meta;
}

std::map<std::string, int> load_fovea_csv(const std::string& path) {
    std::map<std::string, int> out;
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open fovea CSV " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("file,", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        out[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
    }
    return out;
}

SegmenterBackend make_backend(const RunConfig& cfg) {
    if (cfg.backend == "cnn") {
        if (cfg.spec_path.empty() || cfg.weights_path.empty())
            raise(ErrorCode::InvalidArgument, "cnn backend needs --spec and --weights");
        auto net = std::make_shared<nn::Network>(nn::load_network(cfg.spec_path, cfg.weights_path));
        return EmbeddedCnnBackend{std::move(net)};
    }
    if (cfg.backend == "external") {
        if (cfg.maps.empty())
            raise(ErrorCode::InvalidArgument, "external backend needs --maps");
        return ExternalMapBackend{cfg.maps};
    }
    if (cfg.backend == "oracle")
        return PhantomOracleBackend{cfg.maps.empty() ? cfg.input : cfg.maps};
    raise(ErrorCode::InvalidArgument, "unknown backend: " + cfg.backend);
}

void ensure_out_dir(const RunConfig& cfg) {
    if (cfg.out_dir.empty()) raise(ErrorCode::InvalidArgument, "--out is required");
    fs::create_directories(cfg.out_dir);
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
    for (const auto& l : lines) out << l << "\n";
}

} // namespace

RunConfig load_run_config(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) raise(ErrorCode::IoError, "cannot open config " + json_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::IoError, std::string("bad config JSON: ") + e.what());
    }

    RunConfig cfg;
    cfg.input = j.value("in", cfg.input);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.backend = j.value("backend", cfg.backend);
    cfg.spec_path = j.value("spec", cfg.spec_path);
    cfg.weights_path = j.value("weights", cfg.weights_path);
    cfg.maps = j.value("maps", cfg.maps);
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.plots = j.value("plots", cfg.plots);
    if (j.contains("fovea_col")) cfg.fovea_col = j["fovea_col"].get<int>();
    cfg.fovea_csv = j.value("fovea_csv", cfg.fovea_csv);
    if (j.contains("lateral_um")) cfg.lateral_um = j["lateral_um"].get<double>();
    if (j.contains("axial_um")) cfg.axial_um = j["axial_um"].get<double>();
    cfg.smoothing_window = j.value("smoothing_window", cfg.smoothing_window);
    cfg.extent_margin_px = j.value("extent_margin_px", cfg.extent_margin_px);
    cfg.phantom_count = j.value("phantom_count", cfg.phantom_count);
    cfg.phantom_width = j.value("phantom_width", cfg.phantom_width);
    cfg.phantom_height = j.value("phantom_height", cfg.phantom_height);
    if (j.contains("area_mode"))
        cfg.measure.area_mode = j["area_mode"].get<std::string>() == "pixels"
                                    ? AreaMode::PixelCount
                                    : AreaMode::Integrate;

    if (j.contains("pre")) {
        const auto& p = j["pre"];
        cfg.pre.model_height = p.value("model_height", cfg.pre.model_height);
        cfg.pre.model_width = p.value("model_width", cfg.pre.model_width);
        cfg.pre.black_threshold = p.value("black_threshold", cfg.pre.black_threshold);
    }
    if (j.contains("measure")) {
        const auto& m = j["measure"];
        if (m.contains("thickness_offsets_um"))
            cfg.measure.thickness_offsets_um =
                m["thickness_offsets_um"].get<std::vector<double>>();
        cfg.measure.area_halfwidth_um = m.value("area_halfwidth_um", cfg.measure.area_halfwidth_um);
        cfg.measure.ray_step_um = m.value("ray_step_um", cfg.measure.ray_step_um);
    }
    if (j.contains("augment")) {
        const auto& a = j["augment"];
        cfg.augment.p_flip = a.value("p_flip", cfg.augment.p_flip);
        cfg.augment.p_brightness_contrast =
            a.value("p_brightness_contrast", cfg.augment.p_brightness_contrast);
        cfg.augment.p_speckle = a.value("p_speckle", cfg.augment.p_speckle);
        cfg.augment.p_blur = a.value("p_blur", cfg.augment.p_blur);
        cfg.augment.p_affine = a.value("p_affine", cfg.augment.p_affine);
        cfg.augment.speckle_gaussian_sigma =
            a.value("speckle_gaussian_sigma", cfg.augment.speckle_gaussian_sigma);
        cfg.augment.speckle_mult_sigma =
            a.value("speckle_mult_sigma", cfg.augment.speckle_mult_sigma);
    }
    return cfg;
}

int cmd_segment(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const std::vector<fs::path> images = list_images(cfg.input);
    if (images.empty()) {
        std::cout << "warning: no input images found in " << cfg.input << "\n";
        return 0;
    }
    const SegmenterBackend backend = make_backend(cfg);

    struct Row {
        std::string file;
        double seconds = 0.0;
        std::string error;
    };
    std::vector<Row> rows(images.size());

    parallel_for(images.size(), cfg.workers, [&](size_t i) {
        Row& row = rows[i];
        row.file = images[i].filename().string();
        try {
            ScanMetadata meta = resolve_metadata(images[i], cfg);
            const auto t0 = std::chrono::steady_clock::now();
            BScan scan = load_bscan(images[i], meta);
            ProbabilityMap pmap = segment(scan, backend, cfg.pre);
            ChoroidMask mask = largest_component(binarize(pmap, cfg.threshold));
            const auto t1 = std::chrono::steady_clock::now();
            row.seconds = std::chrono::duration<double>(t1 - t0).count();

            const std::string stem = images[i].stem().string();
            io::write_pmap(fs::path(cfg.out_dir) / (stem + ".pmap"), pmap);
            io::write_mask_png(fs::path(cfg.out_dir) / (stem + "_mask.png"), mask);
            write_metadata_sidecar(fs::path(cfg.out_dir) / (stem + ".json"), scan.meta);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    std::vector<std::string> timing{"file,seconds"};
    std::vector<std::string> failures{"file,error"};
    double sum = 0.0, sum2 = 0.0;
    int ok = 0;
    for (const Row& r : rows) {
        if (!r.error.empty()) {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            failures.push_back(r.file + "," + msg);
            continue;
        }
        timing.push_back(r.file + "," + fmt_fixed(r.seconds, 4));
        sum += r.seconds;
        sum2 += r.seconds * r.seconds;
        ++ok;
    }
    write_lines(fs::path(cfg.out_dir) / "timing.csv", timing);
    if (failures.size() > 1) write_lines(fs::path(cfg.out_dir) / "failures.csv", failures);

    if (ok > 0) {
        const double mean = sum / ok;
        const double sd = ok > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * mean) / (ok - 1))) : 0.0;
        std::cout << "segmented " << ok << "/" << images.size() << " images, "
                  << fmt_fixed(mean, 3) << " ± " << fmt_fixed(sd, 3) << " s/img\n";
    }
    if (failures.size() > 1)
        std::cout << "warning: " << failures.size() - 1 << " failures recorded in failures.csv\n";
    return 0;
}

namespace {

struct MaskSource {
    fs::path path;
    bool is_mask_png;
};

/// Prefer explicit masks, fall back to probability maps.
std::vector<MaskSource> list_mask_sources(const std::string& dir) {
    std::vector<MaskSource> out;
    for (const fs::path& p : list_sorted(dir, [](const fs::path& q) {
             return ends_with(q.filename().string(), "_mask.png");
         }))
        out.push_back({p, true});
    if (!out.empty()) return out;
    for (const fs::path& p :
         list_sorted(dir, [](const fs::path& q) { return q.extension() == ".pmap"; }))
        out.push_back({p, false});
    return out;
}

std::string source_stem(const MaskSource& src) {
    std::string stem = src.path.stem().string();
    if (src.is_mask_png && ends_with(stem, "_mask")) stem.resize(stem.size() - 5);
    if (!src.is_mask_png && ends_with(stem, "_truth")) stem.resize(stem.size() - 6);
    return stem;
}

} // namespace

int cmd_measure(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const std::vector<MaskSource> sources = list_mask_sources(cfg.input);
    if (sources.empty()) {
        std::cout << "warning: no masks or probability maps found in " << cfg.input << "\n";
        return 0;
    }
    const std::map<std::string, int> fovea_by_file =
        cfg.fovea_csv.empty() ? std::map<std::string, int>{} : load_fovea_csv(cfg.fovea_csv);

    struct Row {
        std::string file;
        std::string text;  // rendered CSV fields after `file`
    };
    std::vector<Row> rows(sources.size());

    MeasureConfig mcfg = cfg.measure;

    parallel_for(sources.size(), cfg.workers, [&](size_t i) {
        Row& row = rows[i];
        const std::string stem = source_stem(sources[i]);
        row.file = sources[i].path.filename().string();
        try {
            ChoroidMask mask = sources[i].is_mask_png
                                   ? io::read_mask_png(sources[i].path)
                                   : binarize(io::read_pmap(sources[i].path), cfg.threshold);
            mask = largest_component(mask);

            const fs::path sidecar = fs::path(cfg.input) / (stem + ".json");
            ScanMetadata meta;
            if (fs::exists(sidecar)) meta = read_metadata_sidecar(sidecar);
            if (cfg.lateral_um) meta.lateral_scale_um = *cfg.lateral_um;
            if (cfg.axial_um) meta.axial_scale_um = *cfg.axial_um;
            meta.width_px = mask.width;
            meta.height_px = mask.height;

            int fovea;
            if (auto it = fovea_by_file.find(row.file); it != fovea_by_file.end())
                fovea = it->second;
            else if (auto it2 = fovea_by_file.find(stem); it2 != fovea_by_file.end())
                fovea = it2->second;
            else if (cfg.fovea_col)
                fovea = *cfg.fovea_col;
            else if (meta.fovea_col)
                fovea = *meta.fovea_col;
            else
                raise(ErrorCode::InvalidArgument, "no fovea column available");
            meta.validate();

            BoundaryPair bnd =
                boundaries_from_mask(mask, cfg.smoothing_window, cfg.extent_margin_px);
            Measurements m = measure_all(bnd, &mask, fovea, meta, mcfg);

            std::string warn;
            for (size_t w = 0; w < m.warnings.size(); ++w)
                warn += (w ? "; " : "") + m.warnings[w];

            std::ostringstream os;
            os << fovea;
            for (double v : m.thickness_um) os << "," << fmt_fixed(v, 3);
            os << "," << fmt_fixed(m.mean_thickness_um, 3) << "," << fmt_fixed(m.area_mm2, 6)
               << "," << warn;
            row.text = os.str();
        } catch (const std::exception& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            row.text = ",,,,,,error: " + msg;
        }
    });

    std::vector<std::string> lines{"file,fovea_col,ct_m2000,ct_0,ct_p2000,ct_mean_um,area_mm2,warnings"};
    int errors = 0;
    for (const Row& r : rows) {
        lines.push_back(r.file + "," + r.text);
        if (r.text.rfind(",,,,,,error:", 0) == 0) ++errors;
    }
    write_lines(fs::path(cfg.out_dir) / "measurements.csv", lines);
    std::cout << "measured " << (rows.size() - errors) << "/" << rows.size() << " inputs\n";
    if (errors) std::cout << "warning: " << errors << " rows carry errors\n";
    return 0;
}

namespace {

struct MeasureSeries {
    std::vector<std::string> files;
    std::vector<double> thickness;
    std::vector<double> area;
};

MeasureSeries read_measurements_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    MeasureSeries s;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() < 7 || fields[5].empty() || fields[6].empty()) continue;  // error rows
        s.files.push_back(fields[0]);
        s.thickness.push_back(std::stod(fields[5]));
        s.area.push_back(std::stod(fields[6]));
    }
    return s;
}

void emit_metric_outputs(const RunConfig& cfg, const std::string& metric,
                         std::span<const double> a, std::span<const double> b,
                         nlohmann::ordered_json& report) {
    stats::AgreementReport rep = stats::agreement_report(a, b);
    report[metric] = nlohmann::ordered_json::parse(stats::report_to_json(rep));

    if (!cfg.plots || !rep.linfit || !rep.bland_altman) return;
    const std::string unit = metric == "ct_mean_um" ? "μm" : "mm²";
    svg::PlotLabels corr{metric + " agreement", "series A (" + unit + ")",
                         "series B (" + unit + ")"};
    // correlation plot convention: A on x, B on y
    svg::write_file(fs::path(cfg.out_dir) / ("corr_" + metric + ".svg"),
                    svg::correlation_plot(a, b, *rep.linfit, corr));
    svg::PlotLabels ba{metric + " Bland-Altman", "mean of methods (" + unit + ")",
                       "difference A-B (" + unit + ")"};
    svg::write_file(fs::path(cfg.out_dir) / ("ba_" + metric + ".svg"),
                    svg::bland_altman_plot(a, b, *rep.bland_altman, ba));
}

int compare_csv(const RunConfig& cfg, const std::string& a_path, const std::string& b_path) {
    const MeasureSeries a = read_measurements_csv(a_path);
    const MeasureSeries b = read_measurements_csv(b_path);

    std::map<std::string, size_t> b_index;
    for (size_t i = 0; i < b.files.size(); ++i) b_index[b.files[i]] = i;

    std::vector<double> at, bt, aa, ba_;
    std::vector<std::string> unpaired;
    for (size_t i = 0; i < a.files.size(); ++i) {
        auto it = b_index.find(a.files[i]);
        if (it == b_index.end()) {
            unpaired.push_back(a.files[i]);
            continue;
        }
        at.push_back(a.thickness[i]);
        bt.push_back(b.thickness[it->second]);
        aa.push_back(a.area[i]);
        ba_.push_back(b.area[it->second]);
        b_index.erase(it);
    }
    for (const auto& [f, _] : b_index) unpaired.push_back(f);
    if (!unpaired.empty()) {
        std::string msg = "unpaired filenames:";
        for (const auto& f : unpaired) msg += " " + f;
        raise(ErrorCode::InvalidArgument, msg);
    }
    if (at.empty()) raise(ErrorCode::InvalidArgument, "no paired rows to compare");

    nlohmann::ordered_json report;
    report["n"] = at.size();
    emit_metric_outputs(cfg, "ct_mean_um", at, bt, report);
    emit_metric_outputs(cfg, "area_mm2", aa, ba_, report);

    std::ofstream out(fs::path(cfg.out_dir) / "report.json");
    out << report.dump(2) << "\n";
    std::cout << "compared " << at.size() << " paired measurements -> "
              << (fs::path(cfg.out_dir) / "report.json").string() << "\n";
    return 0;
}

struct MaskEntry {
    fs::path mask_or_map;   // binarizable source
    std::optional<fs::path> pmap;  // float scores when available
};

std::map<std::string, MaskEntry> collect_mask_dir(const std::string& dir) {
    std::map<std::string, MaskEntry> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string name = e.path().filename().string();
        std::string stem = e.path().stem().string();
        if (ends_with(name, "_mask.png")) {
            stem.resize(stem.size() - 5);
            out[stem].mask_or_map = e.path();
        } else if (ends_with(name, ".pmap")) {
            if (ends_with(stem, "_truth")) stem.resize(stem.size() - 6);
            auto& entry = out[stem];
            entry.pmap = e.path();
            if (entry.mask_or_map.empty()) entry.mask_or_map = e.path();
        }
    }
    return out;
}

int compare_masks(const RunConfig& cfg, const std::string& a_dir, const std::string& b_dir) {
    const auto a = collect_mask_dir(a_dir);
    const auto b = collect_mask_dir(b_dir);

    std::vector<std::string> per_image{"file,dice,auc"};
    std::vector<double> dices, aucs;
    std::vector<std::string> unpaired;

    for (const auto& [stem, ea] : a) {
        auto it = b.find(stem);
        if (it == b.end()) {
            unpaired.push_back(stem);
            continue;
        }
        auto load_mask = [&](const MaskEntry& e) {
            if (ends_with(e.mask_or_map.filename().string(), "_mask.png"))
                return io::read_mask_png(e.mask_or_map);
            return binarize(io::read_pmap(e.mask_or_map), cfg.threshold);
        };
        const ChoroidMask ma = load_mask(ea);
        const ChoroidMask mb = load_mask(it->second);
        const double d = stats::dice(ma, mb);
        dices.push_back(d);

        std::string auc_field;
        if (ea.pmap) {
            try {
                const double v = stats::auc(io::read_pmap(*ea.pmap), mb);
                aucs.push_back(v);
                auc_field = fmt_fixed(v, 6);
            } catch (const Error&) {
                auc_field = "";  // degenerate truth
            }
        }
        per_image.push_back(stem + "," + fmt_fixed(d, 6) + "," + auc_field);
    }
    for (const auto& [stem, _] : b)
        if (!a.count(stem)) unpaired.push_back(stem);
    if (!unpaired.empty()) {
        std::string msg = "unpaired filenames:";
        for (const auto& f : unpaired) msg += " " + f;
        raise(ErrorCode::InvalidArgument, msg);
    }
    if (dices.empty()) raise(ErrorCode::InvalidArgument, "no paired masks to compare");

    write_lines(fs::path(cfg.out_dir) / "per_image.csv", per_image);

    auto mean_sd = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        const double m = s / v.size();
        double q = 0.0;
        for (double x : v) q += (x - m) * (x - m);
        return std::pair<double, double>{m, v.size() > 1 ? std::sqrt(q / (v.size() - 1)) : 0.0};
    };

    nlohmann::ordered_json report;
    report["n"] = dices.size();
    const auto [dm, dsd] = mean_sd(dices);
    report["dice"] = {{"mean", dm}, {"sd", dsd}};
    if (!aucs.empty()) {
        const auto [am, asd] = mean_sd(aucs);
        report["auc"] = {{"mean", am}, {"sd", asd}};
    }
    std::ofstream out(fs::path(cfg.out_dir) / "report.json");
    out << report.dump(2) << "\n";
    std::cout << "compared " << dices.size() << " mask pairs, mean dice " << fmt_fixed(dm, 4)
              << "\n";
    return 0;
}

} // namespace

int cmd_compare(const RunConfig& cfg, const std::string& series_a, const std::string& series_b) {
    ensure_out_dir(cfg);
    const bool a_csv = fs::is_regular_file(series_a);
    const bool b_csv = fs::is_regular_file(series_b);
    if (a_csv != b_csv)
        raise(ErrorCode::InvalidArgument, "compare: both series must be CSVs or both directories");
    return a_csv ? compare_csv(cfg, series_a, series_b) : compare_masks(cfg, series_a, series_b);
}

int cmd_phantom(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    if (cfg.phantom_count <= 0)
        raise(ErrorCode::InvalidArgument, "phantom: count must be positive");

    std::vector<std::string> stems(cfg.phantom_count);
    parallel_for(cfg.phantom_count, cfg.workers, [&](size_t i) {
        Rng rng(split_seed(cfg.seed, i));
        const phantom::PhantomSpec spec =
            phantom::random_spec(rng, cfg.phantom_width, cfg.phantom_height);
        char stem[32];
        std::snprintf(stem, sizeof stem, "phantom_%04zu", i);
        stems[i] = stem;
        phantom::write_case(cfg.out_dir, stem, spec, cfg.measure);
    });
    std::cout << "wrote " << cfg.phantom_count << " phantom cases to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_augment(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const std::vector<fs::path> images = list_images(cfg.input);
    if (images.empty()) {
        std::cout << "warning: no input images found in " << cfg.input << "\n";
        return 0;
    }
    std::vector<std::string> errors(images.size());
    parallel_for(images.size(), cfg.workers, [&](size_t i) {
        try {
            io::GrayFile g = io::read_grayscale(images[i]);
            AugmentConfig acfg = cfg.augment;
            acfg.seed = split_seed(cfg.seed, i);
            auto [img, log] = apply_pipeline(g.image, acfg);

            const std::string stem = images[i].stem().string();
            io::write_png8(fs::path(cfg.out_dir) / (stem + "_aug.png"), img);
            std::ofstream out(fs::path(cfg.out_dir) / (stem + "_aug.jsonl"), std::ios::binary);
            out << log_to_jsonl(log);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    int failed = 0;
    std::vector<std::string> failures{"file,error"};
    for (size_t i = 0; i < images.size(); ++i) {
        if (errors[i].empty()) continue;
        ++failed;
        std::string msg = errors[i];
        std::replace(msg.begin(), msg.end(), ',', ';');
        failures.push_back(images[i].filename().string() + "," + msg);
    }
    if (failed) write_lines(fs::path(cfg.out_dir) / "failures.csv", failures);
    std::cout << "augmented " << (images.size() - failed) << "/" << images.size() << " images\n";
    return 0;
}

} // namespace choroid::cmd
