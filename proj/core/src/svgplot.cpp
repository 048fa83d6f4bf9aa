#include "choroid/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace choroid::svg {

namespace {

constexpr int kWidth = 640, kHeight = 480;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 55;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct AxisRange {
    double lo, hi;
    double to_px(double v, double px_lo, double px_hi) const {
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

AxisRange padded_range(double lo, double hi) {
    if (lo == hi) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.07 * (hi - lo);
    return {lo - pad, hi + pad};
}

double nice_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step;
    if (norm < 1.5)
        step = 1.0;
    else if (norm < 3.5)
        step = 2.0;
    else if (norm < 7.5)
        step = 5.0;
    else
        step = 10.0;
    return step * mag;
}

class Canvas {
public:
    Canvas(const PlotLabels& labels, AxisRange xr, AxisRange yr) : xr_(xr), yr_(yr) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
             << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
        out_ << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
        axes(labels);
    }

    double px(double x) const { return xr_.to_px(x, kMarginL, kWidth - kMarginR); }
    double py(double y) const { return yr_.to_px(y, kHeight - kMarginB, kMarginT); }

    void point(double x, double y, const char* color) {
        out_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
             << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
    }

    /// Line in data space, clipped to the axis box by parameter range.
    void line(double x0, double y0, double x1, double y1, const char* color, bool dashed,
              const std::string& label = "") {
        out_ << "<line x1=\"" << fmt(px(x0)) << "\" y1=\"" << fmt(py(y0)) << "\" x2=\""
             << fmt(px(x1)) << "\" y2=\"" << fmt(py(y1)) << "\" stroke=\"" << color
             << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "")
             << "/>\n";
        if (!label.empty())
            out_ << "<text x=\"" << fmt(px(x1) - 4) << "\" y=\"" << fmt(py(y1) - 5)
                 << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color << "\">" << label
                 << "</text>\n";
    }

    void hline(double y, const char* color, bool dashed, const std::string& label) {
        line(xr_.lo, y, xr_.hi, y, color, dashed, label);
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    void axes(const PlotLabels& labels) {
        out_ << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\""
             << (kWidth - kMarginL - kMarginR) << "\" height=\"" << (kHeight - kMarginT - kMarginB)
             << "\" fill=\"none\" stroke=\"black\"/>\n";
        out_ << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">"
             << labels.title << "</text>\n";
        out_ << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
             << "\" font-size=\"13\" text-anchor=\"middle\">" << labels.xlabel << "</text>\n";
        out_ << "<text x=\"16\" y=\"" << kHeight / 2
             << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
             << kHeight / 2 << ")\">" << labels.ylabel << "</text>\n";

        const double xstep = nice_step(xr_.hi - xr_.lo);
        for (double v = std::ceil(xr_.lo / xstep) * xstep; v <= xr_.hi + 1e-12 * xstep; v += xstep) {
            out_ << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << (kHeight - kMarginB) << "\" x2=\""
                 << fmt(px(v)) << "\" y2=\"" << (kHeight - kMarginB + 5)
                 << "\" stroke=\"black\"/>\n";
            out_ << "<text x=\"" << fmt(px(v)) << "\" y=\"" << (kHeight - kMarginB + 18)
                 << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(v) << "</text>\n";
        }
        const double ystep = nice_step(yr_.hi - yr_.lo);
        for (double v = std::ceil(yr_.lo / ystep) * ystep; v <= yr_.hi + 1e-12 * ystep; v += ystep) {
            out_ << "<line x1=\"" << (kMarginL - 5) << "\" y1=\"" << fmt(py(v)) << "\" x2=\""
                 << kMarginL << "\" y2=\"" << fmt(py(v)) << "\" stroke=\"black\"/>\n";
            out_ << "<text x=\"" << (kMarginL - 8) << "\" y=\"" << fmt(py(v) + 4)
                 << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
        }
    }

    AxisRange xr_, yr_;
    std::ostringstream out_;
};

} // namespace

std::string correlation_plot(std::span<const double> xs, std::span<const double> ys,
                             const stats::LinFit& fit, const PlotLabels& labels) {
    double lo = xs.empty() ? 0.0 : xs[0], hi = lo;
    for (double v : xs) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : ys) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const AxisRange r = padded_range(lo, hi);

    Canvas cv(labels, r, r);
    cv.line(r.lo, r.lo, r.hi, r.hi, "#888888", true, "identity");
    cv.line(r.lo, fit.intercept + fit.slope * r.lo, r.hi, fit.intercept + fit.slope * r.hi,
            "#d62728", false, "fit");
    for (size_t i = 0; i < xs.size(); ++i) cv.point(xs[i], ys[i], "#1f77b4");
    return cv.finish();
}

std::string bland_altman_plot(std::span<const double> xs, std::span<const double> ys,
                              const stats::BlandAltman& ba, const PlotLabels& labels) {
    std::vector<double> means(xs.size()), diffs(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        means[i] = 0.5 * (xs[i] + ys[i]);
        diffs[i] = xs[i] - ys[i];
    }
    double xlo = means.empty() ? 0.0 : means[0], xhi = xlo;
    for (double v : means) {
        xlo = std::min(xlo, v);
        xhi = std::max(xhi, v);
    }
    double ylo = std::min(ba.loa_low, ba.mean_diff), yhi = std::max(ba.loa_high, ba.mean_diff);
    for (double v : diffs) {
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
    }

    Canvas cv(labels, padded_range(xlo, xhi), padded_range(ylo, yhi));
    cv.hline(ba.mean_diff, "#d62728", false, "mean " + fmt(ba.mean_diff));
    cv.hline(ba.loa_low, "#ff7f0e", true, "-1.96 sd " + fmt(ba.loa_low));
    cv.hline(ba.loa_high, "#ff7f0e", true, "+1.96 sd " + fmt(ba.loa_high));
    for (size_t i = 0; i < means.size(); ++i) cv.point(means[i], diffs[i], "#1f77b4");
    return cv.finish();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
    out << content;
}

} // namespace choroid::svg
