#include "choroid/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace choroid::stats {

namespace {

void require_paired(std::span<const double> xs, std::span<const double> ys, size_t min_n,
                    const char* what) {
    if (xs.size() != ys.size())
        raise(ErrorCode::DimensionMismatch, std::string(what) + ": series lengths differ");
    if (xs.size() < min_n)
        raise(ErrorCode::DegenerateInput,
              std::string(what) + ": needs at least " + std::to_string(min_n) + " pairs");
}

double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double v : xs) s += v;
    return s / static_cast<double>(xs.size());
}

double sample_var(std::span<const double> xs, double mean) {
    double s = 0.0;
    for (double v : xs) s += (v - mean) * (v - mean);
    return s / static_cast<double>(xs.size() - 1);
}

} // namespace

double dice(const ChoroidMask& a, const ChoroidMask& b) {
    require_same_dims(a, b, "dice");
    size_t na = 0, nb = 0, inter = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        const bool pa = a.data[i] != 0, pb = b.data[i] != 0;
        na += pa;
        nb += pb;
        inter += pa && pb;
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

std::vector<double> midranks(std::span<const double> xs) {
    const size_t n = xs.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });

    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // average of 1-based ranks
        for (size_t k = i; k <= j; ++k) rank[order[k]] = r;
        i = j + 1;
    }
    return rank;
}

double auc(std::span<const double> scores, std::span<const uint8_t> labels) {
    if (scores.size() != labels.size())
        raise(ErrorCode::DimensionMismatch, "auc: series lengths differ");
    size_t n_pos = 0;
    for (uint8_t l : labels) n_pos += l != 0;
    const size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        raise(ErrorCode::DegenerateInput, "auc: truth contains a single class");

    const std::vector<double> rank = midranks(scores);
    double rank_sum_pos = 0.0;
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i]) rank_sum_pos += rank[i];

    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double auc(const ProbabilityMap& pmap, const ChoroidMask& truth) {
    if (pmap.height != truth.height || pmap.width != truth.width)
        raise(ErrorCode::DimensionMismatch, "auc: map and truth dims differ");
    std::vector<double> scores(pmap.size());
    for (size_t i = 0; i < pmap.size(); ++i) scores[i] = pmap.data[i];
    return auc(scores, std::span<const uint8_t>(truth.data.data(), truth.data.size()));
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    require_paired(xs, ys, 2, "pearson");
    const double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        raise(ErrorCode::DegenerateInput, "pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    require_paired(xs, ys, 2, "spearman");
    const std::vector<double> rx = midranks(xs), ry = midranks(ys);
    return pearson(rx, ry);
}

double mae(std::span<const double> xs, std::span<const double> ys) {
    require_paired(xs, ys, 1, "mae");
    double s = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) s += std::abs(xs[i] - ys[i]);
    return s / static_cast<double>(xs.size());
}

BlandAltman bland_altman(std::span<const double> xs, std::span<const double> ys,
                         double multiplier) {
    require_paired(xs, ys, 2, "bland_altman");
    std::vector<double> diffs(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) diffs[i] = xs[i] - ys[i];

    BlandAltman ba;
    ba.n = static_cast<int>(xs.size());
    ba.mean_diff = mean_of(diffs);
    ba.sd_diff = std::sqrt(sample_var(diffs, ba.mean_diff));
    ba.loa_low = ba.mean_diff - multiplier * ba.sd_diff;
    ba.loa_high = ba.mean_diff + multiplier * ba.sd_diff;
    for (double d : diffs)
        if (std::abs(d - ba.mean_diff) > multiplier * ba.sd_diff) ++ba.outside_loa_count;
    return ba;
}

// ---- beta / t machinery ----

namespace {

/// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16, kFpMin = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double betainc(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) raise(ErrorCode::InvalidArgument, "betainc: a,b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double dof) {
    if (dof <= 0.0) raise(ErrorCode::InvalidArgument, "t_cdf: dof must be positive");
    if (t == 0.0) return 0.5;
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * betainc(dof / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, double dof) {
    if (p <= 0.0 || p >= 1.0) raise(ErrorCode::InvalidArgument, "t_quantile: p must be in (0,1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -t_quantile(1.0 - p, dof);

    double lo = 0.0, hi = 2.0;
    while (t_cdf(hi, dof) < p) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (t_cdf(mid, dof) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-10 * std::max(1.0, lo)) break;
    }
    return 0.5 * (lo + hi);
}

LinFit linfit_ci(std::span<const double> xs, std::span<const double> ys, double level) {
    require_paired(xs, ys, 3, "linfit_ci");
    if (level <= 0.0 || level >= 1.0)
        raise(ErrorCode::InvalidArgument, "linfit_ci: level must be in (0,1)");
    const size_t n = xs.size();
    const double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) raise(ErrorCode::DegenerateInput, "linfit_ci: degenerate x");

    LinFit fit;
    fit.n = static_cast<int>(n);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ssr = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += r * r;
    }
    const double dof = static_cast<double>(n - 2);
    const double sigma2 = ssr / dof;
    const double se_slope = std::sqrt(sigma2 / sxx);
    const double se_intercept = std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    const double tq = t_quantile(0.5 + level / 2.0, dof);

    fit.slope_ci_lo = fit.slope - tq * se_slope;
    fit.slope_ci_hi = fit.slope + tq * se_slope;
    fit.intercept_ci_lo = fit.intercept - tq * se_intercept;
    fit.intercept_ci_hi = fit.intercept + tq * se_intercept;
    return fit;
}

Welch ttest_welch(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() < 2 || ys.size() < 2)
        raise(ErrorCode::DegenerateInput, "ttest_welch: each sample needs n >= 2");
    const double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
    const double mx = mean_of(xs), my = mean_of(ys);
    const double vx = sample_var(xs, mx), vy = sample_var(ys, my);

    const double se2 = vx / nx + vy / ny;
    Welch w;
    if (se2 == 0.0) {
        // identical constant samples
        w.t = 0.0;
        w.dof = nx + ny - 2.0;
        w.p = 1.0;
        return w;
    }
    w.t = (mx - my) / std::sqrt(se2);
    w.dof = se2 * se2 /
            ((vx / nx) * (vx / nx) / (nx - 1.0) + (vy / ny) * (vy / ny) / (ny - 1.0));
    w.p = betainc(w.dof / 2.0, 0.5, w.dof / (w.dof + w.t * w.t));
    return w;
}

AgreementReport agreement_report(std::span<const double> xs, std::span<const double> ys) {
    require_paired(xs, ys, 2, "agreement_report");
    AgreementReport r;
    r.n = static_cast<int>(xs.size());
    r.pearson_r = pearson(xs, ys);
    r.spearman_r = spearman(xs, ys);
    r.mae = mae(xs, ys);
    r.bland_altman = bland_altman(xs, ys);
    if (xs.size() >= 3) r.linfit = linfit_ci(xs, ys);
    return r;
}

std::string report_to_json(const AgreementReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    if (r.dice) j["dice"] = *r.dice;
    if (r.auc) j["auc"] = *r.auc;
    if (r.pearson_r) j["pearson_r"] = *r.pearson_r;
    if (r.spearman_r) j["spearman_r"] = *r.spearman_r;
    if (r.mae) j["mae"] = *r.mae;
    if (r.bland_altman) {
        const BlandAltman& ba = *r.bland_altman;
        j["bland_altman"] = {{"mean_diff", ba.mean_diff}, {"sd_diff", ba.sd_diff},
                             {"loa_low", ba.loa_low},     {"loa_high", ba.loa_high},
                             {"outside_loa_count", ba.outside_loa_count}};
    }
    if (r.linfit) {
        const LinFit& f = *r.linfit;
        j["linfit"] = {{"slope", f.slope},
                       {"intercept", f.intercept},
                       {"slope_ci95", {f.slope_ci_lo, f.slope_ci_hi}},
                       {"intercept_ci95", {f.intercept_ci_lo, f.intercept_ci_hi}}};
    }
    return j.dump(2);
}

} // namespace choroid::stats
