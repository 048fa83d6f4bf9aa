#include "doctest.h"

#include <cmath>

#include "choroid/rng.hpp"
#include "choroid/stats.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

using namespace choroid;
using namespace choroid::stats;

TEST_SUITE_BEGIN("stats");

TEST_CASE("dice: trivia and symmetry/bounds over random masks") {
    Mask a(4, 4, 1), b(4, 4, 1);
    CHECK(dice(a, b) == 1.0);

    Mask c(4, 4, 0), d(4, 4, 0);
    CHECK(dice(c, d) == 1.0);  // both empty: agreement by definition

    Mask e(4, 4, 0), f(4, 4, 0);
    e.at(0, 0) = 1;
    f.at(3, 3) = 1;
    CHECK(dice(e, f) == 0.0);

    // |A|=|B|=4, overlap 2 -> 0.5
    Mask g(4, 4, 0), h(4, 4, 0);
    for (int i = 0; i < 4; ++i) g.at(0, i) = 1;
    for (int i = 2; i < 6; ++i) h.at(i / 4, i % 4) = 1;
    CHECK(dice(g, h) == doctest::Approx(0.5));

    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        Mask x = test_support::random_mask(rng, 8, 8, 0.4);
        Mask y = test_support::random_mask(rng, 8, 8, 0.4);
        const double dxy = dice(x, y);
        CHECK(dxy == dice(y, x));
        CHECK(dxy >= 0.0);
        CHECK(dxy <= 1.0);
        CHECK(dice(x, x) == 1.0);
    }

    CHECK_THROWS_AS(dice(Mask(2, 2), Mask(3, 3)), Error);
}

TEST_CASE("auc: separation, ties, and the threshold-sweep oracle") {
    // perfect separation
    std::vector<double> s{0.9, 0.8, 0.2, 0.1};
    std::vector<uint8_t> l{1, 1, 0, 0};
    CHECK(auc(s, l) == doctest::Approx(1.0));

    // complete ties -> 0.5
    std::vector<double> flat(10, 0.5);
    std::vector<uint8_t> lab{1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
    CHECK(auc(flat, lab) == doctest::Approx(0.5));

    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const int n = 200;
        std::vector<double> scores(n);
        std::vector<uint8_t> labels(n);
        bool has_pos = false, has_neg = false;
        for (int i = 0; i < n; ++i) {
            // quantized scores force plenty of ties
            scores[i] = std::floor(rng.uniform() * 12.0) / 12.0;
            labels[i] = rng.uniform() < 0.4 ? 1 : 0;
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(auc(scores, labels) ==
              doctest::Approx(oracle::auc_threshold_sweep(scores, labels)).epsilon(1e-9));
    }

    std::vector<uint8_t> ones(4, 1);
    CHECK_THROWS_AS(auc(std::vector<double>(4, 0.5), ones), Error);
}

TEST_CASE("auc is invariant under strictly monotone transforms") {
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const int n = 30;
        std::vector<double> scores(n);
        std::vector<uint8_t> labels(n);
        labels[0] = 1;
        labels[1] = 0;
        for (int i = 0; i < n; ++i) {
            scores[i] = rng.uniform();
            if (i > 1) labels[i] = rng.uniform() < 0.5;
        }
        std::vector<double> warped(n);
        for (int i = 0; i < n; ++i) warped[i] = std::exp(3.0 * scores[i]) - 2.0;
        CHECK(auc(scores, labels) == doctest::Approx(auc(warped, labels)).epsilon(1e-12));
    }
}

TEST_CASE("pearson/spearman: affine and monotone behaviour, textbook oracle") {
    std::vector<double> xs{1, 2, 3, 4, 5};
    std::vector<double> ys{3, 5, 7, 9, 11};  // 2x+1
    CHECK(pearson(xs, ys) == doctest::Approx(1.0));
    CHECK(spearman(xs, ys) == doctest::Approx(1.0));

    std::vector<double> neg{-1, -2, -3, -4, -5};
    CHECK(pearson(xs, neg) == doctest::Approx(-1.0));
    CHECK(spearman(xs, neg) == doctest::Approx(-1.0));

    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> a(50), b(50);
        for (int i = 0; i < 50; ++i) {
            a[i] = rng.normal(0, 2);
            b[i] = 0.6 * a[i] + rng.normal(0, 1);
        }
        CHECK(pearson(a, b) == doctest::Approx(oracle::pearson_textbook(a, b)).epsilon(1e-12));

        // pearson: positive affine invariance
        std::vector<double> a2(50), b2(50);
        for (int i = 0; i < 50; ++i) {
            a2[i] = 3.0 * a[i] + 7.0;
            b2[i] = 0.5 * b[i] - 2.0;
        }
        CHECK(pearson(a2, b2) == doctest::Approx(pearson(a, b)).epsilon(1e-12));

        // spearman: strictly monotone invariance
        std::vector<double> bw(50);
        for (int i = 0; i < 50; ++i) bw[i] = std::atan(b[i]) * 5.0 + 1.0;
        CHECK(spearman(a, bw) == doctest::Approx(spearman(a, b)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{2.0}), Error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("mae") {
    std::vector<double> xs{1, 2, 3};
    CHECK(mae(xs, xs) == 0.0);
    std::vector<double> off{1.5, 2.5, 3.5};
    CHECK(mae(xs, off) == doctest::Approx(0.5));

    Rng rng(5);
    std::vector<double> a(64), b(64);
    for (int i = 0; i < 64; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal();
    }
    double want = 0.0;
    for (int i = 0; i < 64; ++i) want += std::abs(a[i] - b[i]);
    CHECK(mae(a, b) == doctest::Approx(want / 64.0).epsilon(1e-15));
}

TEST_CASE("bland_altman: trivia, antisymmetry, outlier counting") {
    std::vector<double> xs{1, 2, 3, 4};
    BlandAltman same = bland_altman(xs, xs);
    CHECK(same.mean_diff == 0.0);
    CHECK(same.sd_diff == 0.0);
    CHECK(same.loa_low == 0.0);
    CHECK(same.loa_high == 0.0);
    CHECK(same.outside_loa_count == 0);

    std::vector<double> shifted{1.7, 2.7, 3.7, 4.7};
    BlandAltman off = bland_altman(shifted, xs);
    CHECK(off.mean_diff == doctest::Approx(0.7));
    CHECK(off.sd_diff == doctest::Approx(0.0));

    Rng rng(6);
    std::vector<double> a(54), b(54);
    for (int i = 0; i < 54; ++i) {
        a[i] = 250.0 + rng.normal(0, 30);
        b[i] = a[i] + rng.normal(0, 5);
    }
    // inject three gross outliers, the structure of the paper-style series
    a[7] += 60.0;
    a[23] -= 55.0;
    a[41] += 70.0;

    BlandAltman ba = bland_altman(a, b);
    int hand_count = 0;
    {
        double m = 0.0;
        for (int i = 0; i < 54; ++i) m += a[i] - b[i];
        m /= 54.0;
        double sq = 0.0;
        for (int i = 0; i < 54; ++i) sq += (a[i] - b[i] - m) * (a[i] - b[i] - m);
        const double sd = std::sqrt(sq / 53.0);
        for (int i = 0; i < 54; ++i)
            if (std::abs(a[i] - b[i] - m) > 1.96 * sd) ++hand_count;
    }
    CHECK(ba.outside_loa_count == hand_count);
    CHECK(ba.loa_low == doctest::Approx(ba.mean_diff - 1.96 * ba.sd_diff));
    CHECK(ba.loa_high == doctest::Approx(ba.mean_diff + 1.96 * ba.sd_diff));

    BlandAltman swapped = bland_altman(b, a);
    CHECK(swapped.mean_diff == doctest::Approx(-ba.mean_diff));
    CHECK(swapped.sd_diff == doctest::Approx(ba.sd_diff));

    CHECK_THROWS_AS(bland_altman(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
}

TEST_CASE("t machinery: published table value and cdf/quantile consistency") {
    CHECK(t_quantile(0.975, 25.0) == doctest::Approx(2.0595).epsilon(1e-4));
    CHECK(t_quantile(0.975, 1.0) == doctest::Approx(12.7062).epsilon(1e-4));
    CHECK(t_quantile(0.95, 10.0) == doctest::Approx(1.8125).epsilon(1e-4));
    CHECK(t_quantile(0.5, 7.0) == 0.0);
    CHECK(t_quantile(0.025, 25.0) == doctest::Approx(-2.0595).epsilon(1e-4));

    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        const double p = rng.uniform(0.51, 0.999);
        const double dof = rng.uniform(2.0, 60.0);
        CHECK(t_cdf(t_quantile(p, dof), dof) == doctest::Approx(p).epsilon(1e-8));
    }

    // betainc sanity: I_x(1,1) = x
    for (double x : {0.1, 0.35, 0.8}) CHECK(betainc(1, 1, x) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("linfit: exact line, exact recovery, CI structure") {
    std::vector<double> xs{1, 2, 3, 4, 5, 6};
    std::vector<double> ys = xs;
    LinFit fit = linfit_ci(xs, ys);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.slope_ci_hi - fit.slope_ci_lo == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fit.intercept_ci_hi - fit.intercept_ci_lo == doctest::Approx(0.0).epsilon(1e-10));

    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const double a = rng.normal(0, 2), b = rng.normal(0, 10);
        std::vector<double> x(30), y(30);
        for (int i = 0; i < 30; ++i) {
            x[i] = rng.normal(0, 3);
            y[i] = a * x[i] + b;
        }
        LinFit f = linfit_ci(x, y);
        CHECK(f.slope == doctest::Approx(a).epsilon(1e-10));
        CHECK(f.intercept == doctest::Approx(b).epsilon(1e-10));
    }

    CHECK_THROWS_AS(linfit_ci(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
    CHECK_THROWS_AS(linfit_ci(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("linfit coverage near nominal on noisy identity-line data") {
    Rng rng(9);
    int slope_cover = 0, intercept_cover = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> x(25), y(25);
        for (int i = 0; i < 25; ++i) {
            x[i] = 200.0 + 10.0 * i;
            y[i] = x[i] + rng.normal(0, 20);
        }
        LinFit f = linfit_ci(x, y);
        slope_cover += (f.slope_ci_lo <= 1.0 && 1.0 <= f.slope_ci_hi);
        intercept_cover += (f.intercept_ci_lo <= 0.0 && 0.0 <= f.intercept_ci_hi);
    }
    CHECK(slope_cover >= static_cast<int>(trials * 0.88));
    CHECK(intercept_cover >= static_cast<int>(trials * 0.88));
}

TEST_CASE("welch t-test") {
    std::vector<double> xs{1, 2, 3, 4, 5};
    Welch same = ttest_welch(xs, xs);
    CHECK(same.t == doctest::Approx(0.0));
    CHECK(same.p == doctest::Approx(1.0));

    // equal n, equal variance: Satterthwaite recovers the pooled dof 2n-2
    std::vector<double> ys{2, 3, 4, 5, 6};
    Welch w = ttest_welch(xs, ys);
    CHECK(w.dof == doctest::Approx(8.0).epsilon(1e-12));

    // seeded Gaussian samples against an independent quadrature reference
    Rng rng(10);
    std::vector<double> a(12), b(17);
    for (auto& v : a) v = rng.normal(0.0, 1.0);
    for (auto& v : b) v = rng.normal(0.6, 1.4);
    Welch g = ttest_welch(a, b);
    const double p_ref = oracle::t_twosided_p_quadrature(g.t, g.dof);
    CHECK(g.p == doctest::Approx(p_ref).epsilon(1e-6));

    CHECK_THROWS_AS(ttest_welch(std::vector<double>{1.0}, xs), Error);
}

TEST_CASE("agreement report JSON carries every populated field") {
    Rng rng(11);
    std::vector<double> a(20), b(20);
    for (int i = 0; i < 20; ++i) {
        a[i] = 200 + rng.normal(0, 40);
        b[i] = a[i] + rng.normal(0, 10);
    }
    AgreementReport rep = agreement_report(a, b);
    const std::string json = report_to_json(rep);
    for (const char* key : {"\"n\"", "\"pearson_r\"", "\"spearman_r\"", "\"mae\"",
                            "\"bland_altman\"", "\"linfit\"", "\"slope_ci95\""})
        CHECK(json.find(key) != std::string::npos);
    CHECK(json.find("\"dice\"") == std::string::npos);  // not a mask comparison
}

TEST_SUITE_END();
