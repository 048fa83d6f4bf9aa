#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "choroid/image.hpp"

namespace choroid::stats {

/// 2|A∩B| / (|A|+|B|). Two empty masks agree that there is no choroid, so the
/// 0/0 case is defined as 1.0.
double dice(const ChoroidMask& a, const ChoroidMask& b);

/// Mann-Whitney AUC with midrank tie handling:
/// (R+ - n+(n+1)/2) / (n+ * n-) over positive-pixel probability ranks.
/// Errors when truth is single-class.
double auc(std::span<const double> scores, std::span<const uint8_t> labels);
double auc(const ProbabilityMap& pmap, const ChoroidMask& truth);

double pearson(std::span<const double> xs, std::span<const double> ys);
/// Pearson on midranks.
double spearman(std::span<const double> xs, std::span<const double> ys);
double mae(std::span<const double> xs, std::span<const double> ys);

/// Midranks (average rank of ties), 1-based.
std::vector<double> midranks(std::span<const double> xs);

struct BlandAltman {
    double mean_diff = 0.0;
    double sd_diff = 0.0;  // sample sd, n-1 denominator
    double loa_low = 0.0;
    double loa_high = 0.0;
    int outside_loa_count = 0;
    int n = 0;
};

/// Differences x-y with limits of agreement mean ± multiplier*sd, and the
/// count of differences beyond them.
BlandAltman bland_altman(std::span<const double> xs, std::span<const double> ys,
                         double multiplier = 1.96);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_ci_lo = 0.0, slope_ci_hi = 0.0;
    double intercept_ci_lo = 0.0, intercept_ci_hi = 0.0;
    int n = 0;
};

/// Ordinary least squares with t-based confidence intervals at the given level.
LinFit linfit_ci(std::span<const double> xs, std::span<const double> ys, double level = 0.95);

struct Welch {
    double t = 0.0;
    double dof = 0.0;
    double p = 1.0;  // two-sided
};

/// Welch two-sample t-test with Satterthwaite degrees of freedom.
Welch ttest_welch(std::span<const double> xs, std::span<const double> ys);

/// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
double betainc(double a, double b, double x);

/// Student-t CDF and its inverse (two-sided quantile via bisection to 1e-10).
double t_cdf(double t, double dof);
double t_quantile(double p, double dof);

struct AgreementReport {
    int n = 0;
    std::optional<double> dice;
    std::optional<double> auc;
    std::optional<double> pearson_r;
    std::optional<double> spearman_r;
    std::optional<double> mae;
    std::optional<BlandAltman> bland_altman;
    std::optional<LinFit> linfit;
};

/// Full numeric-agreement battery over paired series.
AgreementReport agreement_report(std::span<const double> xs, std::span<const double> ys);

std::string report_to_json(const AgreementReport& r);

} // namespace choroid::stats
