// Independent reference implementations used as test oracles. These stay
// deliberately naive (definition-level loops, double accumulation) and must
// not share code with the library paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "choroid/image.hpp"
#include "choroid/nnexec.hpp"
#include "choroid/tensor.hpp"

namespace oracle {

/// Plain 7-deep loop nest over output channel, position, input channel and
/// kernel window; double accumulator.
inline choroid::nn::Tensor conv2d_naive(const choroid::nn::Tensor& in,
                                        const std::vector<float>& w, const std::vector<float>& b,
                                        int out_ch, int k, int stride, int pad, int groups) {
    const int in_ch = in.channels;
    const int icg = in_ch / groups, ocg = out_ch / groups;
    const int out_h = (in.height + 2 * pad - k) / stride + 1;
    const int out_w = (in.width + 2 * pad - k) / stride + 1;
    choroid::nn::Tensor out(out_ch, out_h, out_w);

    for (int oc = 0; oc < out_ch; ++oc) {
        const int g = oc / ocg;
        for (int oy = 0; oy < out_h; ++oy) {
            for (int ox = 0; ox < out_w; ++ox) {
                double acc = b[oc];
                for (int icl = 0; icl < icg; ++icl) {
                    const int ic = g * icg + icl;
                    for (int ky = 0; ky < k; ++ky) {
                        for (int kx = 0; kx < k; ++kx) {
                            const int y = oy * stride + ky - pad;
                            const int x = ox * stride + kx - pad;
                            double v = 0.0;
                            if (x >= 0 && x < in.width && y >= 0 && y < in.height)
                                v = in.at(ic, y, x);
                            const size_t wi =
                                ((static_cast<size_t>(oc) * icg + icl) * k + ky) * k + kx;
                            acc += v * w[wi];
                        }
                    }
                }
                out.at(oc, oy, ox) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

/// Walks the same layer graph with definition-level layer implementations.
choroid::nn::Tensor forward_naive(const choroid::nn::Network& net,
                                  const choroid::nn::Tensor& input);

/// AUC by explicit threshold sweep: one ROC vertex per distinct score,
/// trapezoidal integration (exactly the Mann-Whitney value, ties included).
inline double auc_threshold_sweep(const std::vector<double>& scores,
                                  const std::vector<uint8_t>& labels) {
    std::vector<double> uniq = scores;
    std::sort(uniq.begin(), uniq.end(), std::greater<>());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    double n_pos = 0, n_neg = 0;
    for (uint8_t l : labels) (l ? n_pos : n_neg) += 1.0;

    double area = 0.0, prev_fpr = 0.0, prev_tpr = 0.0;
    for (double thr : uniq) {
        double tp = 0, fp = 0;
        for (size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= thr) (labels[i] ? tp : fp) += 1.0;
        }
        const double tpr = tp / n_pos, fpr = fp / n_neg;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    area += (1.0 - prev_fpr) * (1.0 + prev_tpr) / 2.0;
    return area;
}

/// One-pass "textbook" product-moment formula.
inline double pearson_textbook(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        syy += ys[i] * ys[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

/// Recursive flood fill labeling (8-connectivity) over an explicit stack-free
/// recursion via call stack on small images.
inline void flood(const choroid::Mask& m, std::vector<int>& lab, int r, int c, int id) {
    lab[static_cast<size_t>(r) * m.width + c] = id;
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
            const int nr = r + dr, nc = c + dc;
            if (nr < 0 || nr >= m.height || nc < 0 || nc >= m.width) continue;
            if (m.at(nr, nc) && !lab[static_cast<size_t>(nr) * m.width + nc])
                flood(m, lab, nr, nc, id);
        }
}

/// Largest-component reference: label by flood fill, keep the first label of
/// maximal size (labels are assigned in row-major discovery order).
inline choroid::Mask largest_component_naive(const choroid::Mask& m) {
    std::vector<int> lab(m.size(), 0);
    int next = 0;
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c)
            if (m.at(r, c) && !lab[static_cast<size_t>(r) * m.width + c])
                flood(m, lab, r, c, ++next);

    std::vector<size_t> sizes(next + 1, 0);
    for (size_t i = 0; i < m.size(); ++i) sizes[lab[i]]++;
    int best = 0;
    size_t mx = 0;
    for (int id = 1; id <= next; ++id)
        if (sizes[id] > mx) {
            mx = sizes[id];
            best = id;
        }
    choroid::Mask out(m.height, m.width, 0);
    for (size_t i = 0; i < m.size(); ++i) out.data[i] = (best && lab[i] == best) ? 1 : 0;
    return out;
}

/// Student-t two-sided p by direct density integration (Simpson on a mapped
/// infinite tail), independent of the incomplete-beta path.
inline double t_twosided_p_quadrature(double t, double dof) {
    t = std::abs(t);
    const double log_norm = std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0) -
                            0.5 * std::log(dof * std::acos(-1.0));
    auto pdf = [&](double u) {
        return std::exp(log_norm - (dof + 1.0) / 2.0 * std::log1p(u * u / dof));
    };
    // tail integral over [t, inf): substitute u = t + s/(1-s), s in [0,1)
    const int n = 400000;  // even
    const double h = 1.0 / n;
    double acc = pdf(t);  // s=0 term (jacobian 1); s->1 endpoint vanishes
    for (int i = 1; i < n; ++i) {
        const double s = i * h;
        const double u = t + s / (1.0 - s);
        const double jac = 1.0 / ((1.0 - s) * (1.0 - s));
        acc += pdf(u) * jac * (i % 2 ? 4.0 : 2.0);
    }
    const double tail = acc * h / 3.0;
    return std::min(1.0, 2.0 * tail);
}

} // namespace oracle
