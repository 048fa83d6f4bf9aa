#include "oracles.hpp"

namespace oracle {

using choroid::nn::ActKind;
using choroid::nn::LayerKind;
using choroid::nn::LayerSpec;
using choroid::nn::Network;
using choroid::nn::Tensor;

namespace {

double act_naive(double x, ActKind kind) {
    switch (kind) {
        case ActKind::Relu: return std::max(0.0, x);
        case ActKind::Relu6: return std::min(std::max(0.0, x), 6.0);
        case ActKind::HSwish: return x * std::min(std::max(x + 3.0, 0.0), 6.0) / 6.0;
        case ActKind::HSigmoid: return std::min(std::max(x + 3.0, 0.0), 6.0) / 6.0;
    }
    return x;
}

std::vector<float> slice(const Network& net, size_t layer, size_t offset, size_t count) {
    const float* base = net.weights.data() + net.weight_offset[layer] + offset;
    return std::vector<float>(base, base + count);
}

} // namespace

Tensor forward_naive(const Network& net, const Tensor& input) {
    std::vector<Tensor> node(net.layers.size() + 1);
    node[0] = input;

    for (size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& L = net.layers[i];
        const Tensor& a = node[L.inputs[0]];
        Tensor out;
        switch (L.kind) {
            case LayerKind::Conv: {
                const size_t nw =
                    static_cast<size_t>(L.out_ch) * (L.in_ch / L.groups) * L.kernel * L.kernel;
                out = conv2d_naive(a, slice(net, i, 0, nw), slice(net, i, nw, L.out_ch),
                                   L.out_ch, L.kernel, L.stride, L.pad, L.groups);
                break;
            }
            case LayerKind::DwConv: {
                const size_t nw = static_cast<size_t>(L.channels) * L.kernel * L.kernel;
                out = conv2d_naive(a, slice(net, i, 0, nw), slice(net, i, nw, L.channels),
                                   L.channels, L.kernel, L.stride, L.pad, L.channels);
                break;
            }
            case LayerKind::Bn: {
                const auto gamma = slice(net, i, 0, L.channels);
                const auto beta = slice(net, i, L.channels, L.channels);
                const auto mean = slice(net, i, 2 * L.channels, L.channels);
                const auto var = slice(net, i, 3 * L.channels, L.channels);
                out = a;
                for (int c = 0; c < L.channels; ++c)
                    for (int r = 0; r < a.height; ++r)
                        for (int x = 0; x < a.width; ++x)
                            out.at(c, r, x) = static_cast<float>(
                                gamma[c] * (a.at(c, r, x) - mean[c]) /
                                    std::sqrt(var[c] + 1e-5) +
                                beta[c]);
                break;
            }
            case LayerKind::Act: {
                out = a;
                for (float& v : out.data) v = static_cast<float>(act_naive(v, L.act));
                break;
            }
            case LayerKind::Se: {
                const int C = L.channels;
                const int H = std::max(1, C / L.reduction);
                const auto w1 = slice(net, i, 0, static_cast<size_t>(H) * C);
                const auto b1 = slice(net, i, static_cast<size_t>(H) * C, H);
                const auto w2 = slice(net, i, static_cast<size_t>(H) * C + H,
                                      static_cast<size_t>(C) * H);
                const auto b2 = slice(net, i, static_cast<size_t>(H) * C + H +
                                                  static_cast<size_t>(C) * H, C);
                std::vector<double> pooled(C, 0.0);
                for (int c = 0; c < C; ++c) {
                    for (int r = 0; r < a.height; ++r)
                        for (int x = 0; x < a.width; ++x) pooled[c] += a.at(c, r, x);
                    pooled[c] /= static_cast<double>(a.height) * a.width;
                }
                std::vector<double> hidden(H);
                for (int j = 0; j < H; ++j) {
                    double acc = b1[j];
                    for (int c = 0; c < C; ++c) acc += w1[static_cast<size_t>(j) * C + c] * pooled[c];
                    hidden[j] = std::max(0.0, acc);
                }
                out = a;
                for (int c = 0; c < C; ++c) {
                    double acc = b2[c];
                    for (int j = 0; j < H; ++j) acc += w2[static_cast<size_t>(c) * H + j] * hidden[j];
                    const double gate = act_naive(acc, ActKind::HSigmoid);
                    for (int r = 0; r < a.height; ++r)
                        for (int x = 0; x < a.width; ++x)
                            out.at(c, r, x) = static_cast<float>(a.at(c, r, x) * gate);
                }
                break;
            }
            case LayerKind::GlobalAvgPool: {
                out = Tensor(a.channels, 1, 1);
                for (int c = 0; c < a.channels; ++c) {
                    double acc = 0.0;
                    for (int r = 0; r < a.height; ++r)
                        for (int x = 0; x < a.width; ++x) acc += a.at(c, r, x);
                    out.at(c, 0, 0) =
                        static_cast<float>(acc / (static_cast<double>(a.height) * a.width));
                }
                break;
            }
            case LayerKind::Upsample2xBilinear: {
                const int oh = a.height * 2, ow = a.width * 2;
                out = Tensor(a.channels, oh, ow);
                for (int c = 0; c < a.channels; ++c)
                    for (int r = 0; r < oh; ++r)
                        for (int x = 0; x < ow; ++x) {
                            const double sy = (a.height <= 1)
                                                  ? 0.0
                                                  : static_cast<double>(r) * (a.height - 1) /
                                                        (oh - 1);
                            const double sx = (a.width <= 1)
                                                  ? 0.0
                                                  : static_cast<double>(x) * (a.width - 1) /
                                                        (ow - 1);
                            const int y0 = static_cast<int>(sy),
                                      x0 = static_cast<int>(sx);
                            const int y1 = std::min(y0 + 1, a.height - 1),
                                      x1 = std::min(x0 + 1, a.width - 1);
                            const double fy = sy - y0, fx = sx - x0;
                            const double v =
                                (1 - fy) * ((1 - fx) * a.at(c, y0, x0) + fx * a.at(c, y0, x1)) +
                                fy * ((1 - fx) * a.at(c, y1, x0) + fx * a.at(c, y1, x1));
                            out.at(c, r, x) = static_cast<float>(v);
                        }
                break;
            }
            case LayerKind::Add: {
                out = a;
                for (size_t k = 1; k < L.inputs.size(); ++k) {
                    const Tensor& b = node[L.inputs[k]];
                    for (size_t j = 0; j < out.size(); ++j) out.data[j] += b.data[j];
                }
                break;
            }
            case LayerKind::Concat: {
                int ch = 0;
                for (int in : L.inputs) ch += node[in].channels;
                out = Tensor(ch, a.height, a.width);
                size_t off = 0;
                for (int in : L.inputs) {
                    const Tensor& b = node[in];
                    std::copy(b.data.begin(), b.data.end(), out.data.begin() + off);
                    off += b.size();
                }
                break;
            }
            case LayerKind::SigmoidHead: {
                out = a;
                for (float& v : out.data)
                    v = static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(v))));
                break;
            }
            case LayerKind::Identity:
                out = a;
                break;
        }
        node[i + 1] = std::move(out);
    }
    return node.back();
}

} // namespace oracle
