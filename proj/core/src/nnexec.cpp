#include "choroid/nnexec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace choroid::nn {

namespace {
constexpr double kBnEps = 1e-5;

int se_hidden(int channels, int reduction) { return std::max(1, channels / reduction); }
} // namespace

size_t LayerSpec::weight_count() const {
    switch (kind) {
        case LayerKind::Conv:
            return static_cast<size_t>(out_ch) * (in_ch / groups) * kernel * kernel + out_ch;
        case LayerKind::DwConv:
            return static_cast<size_t>(channels) * kernel * kernel + channels;
        case LayerKind::Bn:
            return static_cast<size_t>(channels) * 4;  // gamma, beta, mean, var
        case LayerKind::Se: {
            const size_t h = se_hidden(channels, reduction);
            return h * channels + h + static_cast<size_t>(channels) * h + channels;
        }
        default:
            return 0;
    }
}

namespace {

LayerKind kind_from_string(const std::string& s) {
    if (s == "conv") return LayerKind::Conv;
    if (s == "dwconv") return LayerKind::DwConv;
    if (s == "bn") return LayerKind::Bn;
    if (s == "act") return LayerKind::Act;
    if (s == "se") return LayerKind::Se;
    if (s == "global_avg_pool") return LayerKind::GlobalAvgPool;
    if (s == "upsample2x_bilinear") return LayerKind::Upsample2xBilinear;
    if (s == "add") return LayerKind::Add;
    if (s == "concat") return LayerKind::Concat;
    if (s == "sigmoid_head") return LayerKind::SigmoidHead;
    raise(ErrorCode::GraphError, "unknown layer kind: " + s);
}

ActKind act_from_string(const std::string& s) {
    if (s == "relu") return ActKind::Relu;
    if (s == "relu6") return ActKind::Relu6;
    if (s == "hswish") return ActKind::HSwish;
    if (s == "hsigmoid") return ActKind::HSigmoid;
    raise(ErrorCode::GraphError, "unknown activation: " + s);
}

/// Shape propagation + structural validation. Fills net.shape.
void validate_graph(Network& net) {
    const int n_layers = static_cast<int>(net.layers.size());
    if (n_layers == 0) raise(ErrorCode::GraphError, "empty network");

    net.shape.assign(n_layers + 1, {});
    net.shape[0] = {net.in_channels, net.in_height, net.in_width};

    for (int i = 0; i < n_layers; ++i) {
        LayerSpec& L = net.layers[i];
        const int node = i + 1;
        if (L.inputs.empty()) raise(ErrorCode::GraphError, "layer without inputs");
        for (int in : L.inputs)
            if (in < 0 || in >= node)
                raise(ErrorCode::GraphError, "layer input breaks topological order (cycle?)");

        const NodeShape& a = net.shape[L.inputs[0]];
        NodeShape out = a;
        switch (L.kind) {
            case LayerKind::Conv: {
                if (L.in_ch != a.channels)
                    raise(ErrorCode::GraphError, "conv in_ch mismatch");
                if (L.groups <= 0 || L.in_ch % L.groups || L.out_ch % L.groups)
                    raise(ErrorCode::GraphError, "conv group bookkeeping");
                if (L.kernel <= 0 || L.stride <= 0 || L.pad < 0)
                    raise(ErrorCode::GraphError, "conv geometry");
                out.channels = L.out_ch;
                out.height = (a.height + 2 * L.pad - L.kernel) / L.stride + 1;
                out.width = (a.width + 2 * L.pad - L.kernel) / L.stride + 1;
                if (out.height <= 0 || out.width <= 0)
                    raise(ErrorCode::GraphError, "conv output collapses");
                break;
            }
            case LayerKind::DwConv: {
                if (L.channels != a.channels)
                    raise(ErrorCode::GraphError, "dwconv channel mismatch");
                out.height = (a.height + 2 * L.pad - L.kernel) / L.stride + 1;
                out.width = (a.width + 2 * L.pad - L.kernel) / L.stride + 1;
                break;
            }
            case LayerKind::Bn:
            case LayerKind::Se:
                if (L.channels != a.channels)
                    raise(ErrorCode::GraphError, "channel count mismatch at bn/se");
                break;
            case LayerKind::Act:
            case LayerKind::SigmoidHead:
            case LayerKind::Identity:
                break;
            case LayerKind::GlobalAvgPool:
                out.height = 1;
                out.width = 1;
                break;
            case LayerKind::Upsample2xBilinear:
                out.height = a.height * 2;
                out.width = a.width * 2;
                break;
            case LayerKind::Add: {
                if (L.inputs.size() < 2) raise(ErrorCode::GraphError, "add needs two inputs");
                for (int in : L.inputs) {
                    const NodeShape& s = net.shape[in];
                    if (s.channels != a.channels || s.height != a.height || s.width != a.width)
                        raise(ErrorCode::GraphError, "add operand shape mismatch");
                }
                break;
            }
            case LayerKind::Concat: {
                if (L.inputs.size() < 2) raise(ErrorCode::GraphError, "concat needs two inputs");
                int ch = 0;
                for (int in : L.inputs) {
                    const NodeShape& s = net.shape[in];
                    if (s.height != a.height || s.width != a.width)
                        raise(ErrorCode::GraphError, "concat spatial mismatch");
                    ch += s.channels;
                }
                out.channels = ch;
                break;
            }
        }
        net.shape[node] = out;
    }

    const NodeShape& last = net.shape[n_layers];
    if (net.layers.back().kind != LayerKind::SigmoidHead)
        raise(ErrorCode::GraphError, "network must end in sigmoid_head");
    if (last.channels != 1)
        raise(ErrorCode::GraphError, "output must have 1 channel");
    if (last.height != net.in_height || last.width != net.in_width)
        raise(ErrorCode::GraphError, "output resolution must match input");
}

void fold_batchnorm(Network& net) {
    // in-degree-1 bn directly after a conv/dwconv folds into its weights
    std::vector<int> consumers(net.layers.size() + 1, 0);
    for (const auto& L : net.layers)
        for (int in : L.inputs) consumers[in]++;

    for (size_t i = 0; i < net.layers.size(); ++i) {
        LayerSpec& bn = net.layers[i];
        if (bn.kind != LayerKind::Bn || bn.inputs.size() != 1) continue;
        const int src_node = bn.inputs[0];
        if (src_node == 0 || consumers[src_node] != 1) continue;
        LayerSpec& prev = net.layers[src_node - 1];
        if (prev.kind != LayerKind::Conv && prev.kind != LayerKind::DwConv) continue;

        const int ch = bn.channels;
        const float* gamma = net.weights.data() + net.weight_offset[i];
        const float* beta = gamma + ch;
        const float* mean = beta + ch;
        const float* var = mean + ch;

        float* w = net.weights.data() + net.weight_offset[src_node - 1];
        const size_t per_filter = (prev.kind == LayerKind::Conv)
                                      ? static_cast<size_t>(prev.in_ch / prev.groups) * prev.kernel * prev.kernel
                                      : static_cast<size_t>(prev.kernel) * prev.kernel;
        const int out_ch = (prev.kind == LayerKind::Conv) ? prev.out_ch : prev.channels;
        float* bias = w + per_filter * out_ch;

        for (int oc = 0; oc < ch; ++oc) {
            const float scale = static_cast<float>(gamma[oc] / std::sqrt(var[oc] + kBnEps));
            for (size_t j = 0; j < per_filter; ++j) w[oc * per_filter + j] *= scale;
            bias[oc] = (bias[oc] - mean[oc]) * scale + beta[oc];
        }
        bn.kind = LayerKind::Identity;
    }
    net.bn_folded = true;
}

} // namespace

Network parse_network_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::GraphError, std::string("bad network spec JSON: ") + e.what());
    }

    Network net;
    const auto& in = j.at("input");
    net.in_channels = in.value("channels", 1);
    net.in_height = in.at("height").get<int>();
    net.in_width = in.at("width").get<int>();

    for (const auto& lj : j.at("layers")) {
        LayerSpec L;
        L.kind = kind_from_string(lj.at("kind").get<std::string>());
        L.inputs = lj.at("inputs").get<std::vector<int>>();
        switch (L.kind) {
            case LayerKind::Conv:
                L.in_ch = lj.at("in_ch").get<int>();
                L.out_ch = lj.at("out_ch").get<int>();
                L.kernel = lj.at("k").get<int>();
                L.stride = lj.value("s", 1);
                L.pad = lj.value("p", 0);
                L.groups = lj.value("g", 1);
                break;
            case LayerKind::DwConv:
                L.channels = lj.at("channels").get<int>();
                L.kernel = lj.at("k").get<int>();
                L.stride = lj.value("s", 1);
                L.pad = lj.value("p", 0);
                break;
            case LayerKind::Bn:
                L.channels = lj.at("channels").get<int>();
                break;
            case LayerKind::Se:
                L.channels = lj.at("channels").get<int>();
                L.reduction = lj.value("r", 4);
                break;
            case LayerKind::Act:
                L.act = act_from_string(lj.at("fn").get<std::string>());
                break;
            default:
                break;
        }
        net.layers.push_back(std::move(L));
    }

    net.weight_offset.resize(net.layers.size());
    size_t off = 0;
    for (size_t i = 0; i < net.layers.size(); ++i) {
        net.weight_offset[i] = off;
        off += net.layers[i].weight_count();
    }
    validate_graph(net);
    return net;
}

Network assemble_network(Network graph, std::vector<float> weights, const LoadOptions& opts) {
    size_t demand = 0;
    for (const auto& L : graph.layers) demand += L.weight_count();
    if (weights.size() != demand) {
        std::ostringstream msg;
        msg << "weight count mismatch: spec demands " << demand << " floats, blob has "
            << weights.size();
        raise(ErrorCode::WeightCountMismatch, msg.str());
    }
    graph.weights = std::move(weights);
    if (opts.fold_bn) fold_batchnorm(graph);
    return graph;
}

Network load_network(const std::filesystem::path& spec_path,
                     const std::filesystem::path& weights_path, const LoadOptions& opts) {
    std::ifstream in(spec_path);
    if (!in) raise(ErrorCode::IoError, "cannot open network spec " + spec_path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    Network net = parse_network_spec(buf.str());
    return assemble_network(std::move(net), read_weights_blob(weights_path), opts);
}

void write_weights_blob(const std::filesystem::path& path, std::span<const float> weights,
                        bool with_header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
    if (with_header) {
        char header[16] = {'N', 'N', 'X', '1'};
        const uint64_t n = weights.size();
        std::memcpy(header + 4, &n, 8);
        out.write(header, 16);
    }
    out.write(reinterpret_cast<const char*>(weights.data()),
              static_cast<std::streamsize>(weights.size() * sizeof(float)));
}

std::vector<float> read_weights_blob(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) raise(ErrorCode::IoError, "cannot open weights " + path.string());
    size_t bytes = static_cast<size_t>(in.tellg());
    in.seekg(0);

    char header[16];
    if (bytes >= 16) {
        in.read(header, 16);
        if (std::memcmp(header, "NNX1", 4) == 0) {
            uint64_t n;
            std::memcpy(&n, header + 4, 8);
            if (bytes != 16 + n * sizeof(float))
                raise(ErrorCode::WeightCountMismatch,
                      "weights blob size disagrees with NNX1 header count");
            std::vector<float> w(n);
            in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(n * 4));
            if (!in) raise(ErrorCode::IoError, "truncated weights blob");
            return w;
        }
        in.seekg(0);
    }
    if (bytes % sizeof(float))
        raise(ErrorCode::IoError, "weights blob size is not a multiple of 4");
    std::vector<float> w(bytes / sizeof(float));
    in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(bytes));
    if (!in) raise(ErrorCode::IoError, "truncated weights blob");
    return w;
}

// ---- primitives ----

namespace {

// Pixel-chunked accumulation: one pass over the input and output planes per
// layer instead of one per channel pair, which keeps the big decoder layers
// from being memory-bound.
void conv1x1_s1(const Tensor& in, const float* w, const float* bias, Tensor& out) {
    const size_t hw = static_cast<size_t>(in.height) * in.width;
    constexpr size_t kChunk = 1024;
    const int oc_n = out.channels, ic_n = in.channels;

    std::vector<float> acc(static_cast<size_t>(oc_n) * kChunk);
    for (size_t base = 0; base < hw; base += kChunk) {
        const size_t n = std::min(kChunk, hw - base);
        for (int oc = 0; oc < oc_n; ++oc) std::fill_n(&acc[oc * kChunk], n, bias[oc]);
        for (int ic = 0; ic < ic_n; ++ic) {
            const float* ip = in.plane(ic) + base;
            for (int oc = 0; oc < oc_n; ++oc) {
                const float wv = w[static_cast<size_t>(oc) * ic_n + ic];
                if (wv == 0.0f) continue;
                float* ap = &acc[oc * kChunk];
                for (size_t i = 0; i < n; ++i) ap[i] += wv * ip[i];
            }
        }
        for (int oc = 0; oc < oc_n; ++oc)
            std::copy_n(&acc[oc * kChunk], n, out.plane(oc) + base);
    }
}

// 3x3 stride-1 same-padding depthwise: separate edge handling so the interior
// loop vectorizes.
void conv_depthwise_3x3_s1(const Tensor& in, const float* w, const float* bias, Tensor& out) {
    const int H = in.height, W = in.width;
    for (int c = 0; c < in.channels; ++c) {
        const float* ip = in.plane(c);
        const float* wp = w + static_cast<size_t>(c) * 9;
        float* op = out.plane(c);
        const float b = bias[c];
        const float w00 = wp[0], w01 = wp[1], w02 = wp[2];
        const float w10 = wp[3], w11 = wp[4], w12 = wp[5];
        const float w20 = wp[6], w21 = wp[7], w22 = wp[8];

        auto edge = [&](int oy, int ox) {
            float acc = b;
            for (int ky = 0; ky < 3; ++ky) {
                const int y = oy + ky - 1;
                if (y < 0 || y >= H) continue;
                const float* row = ip + static_cast<size_t>(y) * W;
                for (int kx = 0; kx < 3; ++kx) {
                    const int x = ox + kx - 1;
                    if (x < 0 || x >= W) continue;
                    acc += wp[ky * 3 + kx] * row[x];
                }
            }
            return acc;
        };

        for (int oy = 0; oy < H; ++oy) {
            float* orow = op + static_cast<size_t>(oy) * W;
            if (oy == 0 || oy == H - 1 || W < 4) {
                for (int ox = 0; ox < W; ++ox) orow[ox] = edge(oy, ox);
                continue;
            }
            const float* rm = ip + static_cast<size_t>(oy - 1) * W;
            const float* r0 = ip + static_cast<size_t>(oy) * W;
            const float* rp = ip + static_cast<size_t>(oy + 1) * W;
            orow[0] = edge(oy, 0);
            for (int ox = 1; ox < W - 1; ++ox) {
                orow[ox] = b + w00 * rm[ox - 1] + w01 * rm[ox] + w02 * rm[ox + 1] +
                           w10 * r0[ox - 1] + w11 * r0[ox] + w12 * r0[ox + 1] +
                           w20 * rp[ox - 1] + w21 * rp[ox] + w22 * rp[ox + 1];
            }
            orow[W - 1] = edge(oy, W - 1);
        }
    }
}

void conv_depthwise(const Tensor& in, const float* w, const float* bias, const ConvParams& p,
                    Tensor& out) {
    const int k = p.kernel, s = p.stride, pad = p.pad;
    if (k == 3 && s == 1 && pad == 1) {
        conv_depthwise_3x3_s1(in, w, bias, out);
        return;
    }
    for (int c = 0; c < in.channels; ++c) {
        const float* ip = in.plane(c);
        const float* wp = w + static_cast<size_t>(c) * k * k;
        float* op = out.plane(c);
        const float b = bias[c];
        for (int oy = 0; oy < out.height; ++oy) {
            const int iy = oy * s - pad;
            const int ky_lo = std::max(0, -iy), ky_hi = std::min(k, in.height - iy);
            float* orow = op + static_cast<size_t>(oy) * out.width;
            for (int ox = 0; ox < out.width; ++ox) {
                const int ix = ox * s - pad;
                const int kx_lo = std::max(0, -ix), kx_hi = std::min(k, in.width - ix);
                float acc = b;
                for (int ky = ky_lo; ky < ky_hi; ++ky) {
                    const float* irow = ip + static_cast<size_t>(iy + ky) * in.width + ix;
                    const float* wrow = wp + ky * k;
                    for (int kx = kx_lo; kx < kx_hi; ++kx) acc += wrow[kx] * irow[kx];
                }
                orow[ox] = acc;
            }
        }
    }
}

void conv_direct(const Tensor& in, const float* w, const float* bias, const ConvParams& p,
                 Tensor& out) {
    const int k = p.kernel, s = p.stride, pad = p.pad;
    const int icg = p.in_ch / p.groups, ocg = p.out_ch / p.groups;
    const size_t filter_sz = static_cast<size_t>(icg) * k * k;

    for (int g = 0; g < p.groups; ++g) {
        for (int ocl = 0; ocl < ocg; ++ocl) {
            const int oc = g * ocg + ocl;
            const float* wf = w + static_cast<size_t>(oc) * filter_sz;
            float* op = out.plane(oc);
            const float b = bias[oc];
            for (int oy = 0; oy < out.height; ++oy) {
                const int iy = oy * s - pad;
                const int ky_lo = std::max(0, -iy), ky_hi = std::min(k, in.height - iy);
                float* orow = op + static_cast<size_t>(oy) * out.width;
                for (int ox = 0; ox < out.width; ++ox) {
                    const int ix = ox * s - pad;
                    const int kx_lo = std::max(0, -ix), kx_hi = std::min(k, in.width - ix);
                    float acc = b;
                    for (int icl = 0; icl < icg; ++icl) {
                        const float* ip = in.plane(g * icg + icl);
                        const float* wc = wf + static_cast<size_t>(icl) * k * k;
                        for (int ky = ky_lo; ky < ky_hi; ++ky) {
                            const float* irow = ip + static_cast<size_t>(iy + ky) * in.width + ix;
                            const float* wrow = wc + ky * k;
                            for (int kx = kx_lo; kx < kx_hi; ++kx) acc += wrow[kx] * irow[kx];
                        }
                    }
                    orow[ox] = acc;
                }
            }
        }
    }
}

} // namespace

Tensor conv2d(const Tensor& input, std::span<const float> weights, std::span<const float> bias,
              const ConvParams& p) {
    if (input.channels != p.in_ch)
        raise(ErrorCode::DimensionMismatch, "conv2d: input channel mismatch");
    if (p.in_ch % p.groups || p.out_ch % p.groups)
        raise(ErrorCode::DimensionMismatch, "conv2d: channels not divisible by groups");
    const size_t need_w = static_cast<size_t>(p.out_ch) * (p.in_ch / p.groups) * p.kernel * p.kernel;
    if (weights.size() != need_w || bias.size() != static_cast<size_t>(p.out_ch))
        raise(ErrorCode::DimensionMismatch, "conv2d: weight/bias size mismatch");

    const int out_h = (input.height + 2 * p.pad - p.kernel) / p.stride + 1;
    const int out_w = (input.width + 2 * p.pad - p.kernel) / p.stride + 1;
    if (out_h <= 0 || out_w <= 0) raise(ErrorCode::DimensionMismatch, "conv2d: empty output");
    Tensor out(p.out_ch, out_h, out_w);

    if (p.kernel == 1 && p.stride == 1 && p.pad == 0 && p.groups == 1)
        conv1x1_s1(input, weights.data(), bias.data(), out);
    else if (p.groups == p.in_ch && p.groups == p.out_ch)
        conv_depthwise(input, weights.data(), bias.data(), p, out);
    else
        conv_direct(input, weights.data(), bias.data(), p, out);
    return out;
}

float apply_act(float x, ActKind kind) {
    switch (kind) {
        case ActKind::Relu: return x > 0.0f ? x : 0.0f;
        case ActKind::Relu6: return std::min(std::max(x, 0.0f), 6.0f);
        case ActKind::HSwish: return x * std::min(std::max(x + 3.0f, 0.0f), 6.0f) / 6.0f;
        case ActKind::HSigmoid: return std::min(std::max(x + 3.0f, 0.0f), 6.0f) / 6.0f;
    }
    return x;
}

Tensor activation(const Tensor& x, ActKind kind) {
    Tensor out = x;
    for (float& v : out.data) v = apply_act(v, kind);
    return out;
}

Tensor global_avg_pool(const Tensor& x) {
    Tensor out(x.channels, 1, 1);
    const size_t hw = static_cast<size_t>(x.height) * x.width;
    for (int c = 0; c < x.channels; ++c) {
        const float* p = x.plane(c);
        double acc = 0.0;
        for (size_t i = 0; i < hw; ++i) acc += p[i];
        out.data[c] = static_cast<float>(acc / static_cast<double>(hw));
    }
    return out;
}

Tensor se_block(const Tensor& x, int reduction, std::span<const float> weights) {
    const int C = x.channels;
    const int H = se_hidden(C, reduction);
    const size_t need = static_cast<size_t>(H) * C + H + static_cast<size_t>(C) * H + C;
    if (weights.size() != need)
        raise(ErrorCode::DimensionMismatch, "se_block: weight size mismatch");

    const float* w1 = weights.data();
    const float* b1 = w1 + static_cast<size_t>(H) * C;
    const float* w2 = b1 + H;
    const float* b2 = w2 + static_cast<size_t>(C) * H;

    Tensor pooled = global_avg_pool(x);

    std::vector<float> hidden(H);
    for (int j = 0; j < H; ++j) {
        float acc = b1[j];
        for (int c = 0; c < C; ++c) acc += w1[static_cast<size_t>(j) * C + c] * pooled.data[c];
        hidden[j] = apply_act(acc, ActKind::Relu);
    }
    Tensor out = x;
    const size_t hw = static_cast<size_t>(x.height) * x.width;
    for (int c = 0; c < C; ++c) {
        float acc = b2[c];
        for (int j = 0; j < H; ++j) acc += w2[static_cast<size_t>(c) * H + j] * hidden[j];
        const float gate = apply_act(acc, ActKind::HSigmoid);
        float* p = out.plane(c);
        for (size_t i = 0; i < hw; ++i) p[i] *= gate;
    }
    return out;
}

namespace {

struct AxisMap {
    std::vector<int> i0, i1;
    std::vector<float> frac;
};

AxisMap corner_aligned_map(int in_n, int out_n) {
    AxisMap m;
    m.i0.resize(out_n);
    m.i1.resize(out_n);
    m.frac.resize(out_n);
    for (int i = 0; i < out_n; ++i) {
        const double s = (out_n <= 1 || in_n <= 1)
                             ? 0.0
                             : static_cast<double>(i) * (in_n - 1) / (out_n - 1);
        m.i0[i] = static_cast<int>(s);
        m.i1[i] = std::min(m.i0[i] + 1, in_n - 1);
        m.frac[i] = static_cast<float>(s - m.i0[i]);
    }
    return m;
}

} // namespace

Tensor upsample2x_bilinear(const Tensor& x) {
    const int oh = x.height * 2, ow = x.width * 2;
    Tensor out(x.channels, oh, ow);
    const AxisMap ym = corner_aligned_map(x.height, oh);
    const AxisMap xm = corner_aligned_map(x.width, ow);

    // interpolate rows first, then blend the two row interpolations
    std::vector<float> row0(ow), row1(ow);
    for (int c = 0; c < x.channels; ++c) {
        const float* ip = x.plane(c);
        float* op = out.plane(c);
        int cached_y0 = -1, cached_y1 = -1;
        for (int r = 0; r < oh; ++r) {
            const int y0 = ym.i0[r], y1 = ym.i1[r];
            const float fy = ym.frac[r];
            if (y0 != cached_y0 || y1 != cached_y1) {
                const float* r0 = ip + static_cast<size_t>(y0) * x.width;
                const float* r1 = ip + static_cast<size_t>(y1) * x.width;
                for (int cc = 0; cc < ow; ++cc) {
                    const int x0 = xm.i0[cc], x1 = xm.i1[cc];
                    const float fx = xm.frac[cc];
                    row0[cc] = r0[x0] + (r0[x1] - r0[x0]) * fx;
                    row1[cc] = r1[x0] + (r1[x1] - r1[x0]) * fx;
                }
                cached_y0 = y0;
                cached_y1 = y1;
            }
            float* orow = op + static_cast<size_t>(r) * ow;
            if (fy == 0.0f) {
                std::copy(row0.begin(), row0.end(), orow);
            } else {
                for (int cc = 0; cc < ow; ++cc) orow[cc] = row0[cc] + (row1[cc] - row0[cc]) * fy;
            }
        }
    }
    return out;
}

Tensor forward_tensor(const Network& net, const Tensor& input) {
    if (input.channels != net.in_channels || input.height != net.in_height ||
        input.width != net.in_width)
        raise(ErrorCode::DimensionMismatch, "forward: input shape mismatch");

    const int n_layers = static_cast<int>(net.layers.size());
    // last consumer per node, to release activations early
    std::vector<int> last_use(n_layers + 1, n_layers);
    for (int i = 0; i < n_layers; ++i)
        for (int in : net.layers[i].inputs) last_use[in] = std::max(last_use[in], i);

    std::vector<Tensor> node(n_layers + 1);
    node[0] = input;

    for (int i = 0; i < n_layers; ++i) {
        const LayerSpec& L = net.layers[i];
        const Tensor& a = node[L.inputs[0]];
        const float* w = net.weights.data() + net.weight_offset[i];
        Tensor out;
        switch (L.kind) {
            case LayerKind::Conv: {
                ConvParams p{L.in_ch, L.out_ch, L.kernel, L.stride, L.pad, L.groups};
                const size_t wsz = static_cast<size_t>(L.out_ch) * (L.in_ch / L.groups) *
                                   L.kernel * L.kernel;
                out = conv2d(a, {w, wsz}, {w + wsz, static_cast<size_t>(L.out_ch)}, p);
                break;
            }
            case LayerKind::DwConv: {
                ConvParams p{L.channels, L.channels, L.kernel, L.stride, L.pad, L.channels};
                const size_t wsz = static_cast<size_t>(L.channels) * L.kernel * L.kernel;
                out = conv2d(a, {w, wsz}, {w + wsz, static_cast<size_t>(L.channels)}, p);
                break;
            }
            case LayerKind::Bn: {
                const float* gamma = w;
                const float* beta = w + L.channels;
                const float* mean = beta + L.channels;
                const float* var = mean + L.channels;
                out = a;
                const size_t hw = static_cast<size_t>(a.height) * a.width;
                for (int c = 0; c < L.channels; ++c) {
                    const float scale = static_cast<float>(gamma[c] / std::sqrt(var[c] + kBnEps));
                    const float shift = beta[c] - mean[c] * scale;
                    float* p = out.plane(c);
                    for (size_t j = 0; j < hw; ++j) p[j] = p[j] * scale + shift;
                }
                break;
            }
            case LayerKind::Act:
                out = activation(a, L.act);
                break;
            case LayerKind::Se:
                out = se_block(a, L.reduction, {w, L.weight_count()});
                break;
            case LayerKind::GlobalAvgPool:
                out = global_avg_pool(a);
                break;
            case LayerKind::Upsample2xBilinear:
                out = upsample2x_bilinear(a);
                break;
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
                for (float& v : out.data) v = 1.0f / (1.0f + std::exp(-v));
                break;
            }
            case LayerKind::Identity:
                out = a;
                break;
        }
        node[i + 1] = std::move(out);

        for (int in : L.inputs)
            if (last_use[in] == i && in != 0) node[in] = Tensor();
    }
    return std::move(node[n_layers]);
}

ProbabilityMap forward(const Network& net, const Image& input) {
    Tensor t(1, input.height, input.width);
    std::copy(input.data.begin(), input.data.end(), t.data.begin());
    Tensor out = forward_tensor(net, t);
    ProbabilityMap pmap(out.height, out.width);
    std::copy(out.data.begin(), out.data.end(), pmap.data.begin());
    return pmap;
}

} // namespace choroid::nn
