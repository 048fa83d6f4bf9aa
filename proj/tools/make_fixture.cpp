// Regenerates the reference small-UNet fixture (fixtures/small_unet.json +
// .nnx). The fixture is a compact MobileNetV3-flavoured encoder-decoder with
// deterministic random weights; it exists so the executor, pipeline and
// throughput tests have a realistic network to run. It is NOT a trained model.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "json.hpp"

#include "choroid/nnexec.hpp"
#include "choroid/rng.hpp"

using nlohmann::ordered_json;

namespace {

struct GraphBuilder {
    ordered_json layers = ordered_json::array();
    int next_node = 1;

    int conv(int input, int in_ch, int out_ch, int k, int s, int p) {
        layers.push_back({{"kind", "conv"}, {"inputs", {input}}, {"in_ch", in_ch},
                          {"out_ch", out_ch}, {"k", k}, {"s", s}, {"p", p}, {"g", 1}});
        return next_node++;
    }
    int dwconv(int input, int ch, int k, int s, int p) {
        layers.push_back({{"kind", "dwconv"}, {"inputs", {input}}, {"channels", ch},
                          {"k", k}, {"s", s}, {"p", p}});
        return next_node++;
    }
    int bn(int input, int ch) {
        layers.push_back({{"kind", "bn"}, {"inputs", {input}}, {"channels", ch}});
        return next_node++;
    }
    int act(int input, const char* fn) {
        layers.push_back({{"kind", "act"}, {"inputs", {input}}, {"fn", fn}});
        return next_node++;
    }
    int se(int input, int ch, int r) {
        layers.push_back({{"kind", "se"}, {"inputs", {input}}, {"channels", ch}, {"r", r}});
        return next_node++;
    }
    int up(int input) {
        layers.push_back({{"kind", "upsample2x_bilinear"}, {"inputs", {input}}});
        return next_node++;
    }
    int add(int a, int b) {
        layers.push_back({{"kind", "add"}, {"inputs", {a, b}}});
        return next_node++;
    }
    int concat(int a, int b) {
        layers.push_back({{"kind", "concat"}, {"inputs", {a, b}}});
        return next_node++;
    }
    int head(int input) {
        layers.push_back({{"kind", "sigmoid_head"}, {"inputs", {input}}});
        return next_node++;
    }

    // conv-bn-act unit
    int cba(int input, int in_ch, int out_ch, int k, int s, int p, const char* fn) {
        return act(bn(conv(input, in_ch, out_ch, k, s, p), out_ch), fn);
    }
    int dba(int input, int ch, int k, int s, int p, const char* fn) {
        return act(bn(dwconv(input, ch, k, s, p), ch), fn);
    }
};

ordered_json build_small_unet() {
    GraphBuilder g;

    // encoder
    const int e0 = g.cba(0, 1, 16, 3, 2, 1, "hswish");    // 272x384
    const int e1 = g.cba(g.dba(e0, 16, 3, 2, 1, "relu6"), 16, 24, 1, 1, 0, "hswish");  // 136x192
    const int e2 = g.se(g.cba(g.dba(e1, 24, 3, 2, 1, "relu6"), 24, 40, 1, 1, 0, "hswish"), 40, 4);  // 68x96

    // bottleneck with residual
    const int b0 = g.cba(g.dba(e2, 40, 3, 2, 1, "relu6"), 40, 80, 1, 1, 0, "hswish");  // 34x48
    const int b1 = g.se(g.dba(b0, 80, 3, 1, 1, "hswish"), 80, 4);
    const int b2 = g.add(g.conv(b1, 80, 80, 1, 1, 0), b0);

    // decoder with skip concats
    const int d2 = g.dba(g.cba(g.concat(g.up(b2), e2), 120, 40, 1, 1, 0, "hswish"),
                         40, 3, 1, 1, "hswish");  // 68x96
    const int d1 = g.dba(g.cba(g.concat(g.up(d2), e1), 64, 24, 1, 1, 0, "hswish"),
                         24, 3, 1, 1, "hswish");  // 136x192
    const int d0 = g.dba(g.cba(g.concat(g.up(d1), e0), 40, 16, 1, 1, 0, "hswish"),
                         16, 3, 1, 1, "hswish");  // 272x384
    const int full = g.dba(g.cba(g.up(d0), 16, 8, 1, 1, 0, "hswish"), 8, 3, 1, 1, "hswish");
    g.head(g.conv(full, 8, 1, 1, 1, 0));

    ordered_json spec;
    spec["input"] = {{"channels", 1}, {"height", 544}, {"width", 768}};
    spec["layers"] = g.layers;
    return spec;
}

std::vector<float> make_weights(const choroid::nn::Network& net, uint64_t seed) {
    using choroid::nn::LayerKind;
    choroid::Rng rng(seed);
    std::vector<float> w;

    for (const auto& L : net.layers) {
        switch (L.kind) {
            case LayerKind::Conv: {
                const int fan_in = (L.in_ch / L.groups) * L.kernel * L.kernel;
                const double sd = std::sqrt(2.0 / fan_in);
                const size_t nw = static_cast<size_t>(L.out_ch) * (L.in_ch / L.groups) *
                                  L.kernel * L.kernel;
                for (size_t i = 0; i < nw; ++i) w.push_back(static_cast<float>(rng.normal(0, sd)));
                for (int i = 0; i < L.out_ch; ++i) w.push_back(static_cast<float>(rng.normal(0, 0.02)));
                break;
            }
            case LayerKind::DwConv: {
                const double sd = std::sqrt(2.0 / (L.kernel * L.kernel));
                const size_t nw = static_cast<size_t>(L.channels) * L.kernel * L.kernel;
                for (size_t i = 0; i < nw; ++i) w.push_back(static_cast<float>(rng.normal(0, sd)));
                for (int i = 0; i < L.channels; ++i) w.push_back(static_cast<float>(rng.normal(0, 0.02)));
                break;
            }
            case LayerKind::Bn: {
                for (int i = 0; i < L.channels; ++i) w.push_back(static_cast<float>(rng.uniform(0.9, 1.1)));
                for (int i = 0; i < L.channels; ++i) w.push_back(static_cast<float>(rng.normal(0, 0.05)));
                for (int i = 0; i < L.channels; ++i) w.push_back(static_cast<float>(rng.normal(0, 0.05)));
                for (int i = 0; i < L.channels; ++i) w.push_back(static_cast<float>(rng.uniform(0.8, 1.2)));
                break;
            }
            case LayerKind::Se: {
                const int H = std::max(1, L.channels / L.reduction);
                const double sd1 = std::sqrt(2.0 / L.channels), sd2 = std::sqrt(2.0 / H);
                for (int i = 0; i < H * L.channels; ++i)
                    w.push_back(static_cast<float>(rng.normal(0, sd1)));
                for (int i = 0; i < H; ++i) w.push_back(0.0f);
                for (int i = 0; i < L.channels * H; ++i)
                    w.push_back(static_cast<float>(rng.normal(0, sd2)));
                for (int i = 0; i < L.channels; ++i)
                    w.push_back(static_cast<float>(rng.uniform(0.5, 1.5)));
                break;
            }
            default:
                break;
        }
    }
    return w;
}

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path out_dir = argc > 1 ? argv[1] : "fixtures";
    std::filesystem::create_directories(out_dir);

    const ordered_json spec = build_small_unet();
    const std::string spec_text = spec.dump(1);

    choroid::nn::Network graph = choroid::nn::parse_network_spec(spec_text);
    const std::vector<float> weights = make_weights(graph, 0xC0FFEEULL);

    // round-trip sanity before writing
    choroid::nn::assemble_network(graph, weights);

    std::ofstream spec_out(out_dir / "small_unet.json");
    spec_out << spec_text << "\n";
    choroid::nn::write_weights_blob(out_dir / "small_unet.nnx", weights);

    std::cout << "wrote " << (out_dir / "small_unet.json").string() << " ("
              << graph.layers.size() << " layers) and small_unet.nnx (" << weights.size()
              << " floats)\n";
    return 0;
}
