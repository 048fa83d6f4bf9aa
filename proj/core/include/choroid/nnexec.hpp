#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "choroid/image.hpp"
#include "choroid/tensor.hpp"

namespace choroid::nn {

enum class LayerKind {
    Conv,
    DwConv,
    Bn,
    Act,
    Se,
    GlobalAvgPool,
    Upsample2xBilinear,
    Add,
    Concat,
    SigmoidHead,
    Identity,  // internal: bn layers absorbed by folding
};

enum class ActKind { Relu, Relu6, HSwish, HSigmoid };

/// One node of the layer graph. Node 0 is the network input; layer i in
/// listing order produces node i+1. `inputs` holds prior node ids.
struct LayerSpec {
    LayerKind kind;
    std::vector<int> inputs;
    // conv / dwconv
    int in_ch = 0, out_ch = 0, kernel = 0, stride = 1, pad = 0, groups = 1;
    // bn / se
    int channels = 0;
    int reduction = 0;
    // act
    ActKind act = ActKind::Relu;

    size_t weight_count() const;
};

struct NodeShape {
    int channels = 0, height = 0, width = 0;
};

/// A validated, immutable network: layer list plus the flat float32 weight
/// array consumed in listing order. Shareable across concurrent forward calls.
struct Network {
    int in_channels = 1, in_height = 0, in_width = 0;
    std::vector<LayerSpec> layers;
    std::vector<float> weights;
    std::vector<size_t> weight_offset;  // per layer, into weights
    std::vector<NodeShape> shape;       // per node (layers.size()+1)
    bool bn_folded = false;

    const NodeShape& output_shape() const { return shape.back(); }
};

struct LoadOptions {
    bool fold_bn = true;
};

/// Parses the JSON layer-graph spec (see docs/network-format.md) without weights.
Network parse_network_spec(const std::string& json_text);

/// Loads spec + weights blob. The blob is raw little-endian float32, optionally
/// prefixed by a 16-byte header: magic "NNX1", uint64 weight count, 4 zero bytes.
/// Validates weight count, graph acyclicity/ordering, channel bookkeeping, and
/// that the single output node is a 1-channel sigmoid_head at input resolution.
Network load_network(const std::filesystem::path& spec_path,
                     const std::filesystem::path& weights_path,
                     const LoadOptions& opts = {});

/// Assembles a network from an in-memory spec + weights (fixture/test entry).
Network assemble_network(Network graph, std::vector<float> weights, const LoadOptions& opts = {});

void write_weights_blob(const std::filesystem::path& path, std::span<const float> weights,
                        bool with_header = true);
std::vector<float> read_weights_blob(const std::filesystem::path& path);

// --- layer primitives (used by forward; exposed for composition tests) ---

struct ConvParams {
    int in_ch, out_ch, kernel, stride, pad, groups;
};

/// Standard cross-correlation with zero padding;
/// H' = floor((H + 2p - k)/s) + 1. Weight layout [out][in/g][k][k], then bias[out].
Tensor conv2d(const Tensor& input, std::span<const float> weights, std::span<const float> bias,
              const ConvParams& p);

float apply_act(float x, ActKind kind);
Tensor activation(const Tensor& x, ActKind kind);

/// Squeeze-excite: global average pool -> 1x1 conv to C/r -> relu -> 1x1 conv
/// to C -> hsigmoid -> channelwise multiply. Weights: w1[C/r][C], b1, w2[C][C/r], b2.
Tensor se_block(const Tensor& x, int reduction, std::span<const float> weights);

Tensor global_avg_pool(const Tensor& x);
Tensor upsample2x_bilinear(const Tensor& x);

/// Executes the DAG on a standardized model-resolution input grid and returns
/// the sigmoid-head output as a probability map.
ProbabilityMap forward(const Network& net, const Image& input);

/// Forward pass over an arbitrary input tensor, returning the output tensor.
Tensor forward_tensor(const Network& net, const Tensor& input);

} // namespace choroid::nn
