#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "endo/core/error.hpp"

namespace endo {

/// Generator backbone variants under ablation.
enum class Variant { ShallowUnet, Unet, DeepUnet, ResidualUnet };

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::ShallowUnet: return "shallow_unet";
        case Variant::Unet: return "unet";
        case Variant::DeepUnet: return "deep_unet";
        case Variant::ResidualUnet: return "residual_unet";
    }
    throw ParamError("bad variant");
}

inline Variant parse_variant(const std::string& s) {
    if (s == "shallow_unet") return Variant::ShallowUnet;
    if (s == "unet") return Variant::Unet;
    if (s == "deep_unet") return Variant::DeepUnet;
    if (s == "residual_unet") return Variant::ResidualUnet;
    throw ParamError("unknown variant: " + s);
}

/// Encoder/decoder stage count per variant. The shallow variant removes one
/// stage from each path of the baseline, the deep variant adds one, and the
/// residual variant keeps the baseline depth with residual stage blocks.
inline int variant_depth(Variant v) {
    switch (v) {
        case Variant::ShallowUnet: return 3;
        case Variant::Unet: return 4;
        case Variant::DeepUnet: return 5;
        case Variant::ResidualUnet: return 4;
    }
    throw ParamError("bad variant");
}

struct ArchitectureSpec {
    Variant variant = Variant::Unet;
    int base_channels = 64;
    int input_height = 256;
    int input_width = 256;
    int input_channels = 3;

    int depth() const { return variant_depth(variant); }

    void validate() const {
        if (base_channels < 1) throw SpecError("base_channels must be >= 1");
        int d = depth();
        int div = 1 << d;
        if (input_height % div != 0 || input_width % div != 0)
            throw SpecError("input size " + std::to_string(input_height) + "x" +
                            std::to_string(input_width) +
                            " not divisible by 2^depth = " + std::to_string(div));
    }
};

enum class NodeKind {
    Input,
    Conv,
    TransposedConv,
    InstanceNorm,
    Relu,
    LeakyRelu,
    Tanh,
    Sigmoid,
    SkipConcat,
    ResidualAdd,
    Downsample, // 2x2 mean pool
    Upsample    // 2x nearest
};

/// One node of the layer graph, in topological order. in0/in1 index earlier
/// nodes; parameter fields index ParamSlot entries.
struct LayerNode {
    NodeKind kind = NodeKind::Input;
    int in0 = -1, in1 = -1;
    int kernel = 0, stride = 1, pad = 0;
    int in_channels = 0, out_channels = 0;
    double slope = 0.0; // leaky relu
    int weight = -1, bias = -1, scale = -1, offset = -1;
    std::string path;
};

struct ParamSlot {
    std::string name;
    std::vector<int> shape;

    std::size_t count() const {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               [](std::size_t a, int b) { return a * b; });
    }
};

/// Declarative network: layer graph plus named parameter slots.
/// Conv weights are [out][in][k][k]; transposed-conv weights are
/// [in][out][k][k]; instance-norm scale/offset are [channels].
struct NetworkDescription {
    std::string role;   // "generator" or "discriminator"
    Variant variant = Variant::Unet;
    int base_channels = 64;
    int input_height = 256, input_width = 256, input_channels = 3;
    std::vector<LayerNode> nodes;
    std::vector<ParamSlot> params;
    int output = -1;

    std::size_t parameter_count() const {
        std::size_t total = 0;
        for (const auto& p : params) total += p.count();
        return total;
    }

    int count_kind(NodeKind kind) const {
        return static_cast<int>(std::count_if(
            nodes.begin(), nodes.end(),
            [&](const LayerNode& n) { return n.kind == kind; }));
    }

    int find_param(const std::string& name) const {
        for (std::size_t i = 0; i < params.size(); ++i)
            if (params[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

/// Incremental graph constructor used by the architecture builders and by
/// tests that assemble small graphs directly.
class GraphBuilder {
public:
    explicit GraphBuilder(int input_channels) {
        LayerNode in;
        in.kind = NodeKind::Input;
        in.out_channels = input_channels;
        desc_.input_channels = input_channels;
        desc_.nodes.push_back(in);
    }

    int input() const { return 0; }

    int conv(int from, int out_ch, int kernel, int stride, int pad,
             const std::string& path) {
        LayerNode n;
        n.kind = NodeKind::Conv;
        n.in0 = from;
        n.kernel = kernel;
        n.stride = stride;
        n.pad = pad;
        n.in_channels = channels(from);
        n.out_channels = out_ch;
        n.path = path;
        n.weight = add_param(path + "/weight", {out_ch, n.in_channels, kernel, kernel});
        n.bias = add_param(path + "/bias", {out_ch});
        return push(n);
    }

    int transposed_conv(int from, int out_ch, int kernel, int stride, int pad,
                        const std::string& path) {
        LayerNode n;
        n.kind = NodeKind::TransposedConv;
        n.in0 = from;
        n.kernel = kernel;
        n.stride = stride;
        n.pad = pad;
        n.in_channels = channels(from);
        n.out_channels = out_ch;
        n.path = path;
        n.weight = add_param(path + "/weight", {n.in_channels, out_ch, kernel, kernel});
        n.bias = add_param(path + "/bias", {out_ch});
        return push(n);
    }

    int instance_norm(int from, const std::string& path) {
        LayerNode n;
        n.kind = NodeKind::InstanceNorm;
        n.in0 = from;
        n.in_channels = n.out_channels = channels(from);
        n.path = path;
        n.scale = add_param(path + "/scale", {n.out_channels});
        n.offset = add_param(path + "/offset", {n.out_channels});
        return push(n);
    }

    int relu(int from) { return activation(NodeKind::Relu, from, 0.0); }
    int leaky_relu(int from, double slope) {
        return activation(NodeKind::LeakyRelu, from, slope);
    }
    int tanh(int from) { return activation(NodeKind::Tanh, from, 0.0); }
    int sigmoid(int from) { return activation(NodeKind::Sigmoid, from, 0.0); }

    int skip_concat(int a, int b) {
        LayerNode n;
        n.kind = NodeKind::SkipConcat;
        n.in0 = a;
        n.in1 = b;
        n.in_channels = channels(a);
        n.out_channels = channels(a) + channels(b);
        return push(n);
    }

    int residual_add(int a, int b) {
        if (channels(a) != channels(b))
            throw SpecError("residual_add requires equal channel counts");
        LayerNode n;
        n.kind = NodeKind::ResidualAdd;
        n.in0 = a;
        n.in1 = b;
        n.in_channels = n.out_channels = channels(a);
        return push(n);
    }

    int upsample(int from) { return resample(NodeKind::Upsample, from); }
    int downsample(int from) { return resample(NodeKind::Downsample, from); }

    int channels(int node) const { return desc_.nodes.at(node).out_channels; }

    NetworkDescription finish(int output_node) {
        desc_.output = output_node;
        return std::move(desc_);
    }

private:
    int activation(NodeKind kind, int from, double slope) {
        LayerNode n;
        n.kind = kind;
        n.in0 = from;
        n.slope = slope;
        n.in_channels = n.out_channels = channels(from);
        return push(n);
    }

    int resample(NodeKind kind, int from) {
        LayerNode n;
        n.kind = kind;
        n.in0 = from;
        n.in_channels = n.out_channels = channels(from);
        return push(n);
    }

    int push(const LayerNode& n) {
        desc_.nodes.push_back(n);
        return static_cast<int>(desc_.nodes.size()) - 1;
    }

    int add_param(const std::string& name, std::vector<int> shape) {
        desc_.params.push_back({name, std::move(shape)});
        return static_cast<int>(desc_.params.size()) - 1;
    }

    NetworkDescription desc_;
};

enum class Resample { None, Down2, Up2 };

/// Appends one residual unit: conv -> norm -> relu -> conv -> norm on the
/// main path, identity shortcut (1x1 projection when the channel counts or
/// resolution differ), add, relu. A zero-weight unit with an identity
/// shortcut therefore maps x to relu(x).
inline int append_residual_unit(GraphBuilder& g, int from, int out_ch,
                                Resample resample, const std::string& path) {
    int in_ch = g.channels(from);
    int main = from;
    if (resample == Resample::Up2) {
        main = g.transposed_conv(main, out_ch, 4, 2, 1, path + "/conv1");
    } else {
        int stride = resample == Resample::Down2 ? 2 : 1;
        main = g.conv(main, out_ch, 3, stride, 1, path + "/conv1");
    }
    main = g.instance_norm(main, path + "/norm1");
    main = g.relu(main);
    main = g.conv(main, out_ch, 3, 1, 1, path + "/conv2");
    main = g.instance_norm(main, path + "/norm2");

    int shortcut = from;
    if (resample == Resample::Up2) {
        shortcut = g.upsample(shortcut);
        shortcut = g.conv(shortcut, out_ch, 1, 1, 0, path + "/proj");
    } else if (resample == Resample::Down2) {
        shortcut = g.conv(shortcut, out_ch, 1, 2, 0, path + "/proj");
    } else if (in_ch != out_ch) {
        shortcut = g.conv(shortcut, out_ch, 1, 1, 0, path + "/proj");
    }
    int sum = g.residual_add(main, shortcut);
    return g.relu(sum);
}

/// Builds a generator backbone: stride-2 downsampling stages with channels
/// doubling from base (capped at 8x base), a bottleneck, and transposed-conv
/// upsampling stages, each fed by a skip concatenation with the encoder
/// stage of equal spatial size. Every convolution is followed by instance
/// normalization and ReLU; the head is a 3-channel convolution under tanh.
/// The residual variant swaps each stage's convolution block for a residual
/// unit.
inline NetworkDescription build_translator(const ArchitectureSpec& spec) {
    spec.validate();
    const int depth = spec.depth();
    const int cap = 8 * spec.base_channels;
    const bool residual = spec.variant == Variant::ResidualUnet;
    auto ch = [&](int stage) {
        long long c = static_cast<long long>(spec.base_channels) << stage;
        return static_cast<int>(std::min<long long>(c, cap));
    };

    GraphBuilder g(spec.input_channels);
    std::vector<int> enc(depth);
    int x = g.input();
    for (int s = 0; s < depth; ++s) {
        std::string path = "enc" + std::to_string(s);
        if (residual) {
            x = append_residual_unit(g, x, ch(s), Resample::Down2, path);
        } else {
            x = g.conv(x, ch(s), 3, 2, 1, path + "/conv");
            x = g.instance_norm(x, path + "/norm");
            x = g.relu(x);
        }
        enc[s] = x;
    }

    x = g.conv(x, ch(depth - 1), 3, 1, 1, "bottleneck/conv");
    x = g.instance_norm(x, "bottleneck/norm");
    x = g.relu(x);

    for (int s = depth - 1; s >= 0; --s) {
        std::string path = "dec" + std::to_string(s);
        int out_ch = s > 0 ? ch(s - 1) : spec.base_channels;
        x = g.skip_concat(x, enc[s]);
        if (residual) {
            x = append_residual_unit(g, x, out_ch, Resample::Up2, path);
        } else {
            x = g.transposed_conv(x, out_ch, 4, 2, 1, path + "/tconv");
            x = g.instance_norm(x, path + "/norm");
            x = g.relu(x);
        }
    }

    x = g.conv(x, 3, 3, 1, 1, "head/conv");
    x = g.tanh(x);

    NetworkDescription desc = g.finish(x);
    desc.role = "generator";
    desc.variant = spec.variant;
    desc.base_channels = spec.base_channels;
    desc.input_height = spec.input_height;
    desc.input_width = spec.input_width;
    desc.input_channels = spec.input_channels;
    return desc;
}

/// Patch discriminator: four stride-2 4x4 convolutions from 64 to 512
/// channels (leaky ReLU 0.2, instance norm after all but the first), then a
/// 1-channel convolution under sigmoid. The output is a grid of per-patch
/// probabilities.
inline NetworkDescription build_discriminator(int image_size,
                                              int input_channels = 3,
                                              int base_channels = 64) {
    if (image_size < 64)
        throw SpecError("discriminator image_size must be >= 64");
    GraphBuilder g(input_channels);
    int x = g.input();
    int chans[4] = {base_channels, base_channels * 2, base_channels * 4,
                    base_channels * 8};
    for (int i = 0; i < 4; ++i) {
        std::string path = "disc" + std::to_string(i);
        x = g.conv(x, chans[i], 4, 2, 1, path + "/conv");
        if (i > 0) x = g.instance_norm(x, path + "/norm");
        x = g.leaky_relu(x, 0.2);
    }
    x = g.conv(x, 1, 4, 1, 1, "head/conv");
    x = g.sigmoid(x);

    NetworkDescription desc = g.finish(x);
    desc.role = "discriminator";
    desc.base_channels = base_channels;
    desc.input_height = image_size;
    desc.input_width = image_size;
    desc.input_channels = input_channels;
    return desc;
}

/// Output spatial side for a square input, traced node by node through the
/// emitted graph's stride arithmetic.
inline int trace_output_side(const NetworkDescription& desc, int input_side) {
    std::vector<int> side(desc.nodes.size(), 0);
    for (std::size_t i = 0; i < desc.nodes.size(); ++i) {
        const LayerNode& n = desc.nodes[i];
        int in = n.in0 >= 0 ? side[n.in0] : input_side;
        switch (n.kind) {
            case NodeKind::Input: side[i] = input_side; break;
            case NodeKind::Conv:
                side[i] = (in + 2 * n.pad - n.kernel) / n.stride + 1;
                break;
            case NodeKind::TransposedConv:
                side[i] = (in - 1) * n.stride - 2 * n.pad + n.kernel;
                break;
            case NodeKind::Downsample: side[i] = in / 2; break;
            case NodeKind::Upsample: side[i] = in * 2; break;
            default: side[i] = in; break;
        }
        if (side[i] < 1) throw ShapeError("input side too small for network");
    }
    return side[desc.output];
}

} // namespace endo
