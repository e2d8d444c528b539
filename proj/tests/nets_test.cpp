#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <thread>

#include "endo/nets/graph.hpp"
#include "endo/nets/network.hpp"

using namespace endo;

namespace {

// ---------------------------------------------------------------------
// Straight-line reference interpreter: evaluates a NetworkDescription with
// naive per-pixel loops, independent of the production kernels.
// ---------------------------------------------------------------------

struct RefTensor {
    int c = 0, h = 0, w = 0;
    std::vector<double> v;
    double at(int ci, int y, int x) const {
        return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }
    double& at(int ci, int y, int x) {
        return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }
};

RefTensor reference_forward(const NetworkDescription& desc,
                            const ParamStore<float>& params,
                            const RefTensor& input) {
    std::vector<RefTensor> outs(desc.nodes.size());
    auto param = [&](int slot) { return params[slot]; };
    for (std::size_t i = 0; i < desc.nodes.size(); ++i) {
        const LayerNode& n = desc.nodes[i];
        switch (n.kind) {
            case NodeKind::Input:
                outs[i] = input;
                break;
            case NodeKind::Conv: {
                const RefTensor& x = outs[n.in0];
                RefTensor y;
                y.c = n.out_channels;
                y.h = (x.h + 2 * n.pad - n.kernel) / n.stride + 1;
                y.w = (x.w + 2 * n.pad - n.kernel) / n.stride + 1;
                y.v.assign(static_cast<std::size_t>(y.c) * y.h * y.w, 0.0);
                auto wts = param(n.weight);
                auto bias = param(n.bias);
                for (int oc = 0; oc < y.c; ++oc)
                    for (int oy = 0; oy < y.h; ++oy)
                        for (int ox = 0; ox < y.w; ++ox) {
                            double sum = bias[oc];
                            for (int ic = 0; ic < x.c; ++ic)
                                for (int ky = 0; ky < n.kernel; ++ky)
                                    for (int kx = 0; kx < n.kernel; ++kx) {
                                        int iy = oy * n.stride - n.pad + ky;
                                        int ix = ox * n.stride - n.pad + kx;
                                        if (iy < 0 || ix < 0 || iy >= x.h ||
                                            ix >= x.w)
                                            continue;
                                        sum += wts[((static_cast<std::size_t>(oc) *
                                                         x.c + ic) * n.kernel + ky) *
                                                       n.kernel + kx] *
                                               x.at(ic, iy, ix);
                                    }
                            y.at(oc, oy, ox) = sum;
                        }
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::TransposedConv: {
                const RefTensor& x = outs[n.in0];
                RefTensor y;
                y.c = n.out_channels;
                y.h = (x.h - 1) * n.stride - 2 * n.pad + n.kernel;
                y.w = (x.w - 1) * n.stride - 2 * n.pad + n.kernel;
                y.v.assign(static_cast<std::size_t>(y.c) * y.h * y.w, 0.0);
                auto wts = param(n.weight);
                auto bias = param(n.bias);
                for (int oc = 0; oc < y.c; ++oc)
                    for (int oy = 0; oy < y.h; ++oy)
                        for (int ox = 0; ox < y.w; ++ox)
                            y.at(oc, oy, ox) = bias[oc];
                for (int ic = 0; ic < x.c; ++ic)
                    for (int iy = 0; iy < x.h; ++iy)
                        for (int ix = 0; ix < x.w; ++ix)
                            for (int oc = 0; oc < y.c; ++oc)
                                for (int ky = 0; ky < n.kernel; ++ky)
                                    for (int kx = 0; kx < n.kernel; ++kx) {
                                        int oy = iy * n.stride - n.pad + ky;
                                        int ox = ix * n.stride - n.pad + kx;
                                        if (oy < 0 || ox < 0 || oy >= y.h ||
                                            ox >= y.w)
                                            continue;
                                        y.at(oc, oy, ox) +=
                                            wts[((static_cast<std::size_t>(ic) *
                                                      y.c + oc) * n.kernel + ky) *
                                                    n.kernel + kx] *
                                            x.at(ic, iy, ix);
                                    }
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::InstanceNorm: {
                const RefTensor& x = outs[n.in0];
                RefTensor y = x;
                auto scale = param(n.scale);
                auto offset = param(n.offset);
                for (int c = 0; c < x.c; ++c) {
                    double mean = 0.0;
                    for (int yy = 0; yy < x.h; ++yy)
                        for (int xx = 0; xx < x.w; ++xx) mean += x.at(c, yy, xx);
                    mean /= x.h * x.w;
                    double var = 0.0;
                    for (int yy = 0; yy < x.h; ++yy)
                        for (int xx = 0; xx < x.w; ++xx) {
                            double d = x.at(c, yy, xx) - mean;
                            var += d * d;
                        }
                    var /= x.h * x.w;
                    double inv = 1.0 / std::sqrt(var + ops::kInstanceNormEps);
                    for (int yy = 0; yy < x.h; ++yy)
                        for (int xx = 0; xx < x.w; ++xx)
                            y.at(c, yy, xx) =
                                scale[c] * (x.at(c, yy, xx) - mean) * inv +
                                offset[c];
                }
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::Relu: {
                RefTensor y = outs[n.in0];
                for (auto& v : y.v) v = std::max(0.0, v);
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::LeakyRelu: {
                RefTensor y = outs[n.in0];
                for (auto& v : y.v) v = v > 0 ? v : n.slope * v;
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::Tanh: {
                RefTensor y = outs[n.in0];
                for (auto& v : y.v) v = std::tanh(v);
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::Sigmoid: {
                RefTensor y = outs[n.in0];
                for (auto& v : y.v) v = 1.0 / (1.0 + std::exp(-v));
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::SkipConcat: {
                const RefTensor& a = outs[n.in0];
                const RefTensor& b = outs[n.in1];
                RefTensor y;
                y.c = a.c + b.c;
                y.h = a.h;
                y.w = a.w;
                y.v.resize(static_cast<std::size_t>(y.c) * y.h * y.w);
                for (int c = 0; c < a.c; ++c)
                    for (int yy = 0; yy < y.h; ++yy)
                        for (int xx = 0; xx < y.w; ++xx)
                            y.at(c, yy, xx) = a.at(c, yy, xx);
                for (int c = 0; c < b.c; ++c)
                    for (int yy = 0; yy < y.h; ++yy)
                        for (int xx = 0; xx < y.w; ++xx)
                            y.at(a.c + c, yy, xx) = b.at(c, yy, xx);
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::ResidualAdd: {
                RefTensor y = outs[n.in0];
                const RefTensor& b = outs[n.in1];
                for (std::size_t j = 0; j < y.v.size(); ++j) y.v[j] += b.v[j];
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::Upsample: {
                const RefTensor& x = outs[n.in0];
                RefTensor y;
                y.c = x.c;
                y.h = x.h * 2;
                y.w = x.w * 2;
                y.v.resize(static_cast<std::size_t>(y.c) * y.h * y.w);
                for (int c = 0; c < y.c; ++c)
                    for (int yy = 0; yy < y.h; ++yy)
                        for (int xx = 0; xx < y.w; ++xx)
                            y.at(c, yy, xx) = x.at(c, yy / 2, xx / 2);
                outs[i] = std::move(y);
                break;
            }
            case NodeKind::Downsample: {
                const RefTensor& x = outs[n.in0];
                RefTensor y;
                y.c = x.c;
                y.h = x.h / 2;
                y.w = x.w / 2;
                y.v.resize(static_cast<std::size_t>(y.c) * y.h * y.w);
                for (int c = 0; c < y.c; ++c)
                    for (int yy = 0; yy < y.h; ++yy)
                        for (int xx = 0; xx < y.w; ++xx)
                            y.at(c, yy, xx) = (x.at(c, 2 * yy, 2 * xx) +
                                               x.at(c, 2 * yy, 2 * xx + 1) +
                                               x.at(c, 2 * yy + 1, 2 * xx) +
                                               x.at(c, 2 * yy + 1, 2 * xx + 1)) /
                                              4.0;
                outs[i] = std::move(y);
                break;
            }
        }
    }
    return outs[desc.output];
}

ArchitectureSpec spec_of(Variant variant, int base, int size) {
    ArchitectureSpec spec;
    spec.variant = variant;
    spec.base_channels = base;
    spec.input_height = spec.input_width = size;
    return spec;
}

Tensor<float> random_batch(int n, int c, int h, int w, std::uint64_t seed) {
    Tensor<float> t(n, c, h, w);
    Rng rng(seed);
    for (auto& v : t.v)
        v = static_cast<float>(2.0 * rng.next_uniform() - 1.0);
    return t;
}

} // namespace

TEST(Architecture, UnetHasFourSkipsAndPreservesShape) {
    NetworkDescription desc = build_translator(spec_of(Variant::Unet, 64, 256));
    EXPECT_EQ(desc.count_kind(NodeKind::SkipConcat), 4);
    EXPECT_EQ(trace_output_side(desc, 256), 256);
    EXPECT_EQ(desc.nodes[desc.output].kind, NodeKind::Tanh);
    EXPECT_EQ(desc.nodes[desc.output - 1].out_channels, 3);
}

TEST(Architecture, DepthPerVariant) {
    EXPECT_EQ(variant_depth(Variant::ShallowUnet), 3);
    EXPECT_EQ(variant_depth(Variant::Unet), 4);
    EXPECT_EQ(variant_depth(Variant::DeepUnet), 5);
    EXPECT_EQ(variant_depth(Variant::ResidualUnet), 4);
    EXPECT_EQ(build_translator(spec_of(Variant::ShallowUnet, 8, 64))
                  .count_kind(NodeKind::SkipConcat),
              3);
    EXPECT_EQ(build_translator(spec_of(Variant::DeepUnet, 8, 64))
                  .count_kind(NodeKind::SkipConcat),
              5);
}

TEST(Architecture, ParameterCountLadder) {
    for (int base : {8, 16, 64}) {
        auto shallow =
            build_translator(spec_of(Variant::ShallowUnet, base, 256));
        auto standard = build_translator(spec_of(Variant::Unet, base, 256));
        auto deep = build_translator(spec_of(Variant::DeepUnet, base, 256));
        EXPECT_LT(shallow.parameter_count(), standard.parameter_count())
            << "base " << base;
        EXPECT_LT(standard.parameter_count(), deep.parameter_count())
            << "base " << base;
    }
}

TEST(Architecture, ResidualVariantHasOneAddPerStage) {
    NetworkDescription desc =
        build_translator(spec_of(Variant::ResidualUnet, 16, 256));
    EXPECT_EQ(desc.count_kind(NodeKind::ResidualAdd), 2 * 4);
}

TEST(Architecture, IndivisibleInputIsSpecError) {
    EXPECT_THROW(build_translator(spec_of(Variant::Unet, 8, 100)), SpecError);
    EXPECT_THROW(build_translator(spec_of(Variant::DeepUnet, 8, 16)), SpecError);
    EXPECT_NO_THROW(build_translator(spec_of(Variant::DeepUnet, 8, 32)));
}

TEST(Architecture, CheckpointNamesAreUniqueAndPrefixed) {
    NetworkDescription desc =
        build_translator(spec_of(Variant::ResidualUnet, 8, 64));
    std::map<std::string, int> seen;
    for (const auto& p : desc.params) ++seen[p.name];
    for (const auto& [name, count] : seen) EXPECT_EQ(count, 1) << name;
    EXPECT_GE(desc.find_param("enc0/conv1/weight"), 0);
    EXPECT_GE(desc.find_param("head/conv/bias"), 0);
}

TEST(Discriminator, PatchGridArithmetic) {
    NetworkDescription desc = build_discriminator(256);
    // Four stride-2 4x4 convolutions then the 1-channel head.
    EXPECT_EQ(desc.count_kind(NodeKind::Conv), 5);
    EXPECT_EQ(desc.count_kind(NodeKind::InstanceNorm), 3);
    EXPECT_EQ(desc.count_kind(NodeKind::LeakyRelu), 4);
    int side256 = trace_output_side(desc, 256);
    int side512 = trace_output_side(desc, 512);
    EXPECT_EQ(side256, 15);
    // Doubling the input doubles the grid side within one cell.
    EXPECT_NEAR(side512, 2 * side256, 1);

    Network<float> d(desc);
    Rng rng(5);
    d.init_parameters(rng);
    Tensor<float> out = d.forward(random_batch(1, 3, 256, 256, 9));
    EXPECT_EQ(out.c, 1);
    EXPECT_EQ(out.h, side256);
    EXPECT_EQ(out.w, side256);
    for (float v : out.v) {
        EXPECT_GT(v, 0.0f);
        EXPECT_LT(v, 1.0f);
    }
    EXPECT_THROW(build_discriminator(32), SpecError);
}

TEST(Forward, ShapePreservedForAllVariantsAndSizes) {
    for (Variant variant : {Variant::ShallowUnet, Variant::Unet,
                            Variant::DeepUnet, Variant::ResidualUnet}) {
        for (int size : {64, 96}) {
            Network<float> net(build_translator(spec_of(variant, 4, size)));
            Rng rng(11);
            net.init_parameters(rng);
            Tensor<float> x = random_batch(2, 3, size, size, 13);
            Tensor<float> y = net.forward(x);
            EXPECT_EQ(y.n, x.n) << variant_name(variant);
            EXPECT_EQ(y.c, 3);
            EXPECT_EQ(y.h, size);
            EXPECT_EQ(y.w, size);
            for (float v : y.v) {
                EXPECT_GE(v, -1.0f);
                EXPECT_LE(v, 1.0f);
            }
        }
    }
}

TEST(Forward, BatchOfTwentyAt256) {
    // Mini batch of 20 at 256x256x3 keeps its shape through every variant.
    Tensor<float> x = random_batch(20, 3, 256, 256, 29);
    for (Variant variant : {Variant::ShallowUnet, Variant::Unet,
                            Variant::DeepUnet, Variant::ResidualUnet}) {
        Network<float> net(build_translator(spec_of(variant, 2, 256)));
        Rng rng(31);
        net.init_parameters(rng);
        Tensor<float> y = net.forward(x);
        EXPECT_EQ(y.n, 20);
        EXPECT_EQ(y.c, 3);
        EXPECT_EQ(y.h, 256);
        EXPECT_EQ(y.w, 256);
    }
}

TEST(Forward, DeterministicAndConcurrencySafe) {
    Network<float> net(build_translator(spec_of(Variant::Unet, 8, 32)));
    Rng rng(3);
    net.init_parameters(rng);
    Tensor<float> x = random_batch(2, 3, 32, 32, 7);
    Tensor<float> a = net.forward(x);
    Tensor<float> b;
    std::thread worker([&] { b = net.forward(x); });
    Tensor<float> c = net.forward(x);
    worker.join();
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.v, c.v);
}

TEST(Forward, ZeroFinalLayerGivesZeroOutput) {
    Network<float> net(build_translator(spec_of(Variant::Unet, 8, 32)));
    Rng rng(3);
    net.init_parameters(rng);
    int w = net.description().find_param("head/conv/weight");
    int b = net.description().find_param("head/conv/bias");
    ASSERT_GE(w, 0);
    ASSERT_GE(b, 0);
    std::fill(net.params()[w].begin(), net.params()[w].end(), 0.0f);
    std::fill(net.params()[b].begin(), net.params()[b].end(), 0.0f);
    Tensor<float> y = net.forward(random_batch(1, 3, 32, 32, 99));
    for (float v : y.v) EXPECT_EQ(v, 0.0f); // tanh(0)
}

TEST(Forward, ShapeMismatchNamesTheDimension) {
    Network<float> net(build_translator(spec_of(Variant::Unet, 8, 32)));
    Rng rng(3);
    net.init_parameters(rng);
    try {
        net.forward(random_batch(1, 4, 32, 32, 1));
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        EXPECT_NE(std::string(e.what()).find("channels"), std::string::npos);
    }
}

TEST(Forward, MatchesReferenceInterpreter) {
    for (Variant variant : {Variant::ShallowUnet, Variant::ResidualUnet}) {
        const int size = variant == Variant::ShallowUnet ? 16 : 16;
        Network<float> net(build_translator(spec_of(variant, 4, size)));
        Rng rng(23);
        net.init_parameters(rng);
        Tensor<float> x = random_batch(1, 3, size, size, 41);

        RefTensor ref_in;
        ref_in.c = 3;
        ref_in.h = ref_in.w = size;
        ref_in.v.resize(x.v.size());
        for (std::size_t i = 0; i < x.v.size(); ++i) ref_in.v[i] = x.v[i];

        Tensor<float> got = net.forward(x);
        RefTensor want =
            reference_forward(net.description(), net.params(), ref_in);
        ASSERT_EQ(got.v.size(), want.v.size());
        for (std::size_t i = 0; i < got.v.size(); ++i)
            EXPECT_NEAR(got.v[i], want.v[i], 1e-5) << variant_name(variant);
    }
}

TEST(Init, DeterministicGivenSeed) {
    Network<float> a(build_translator(spec_of(Variant::Unet, 8, 32)));
    Network<float> b(build_translator(spec_of(Variant::Unet, 8, 32)));
    Rng ra(77), rb(77);
    a.init_parameters(ra);
    b.init_parameters(rb);
    EXPECT_EQ(a.params(), b.params());
}

TEST(Init, WeightStatisticsAndNormDefaults) {
    // A bottleneck conv at base 64 holds > 1e5 weights.
    NetworkDescription desc = build_translator(spec_of(Variant::Unet, 64, 256));
    Network<float> net(desc);
    Rng rng(123);
    net.init_parameters(rng);
    int slot = desc.find_param("bottleneck/conv/weight");
    ASSERT_GE(slot, 0);
    const auto& weights = net.params()[slot];
    ASSERT_GT(weights.size(), 100000u);
    double mean = 0.0;
    for (float v : weights) mean += v;
    mean /= static_cast<double>(weights.size());
    const double sigma_of_mean = 0.02 / std::sqrt(static_cast<double>(weights.size()));
    EXPECT_LT(std::abs(mean), 4.0 * sigma_of_mean);

    double var = 0.0;
    for (float v : weights) var += (v - mean) * (v - mean);
    var /= static_cast<double>(weights.size());
    EXPECT_NEAR(std::sqrt(var), 0.02, 0.002);

    for (const auto& node : desc.nodes) {
        if (node.kind != NodeKind::InstanceNorm) continue;
        for (float v : net.params()[node.scale]) EXPECT_EQ(v, 1.0f);
        for (float v : net.params()[node.offset]) EXPECT_EQ(v, 0.0f);
    }
}

TEST(InstanceNorm, NormalizedStatistics) {
    Rng rng(55);
    Tensor<float> x(2, 5, 24, 24);
    for (auto& v : x.v) v = static_cast<float>(rng.next_normal() * 0.03 + 0.2);
    std::vector<float> scale(5, 1.0f), offset(5, 0.0f), mean, inv_std;
    Tensor<float> y = ops::instance_norm_forward(x, scale, offset, mean, inv_std);
    for (int n = 0; n < y.n; ++n)
        for (int c = 0; c < y.c; ++c) {
            double m = 0.0, s2 = 0.0;
            const float* p = y.channel(n, c);
            for (std::size_t i = 0; i < y.plane(); ++i) m += p[i];
            m /= static_cast<double>(y.plane());
            for (std::size_t i = 0; i < y.plane(); ++i)
                s2 += (p[i] - m) * (p[i] - m);
            s2 /= static_cast<double>(y.plane());
            EXPECT_LT(std::abs(m), 1e-4);
            EXPECT_LT(std::abs(s2 - 1.0), 1e-3);
        }
}

TEST(InstanceNorm, NormalizedStatisticsInsideNetwork) {
    Network<float> net(build_translator(spec_of(Variant::Unet, 8, 64)));
    Rng rng(66);
    net.init_parameters(rng);
    Tensor<float> x = random_batch(1, 3, 64, 64, 67);
    Tape<float> tape;
    net.forward(x, &tape);
    const auto& nodes = net.description().nodes;
    int checked = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].kind != NodeKind::InstanceNorm) continue;
        // Post-norm, pre-scale/offset stats: scale is 1 and offset 0 at
        // init, so the node output itself is the normalized signal.
        const Tensor<float>& y = tape.out[i];
        for (int c = 0; c < y.c; ++c) {
            double m = 0.0, s2 = 0.0;
            const float* p = y.channel(0, c);
            for (std::size_t k = 0; k < y.plane(); ++k) m += p[k];
            m /= static_cast<double>(y.plane());
            for (std::size_t k = 0; k < y.plane(); ++k)
                s2 += (p[k] - m) * (p[k] - m);
            s2 /= static_cast<double>(y.plane());
            EXPECT_LT(std::abs(m), 1e-4);
            EXPECT_LT(std::abs(s2 - 1.0), 1e-3);
        }
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(ResidualUnit, ZeroWeightsActAsIdentityUnderRelu) {
    GraphBuilder g(6);
    int out = append_residual_unit(g, g.input(), 6, Resample::None, "ru");
    NetworkDescription desc = g.finish(out);
    desc.input_channels = 6;
    Network<float> net(desc);
    Rng rng(8);
    net.init_parameters(rng);
    // Zero every convolution weight and bias; the shortcut is a pure
    // identity (equal channels, no resampling), so y = relu(x).
    for (const auto& node : desc.nodes) {
        if (node.weight >= 0)
            std::fill(net.params()[node.weight].begin(),
                      net.params()[node.weight].end(), 0.0f);
        if (node.bias >= 0)
            std::fill(net.params()[node.bias].begin(),
                      net.params()[node.bias].end(), 0.0f);
    }
    Tensor<float> x = random_batch(1, 6, 12, 12, 3);
    Tensor<float> y = net.forward(x);
    ASSERT_TRUE(y.same_shape(x));
    for (std::size_t i = 0; i < x.v.size(); ++i)
        EXPECT_EQ(y.v[i], std::max(0.0f, x.v[i]));
}
