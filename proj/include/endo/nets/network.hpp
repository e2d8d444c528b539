#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "endo/core/rng.hpp"
#include "endo/core/tensor.hpp"
#include "endo/nets/graph.hpp"
#include "endo/nets/ops.hpp"

namespace endo {

/// Parameter storage aligned with a NetworkDescription's param slots.
template <typename T>
using ParamStore = std::vector<std::vector<T>>;

template <typename T>
ParamStore<T> make_param_store(const NetworkDescription& desc) {
    ParamStore<T> store(desc.params.size());
    for (std::size_t i = 0; i < desc.params.size(); ++i)
        store[i].assign(desc.params[i].count(), T(0));
    return store;
}

/// Forward activations kept for the backward pass. `out[i]` is node i's
/// output; instance-norm nodes additionally record per-(image, channel)
/// mean and inverse std.
template <typename T>
struct Tape {
    std::vector<Tensor<T>> out;
    std::vector<std::vector<T>> norm_mean;
    std::vector<std::vector<T>> norm_inv_std;
};

/// A parameterized network: immutable description plus a parameter store.
/// forward() is const and safe to call concurrently on shared parameters;
/// mutation happens only through the optimizer between steps.
template <typename T>
class Network {
public:
    explicit Network(NetworkDescription desc)
        : desc_(std::move(desc)), params_(make_param_store<T>(desc_)) {}

    const NetworkDescription& description() const { return desc_; }
    ParamStore<T>& params() { return params_; }
    const ParamStore<T>& params() const { return params_; }

    /// Convolution weights ~ Normal(0, 0.02), instance-norm scale 1 and
    /// offset 0, biases 0. Deterministic given the generator state.
    void init_parameters(Rng& rng) {
        for (const auto& node : desc_.nodes) {
            if (node.weight >= 0)
                for (auto& v : params_[node.weight])
                    v = static_cast<T>(0.02 * rng.next_normal());
            if (node.bias >= 0)
                for (auto& v : params_[node.bias]) v = T(0);
            if (node.scale >= 0)
                for (auto& v : params_[node.scale]) v = T(1);
            if (node.offset >= 0)
                for (auto& v : params_[node.offset]) v = T(0);
        }
    }

    Tensor<T> forward(const Tensor<T>& input, Tape<T>* tape = nullptr) const {
        if (input.c != desc_.input_channels)
            throw ShapeError("forward: input has " + std::to_string(input.c) +
                             " channels, network expects " +
                             std::to_string(desc_.input_channels));
        std::vector<Tensor<T>> outs(desc_.nodes.size());
        std::vector<std::vector<T>> means(desc_.nodes.size());
        std::vector<std::vector<T>> invs(desc_.nodes.size());

        for (std::size_t i = 0; i < desc_.nodes.size(); ++i) {
            const LayerNode& n = desc_.nodes[i];
            switch (n.kind) {
                case NodeKind::Input:
                    outs[i] = input;
                    break;
                case NodeKind::Conv:
                    outs[i] = ops::conv2d_forward(outs[n.in0], params_[n.weight],
                                                  params_[n.bias], n.out_channels,
                                                  n.kernel, n.stride, n.pad);
                    break;
                case NodeKind::TransposedConv:
                    outs[i] = ops::tconv_forward(outs[n.in0], params_[n.weight],
                                                 params_[n.bias], n.out_channels,
                                                 n.kernel, n.stride, n.pad);
                    break;
                case NodeKind::InstanceNorm:
                    outs[i] = ops::instance_norm_forward(
                        outs[n.in0], params_[n.scale], params_[n.offset],
                        means[i], invs[i]);
                    break;
                case NodeKind::Relu: {
                    outs[i] = outs[n.in0];
                    for (auto& v : outs[i].v) v = v > T(0) ? v : T(0);
                    break;
                }
                case NodeKind::LeakyRelu: {
                    outs[i] = outs[n.in0];
                    const T s = static_cast<T>(n.slope);
                    for (auto& v : outs[i].v) v = v > T(0) ? v : s * v;
                    break;
                }
                case NodeKind::Tanh: {
                    outs[i] = outs[n.in0];
                    for (auto& v : outs[i].v) v = std::tanh(v);
                    break;
                }
                case NodeKind::Sigmoid: {
                    outs[i] = outs[n.in0];
                    for (auto& v : outs[i].v) v = T(1) / (T(1) + std::exp(-v));
                    break;
                }
                case NodeKind::SkipConcat:
                    outs[i] = ops::concat_forward(outs[n.in0], outs[n.in1]);
                    break;
                case NodeKind::ResidualAdd: {
                    const Tensor<T>& a = outs[n.in0];
                    const Tensor<T>& b = outs[n.in1];
                    if (!a.same_shape(b))
                        throw ShapeError("residual_add shape mismatch");
                    outs[i] = a;
                    for (std::size_t j = 0; j < outs[i].v.size(); ++j)
                        outs[i].v[j] += b.v[j];
                    break;
                }
                case NodeKind::Upsample:
                    outs[i] = ops::upsample2_forward(outs[n.in0]);
                    break;
                case NodeKind::Downsample:
                    outs[i] = ops::downsample2_forward(outs[n.in0]);
                    break;
            }
        }
        Tensor<T> result = outs[desc_.output];
        if (tape) {
            tape->out = std::move(outs);
            tape->norm_mean = std::move(means);
            tape->norm_inv_std = std::move(invs);
        }
        return result;
    }

    /// Backpropagates d_output through the taped forward pass, accumulating
    /// parameter gradients into `grads` (same layout as the param store).
    /// Returns the gradient w.r.t. the network input.
    Tensor<T> backward(const Tape<T>& tape, const Tensor<T>& d_output,
                       ParamStore<T>& grads) const {
        std::vector<Tensor<T>> d(desc_.nodes.size());
        auto accumulate = [&](int node, Tensor<T>&& grad) {
            if (d[node].v.empty()) {
                d[node] = std::move(grad);
            } else {
                for (std::size_t j = 0; j < d[node].v.size(); ++j)
                    d[node].v[j] += grad.v[j];
            }
        };
        d[desc_.output] = d_output;

        for (int i = static_cast<int>(desc_.nodes.size()) - 1; i >= 0; --i) {
            if (d[i].v.empty()) continue; // node not on any gradient path
            const LayerNode& n = desc_.nodes[i];
            const Tensor<T>& dy = d[i];
            switch (n.kind) {
                case NodeKind::Input:
                    break;
                case NodeKind::Conv: {
                    const Tensor<T>& x = tape.out[n.in0];
                    ops::conv2d_backward_params(x, dy, n.kernel, n.stride, n.pad,
                                                grads[n.weight], grads[n.bias]);
                    accumulate(n.in0, ops::conv2d_backward_input(
                                          dy, params_[n.weight], x.c, x.h, x.w,
                                          n.kernel, n.stride, n.pad));
                    break;
                }
                case NodeKind::TransposedConv: {
                    const Tensor<T>& x = tape.out[n.in0];
                    ops::tconv_backward_params(x, dy, n.kernel, n.stride, n.pad,
                                               grads[n.weight], grads[n.bias]);
                    accumulate(n.in0, ops::tconv_backward_input(
                                          dy, params_[n.weight], x.c, x.h, x.w,
                                          n.kernel, n.stride, n.pad));
                    break;
                }
                case NodeKind::InstanceNorm: {
                    const Tensor<T>& x = tape.out[n.in0];
                    accumulate(n.in0, ops::instance_norm_backward(
                                          x, dy, params_[n.scale],
                                          tape.norm_mean[i], tape.norm_inv_std[i],
                                          grads[n.scale], grads[n.offset]));
                    break;
                }
                case NodeKind::Relu: {
                    Tensor<T> dx = dy;
                    const Tensor<T>& y = tape.out[i];
                    for (std::size_t j = 0; j < dx.v.size(); ++j)
                        if (y.v[j] <= T(0)) dx.v[j] = T(0);
                    accumulate(n.in0, std::move(dx));
                    break;
                }
                case NodeKind::LeakyRelu: {
                    Tensor<T> dx = dy;
                    const Tensor<T>& y = tape.out[i];
                    const T s = static_cast<T>(n.slope);
                    for (std::size_t j = 0; j < dx.v.size(); ++j)
                        if (y.v[j] <= T(0)) dx.v[j] *= s;
                    accumulate(n.in0, std::move(dx));
                    break;
                }
                case NodeKind::Tanh: {
                    Tensor<T> dx = dy;
                    const Tensor<T>& y = tape.out[i];
                    for (std::size_t j = 0; j < dx.v.size(); ++j)
                        dx.v[j] *= T(1) - y.v[j] * y.v[j];
                    accumulate(n.in0, std::move(dx));
                    break;
                }
                case NodeKind::Sigmoid: {
                    Tensor<T> dx = dy;
                    const Tensor<T>& y = tape.out[i];
                    for (std::size_t j = 0; j < dx.v.size(); ++j)
                        dx.v[j] *= y.v[j] * (T(1) - y.v[j]);
                    accumulate(n.in0, std::move(dx));
                    break;
                }
                case NodeKind::SkipConcat: {
                    const Tensor<T>& a = tape.out[n.in0];
                    const Tensor<T>& b = tape.out[n.in1];
                    Tensor<T> da(a.n, a.c, a.h, a.w);
                    Tensor<T> db(b.n, b.c, b.h, b.w);
                    for (int ni = 0; ni < a.n; ++ni) {
                        const T* src = dy.image(ni);
                        std::copy(src, src + a.c * a.plane(), da.image(ni));
                        std::copy(src + a.c * a.plane(),
                                  src + (a.c + b.c) * a.plane(), db.image(ni));
                    }
                    accumulate(n.in0, std::move(da));
                    accumulate(n.in1, std::move(db));
                    break;
                }
                case NodeKind::ResidualAdd: {
                    Tensor<T> copy0 = dy;
                    Tensor<T> copy1 = dy;
                    accumulate(n.in0, std::move(copy0));
                    accumulate(n.in1, std::move(copy1));
                    break;
                }
                case NodeKind::Upsample:
                    accumulate(n.in0, ops::upsample2_backward(dy));
                    break;
                case NodeKind::Downsample:
                    accumulate(n.in0, ops::downsample2_backward(dy));
                    break;
            }
            if (i != 0) d[i] = Tensor<T>(); // release as we walk back
        }
        return d[0].v.empty() ? Tensor<T>(dy_like_input(tape)) : d[0];
    }

private:
    Tensor<T> dy_like_input(const Tape<T>& tape) const {
        const Tensor<T>& in = tape.out[0];
        return Tensor<T>(in.n, in.c, in.h, in.w);
    }

    NetworkDescription desc_;
    ParamStore<T> params_;
};

} // namespace endo
