#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "endo/core/tensor.hpp"

namespace endo::ops {

inline int floor_div(int a, int b) {
    int q = a / b, r = a % b;
    return r != 0 && ((r < 0) != (b < 0)) ? q - 1 : q;
}
inline int ceil_div(int a, int b) { return -floor_div(-a, b); }

inline int conv_out_size(int in, int kernel, int stride, int pad) {
    int out = (in + 2 * pad - kernel) / stride + 1;
    if (out < 1) throw ShapeError("convolution output would be empty");
    return out;
}

inline int tconv_out_size(int in, int kernel, int stride, int pad) {
    int out = (in - 1) * stride - 2 * pad + kernel;
    if (out < 1) throw ShapeError("transposed convolution output would be empty");
    return out;
}

/// Direct convolution. Weights are [oc][ic][ky][kx], bias [oc].
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const std::vector<T>& w,
                         const std::vector<T>& b, int oc_count, int kernel,
                         int stride, int pad) {
    const int oh = conv_out_size(x.h, kernel, stride, pad);
    const int ow = conv_out_size(x.w, kernel, stride, pad);
    Tensor<T> y(x.n, oc_count, oh, ow);

#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < x.n; ++n) {
        for (int oc = 0; oc < oc_count; ++oc) {
            T* out = y.channel(n, oc);
            const T bias = b[oc];
            for (std::size_t i = 0; i < y.plane(); ++i) out[i] = bias;
            for (int ic = 0; ic < x.c; ++ic) {
                const T* in = x.channel(n, ic);
                const T* wp = w.data() +
                              ((static_cast<std::size_t>(oc) * x.c + ic) * kernel) * kernel;
                for (int ky = 0; ky < kernel; ++ky) {
                    const int oy0 = std::max(0, ceil_div(pad - ky, stride));
                    const int oy1 = std::min(oh - 1,
                                             floor_div(x.h - 1 + pad - ky, stride));
                    for (int kx = 0; kx < kernel; ++kx) {
                        const T wv = wp[ky * kernel + kx];
                        if (wv == T(0)) continue;
                        const int ox0 = std::max(0, ceil_div(pad - kx, stride));
                        const int ox1 = std::min(ow - 1,
                                                 floor_div(x.w - 1 + pad - kx, stride));
                        for (int oy = oy0; oy <= oy1; ++oy) {
                            const int iy = oy * stride - pad + ky;
                            T* orow = out + static_cast<std::size_t>(oy) * ow;
                            const T* irow = in + static_cast<std::size_t>(iy) * x.w -
                                            pad + kx;
                            for (int ox = ox0; ox <= ox1; ++ox)
                                orow[ox] += wv * irow[ox * stride];
                        }
                    }
                }
            }
        }
    }
    return y;
}

/// Gradient w.r.t. the convolution input.
template <typename T>
Tensor<T> conv2d_backward_input(const Tensor<T>& dy, const std::vector<T>& w,
                                int ic_count, int in_h, int in_w, int kernel,
                                int stride, int pad) {
    Tensor<T> dx(dy.n, ic_count, in_h, in_w);
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < dy.n; ++n) {
        for (int ic = 0; ic < ic_count; ++ic) {
            T* out = dx.channel(n, ic);
            for (int oc = 0; oc < dy.c; ++oc) {
                const T* g = dy.channel(n, oc);
                const T* wp = w.data() +
                              ((static_cast<std::size_t>(oc) * ic_count + ic) * kernel) *
                                  kernel;
                for (int ky = 0; ky < kernel; ++ky) {
                    for (int kx = 0; kx < kernel; ++kx) {
                        const T wv = wp[ky * kernel + kx];
                        if (wv == T(0)) continue;
                        for (int iy = 0; iy < in_h; ++iy) {
                            const int num_y = iy + pad - ky;
                            if (num_y % stride != 0) continue;
                            const int oy = num_y / stride;
                            if (oy < 0 || oy >= dy.h) continue;
                            const T* grow = g + static_cast<std::size_t>(oy) * dy.w;
                            T* orow = out + static_cast<std::size_t>(iy) * in_w;
                            for (int ix = 0; ix < in_w; ++ix) {
                                const int num_x = ix + pad - kx;
                                if (num_x % stride != 0) continue;
                                const int ox = num_x / stride;
                                if (ox < 0 || ox >= dy.w) continue;
                                orow[ix] += wv * grow[ox];
                            }
                        }
                    }
                }
            }
        }
    }
    return dx;
}

/// Gradients w.r.t. convolution weights and bias, accumulated into dw/db.
template <typename T>
void conv2d_backward_params(const Tensor<T>& x, const Tensor<T>& dy, int kernel,
                            int stride, int pad, std::vector<T>& dw,
                            std::vector<T>& db) {
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < dy.c; ++oc) {
        T bsum = T(0);
        for (int n = 0; n < dy.n; ++n) {
            const T* g = dy.channel(n, oc);
            for (std::size_t i = 0; i < dy.plane(); ++i) bsum += g[i];
            for (int ic = 0; ic < x.c; ++ic) {
                const T* in = x.channel(n, ic);
                T* wp = dw.data() +
                        ((static_cast<std::size_t>(oc) * x.c + ic) * kernel) * kernel;
                for (int ky = 0; ky < kernel; ++ky) {
                    const int oy0 = std::max(0, ceil_div(pad - ky, stride));
                    const int oy1 = std::min(dy.h - 1,
                                             floor_div(x.h - 1 + pad - ky, stride));
                    for (int kx = 0; kx < kernel; ++kx) {
                        const int ox0 = std::max(0, ceil_div(pad - kx, stride));
                        const int ox1 = std::min(dy.w - 1,
                                                 floor_div(x.w - 1 + pad - kx, stride));
                        T sum = T(0);
                        for (int oy = oy0; oy <= oy1; ++oy) {
                            const int iy = oy * stride - pad + ky;
                            const T* grow = g + static_cast<std::size_t>(oy) * dy.w;
                            const T* irow = in + static_cast<std::size_t>(iy) * x.w -
                                            pad + kx;
                            for (int ox = ox0; ox <= ox1; ++ox)
                                sum += grow[ox] * irow[ox * stride];
                        }
                        wp[ky * kernel + kx] += sum;
                    }
                }
            }
        }
        db[oc] += bsum;
    }
}

/// Transposed convolution (gather form). Weights are [ic][oc][ky][kx].
template <typename T>
Tensor<T> tconv_forward(const Tensor<T>& x, const std::vector<T>& w,
                        const std::vector<T>& b, int oc_count, int kernel,
                        int stride, int pad) {
    const int oh = tconv_out_size(x.h, kernel, stride, pad);
    const int ow = tconv_out_size(x.w, kernel, stride, pad);
    Tensor<T> y(x.n, oc_count, oh, ow);
    const std::size_t kk = static_cast<std::size_t>(kernel) * kernel;

#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < x.n; ++n) {
        for (int oc = 0; oc < oc_count; ++oc) {
            T* out = y.channel(n, oc);
            const T bias = b[oc];
            for (std::size_t i = 0; i < y.plane(); ++i) out[i] = bias;
            for (int ic = 0; ic < x.c; ++ic) {
                const T* in = x.channel(n, ic);
                const T* wp = w.data() +
                              (static_cast<std::size_t>(ic) * oc_count + oc) * kk;
                for (int ky = 0; ky < kernel; ++ky) {
                    for (int kx = 0; kx < kernel; ++kx) {
                        const T wv = wp[ky * kernel + kx];
                        if (wv == T(0)) continue;
                        // y[oy] receives x[(oy + pad - ky) / stride] when divisible.
                        for (int iy = 0; iy < x.h; ++iy) {
                            const int oy = iy * stride - pad + ky;
                            if (oy < 0 || oy >= oh) continue;
                            const T* irow = in + static_cast<std::size_t>(iy) * x.w;
                            T* orow = out + static_cast<std::size_t>(oy) * ow;
                            for (int ix = 0; ix < x.w; ++ix) {
                                const int ox = ix * stride - pad + kx;
                                if (ox < 0 || ox >= ow) continue;
                                orow[ox] += wv * irow[ix];
                            }
                        }
                    }
                }
            }
        }
    }
    return y;
}

template <typename T>
Tensor<T> tconv_backward_input(const Tensor<T>& dy, const std::vector<T>& w,
                               int ic_count, int in_h, int in_w, int kernel,
                               int stride, int pad) {
    Tensor<T> dx(dy.n, ic_count, in_h, in_w);
    const std::size_t kk = static_cast<std::size_t>(kernel) * kernel;
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < dy.n; ++n) {
        for (int ic = 0; ic < ic_count; ++ic) {
            T* out = dx.channel(n, ic);
            for (int oc = 0; oc < dy.c; ++oc) {
                const T* g = dy.channel(n, oc);
                const T* wp = w.data() +
                              (static_cast<std::size_t>(ic) * dy.c + oc) * kk;
                for (int ky = 0; ky < kernel; ++ky) {
                    for (int kx = 0; kx < kernel; ++kx) {
                        const T wv = wp[ky * kernel + kx];
                        if (wv == T(0)) continue;
                        for (int iy = 0; iy < in_h; ++iy) {
                            const int oy = iy * stride - pad + ky;
                            if (oy < 0 || oy >= dy.h) continue;
                            T* orow = out + static_cast<std::size_t>(iy) * in_w;
                            const T* grow = g + static_cast<std::size_t>(oy) * dy.w;
                            for (int ix = 0; ix < in_w; ++ix) {
                                const int ox = ix * stride - pad + kx;
                                if (ox < 0 || ox >= dy.w) continue;
                                orow[ix] += wv * grow[ox];
                            }
                        }
                    }
                }
            }
        }
    }
    return dx;
}

template <typename T>
void tconv_backward_params(const Tensor<T>& x, const Tensor<T>& dy, int kernel,
                           int stride, int pad, std::vector<T>& dw,
                           std::vector<T>& db) {
    const std::size_t kk = static_cast<std::size_t>(kernel) * kernel;
#pragma omp parallel for schedule(static)
    for (int ic = 0; ic < x.c; ++ic) {
        for (int n = 0; n < x.n; ++n) {
            const T* in = x.channel(n, ic);
            for (int oc = 0; oc < dy.c; ++oc) {
                const T* g = dy.channel(n, oc);
                T* wp = dw.data() + (static_cast<std::size_t>(ic) * dy.c + oc) * kk;
                for (int ky = 0; ky < kernel; ++ky) {
                    for (int kx = 0; kx < kernel; ++kx) {
                        T sum = T(0);
                        for (int iy = 0; iy < x.h; ++iy) {
                            const int oy = iy * stride - pad + ky;
                            if (oy < 0 || oy >= dy.h) continue;
                            const T* irow = in + static_cast<std::size_t>(iy) * x.w;
                            const T* grow = g + static_cast<std::size_t>(oy) * dy.w;
                            for (int ix = 0; ix < x.w; ++ix) {
                                const int ox = ix * stride - pad + kx;
                                if (ox < 0 || ox >= dy.w) continue;
                                sum += irow[ix] * grow[ox];
                            }
                        }
                        wp[ky * kernel + kx] += sum;
                    }
                }
            }
        }
    }
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < dy.c; ++oc) {
        T bsum = T(0);
        for (int n = 0; n < dy.n; ++n) {
            const T* g = dy.channel(n, oc);
            for (std::size_t i = 0; i < dy.plane(); ++i) bsum += g[i];
        }
        db[oc] += bsum;
    }
}

inline constexpr double kInstanceNormEps = 1e-8;

/// Per-image, per-channel normalization with learned scale and offset.
/// Statistics are accumulated in double; mean and inverse standard
/// deviation are written to `mean` / `inv_std` (size n*c) for the backward
/// pass and for test inspection.
template <typename T>
Tensor<T> instance_norm_forward(const Tensor<T>& x, const std::vector<T>& scale,
                                const std::vector<T>& offset,
                                std::vector<T>& mean, std::vector<T>& inv_std) {
    Tensor<T> y(x.n, x.c, x.h, x.w);
    mean.assign(static_cast<std::size_t>(x.n) * x.c, T(0));
    inv_std.assign(static_cast<std::size_t>(x.n) * x.c, T(0));
    const std::size_t m = x.plane();
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < x.n; ++n) {
        for (int c = 0; c < x.c; ++c) {
            const T* in = x.channel(n, c);
            double sum = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                sum += static_cast<double>(in[i]);
            }
            const double mu = sum / static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double d = static_cast<double>(in[i]) - mu;
                sq += d * d;
            }
            const double var = sq / static_cast<double>(m);
            const double inv = 1.0 / std::sqrt(var + kInstanceNormEps);
            mean[static_cast<std::size_t>(n) * x.c + c] = static_cast<T>(mu);
            inv_std[static_cast<std::size_t>(n) * x.c + c] = static_cast<T>(inv);
            const T g = scale[c], b = offset[c];
            T* out = y.channel(n, c);
            for (std::size_t i = 0; i < m; ++i)
                out[i] = g * static_cast<T>((static_cast<double>(in[i]) - mu) * inv) + b;
        }
    }
    return y;
}

template <typename T>
Tensor<T> instance_norm_backward(const Tensor<T>& x, const Tensor<T>& dy,
                                 const std::vector<T>& scale,
                                 const std::vector<T>& mean,
                                 const std::vector<T>& inv_std,
                                 std::vector<T>& dscale, std::vector<T>& doffset) {
    Tensor<T> dx(x.n, x.c, x.h, x.w);
    const std::size_t m = x.plane();
    // Channel parameter gradients are reduced serially per channel so the
    // result does not depend on thread count.
    for (int c = 0; c < x.c; ++c) {
        double gsum = 0.0, bsum = 0.0;
        for (int n = 0; n < x.n; ++n) {
            const T* in = x.channel(n, c);
            const T* g = dy.channel(n, c);
            const double mu = mean[static_cast<std::size_t>(n) * x.c + c];
            const double inv = inv_std[static_cast<std::size_t>(n) * x.c + c];
            for (std::size_t i = 0; i < m; ++i) {
                const double xhat = (static_cast<double>(in[i]) - mu) * inv;
                gsum += static_cast<double>(g[i]) * xhat;
                bsum += static_cast<double>(g[i]);
            }
        }
        dscale[c] += static_cast<T>(gsum);
        doffset[c] += static_cast<T>(bsum);
    }
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < x.n; ++n) {
        for (int c = 0; c < x.c; ++c) {
            const T* in = x.channel(n, c);
            const T* g = dy.channel(n, c);
            T* out = dx.channel(n, c);
            const double mu = mean[static_cast<std::size_t>(n) * x.c + c];
            const double inv = inv_std[static_cast<std::size_t>(n) * x.c + c];
            const double sc = static_cast<double>(scale[c]);
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double xhat = (static_cast<double>(in[i]) - mu) * inv;
                sum_dy += static_cast<double>(g[i]);
                sum_dy_xhat += static_cast<double>(g[i]) * xhat;
            }
            const double md = static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double xhat = (static_cast<double>(in[i]) - mu) * inv;
                out[i] = static_cast<T>(
                    sc * inv / md *
                    (md * static_cast<double>(g[i]) - sum_dy - xhat * sum_dy_xhat));
            }
        }
    }
    return dx;
}

template <typename T>
Tensor<T> concat_forward(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.n != b.n || a.h != b.h || a.w != b.w)
        throw ShapeError("skip_concat spatial/batch mismatch: " +
                         std::to_string(a.h) + "x" + std::to_string(a.w) +
                         " vs " + std::to_string(b.h) + "x" + std::to_string(b.w));
    Tensor<T> y(a.n, a.c + b.c, a.h, a.w);
    for (int n = 0; n < a.n; ++n) {
        std::copy(a.image(n), a.image(n) + a.c * a.plane(), y.image(n));
        std::copy(b.image(n), b.image(n) + b.c * b.plane(),
                  y.image(n) + a.c * a.plane());
    }
    return y;
}

template <typename T>
Tensor<T> upsample2_forward(const Tensor<T>& x) {
    Tensor<T> y(x.n, x.c, x.h * 2, x.w * 2);
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < x.c; ++c) {
            const T* in = x.channel(n, c);
            T* out = y.channel(n, c);
            for (int iy = 0; iy < x.h; ++iy)
                for (int ix = 0; ix < x.w; ++ix) {
                    const T v = in[static_cast<std::size_t>(iy) * x.w + ix];
                    T* o = out + (static_cast<std::size_t>(iy) * 2) * y.w + ix * 2;
                    o[0] = v;
                    o[1] = v;
                    o[y.w] = v;
                    o[y.w + 1] = v;
                }
        }
    return y;
}

template <typename T>
Tensor<T> upsample2_backward(const Tensor<T>& dy) {
    Tensor<T> dx(dy.n, dy.c, dy.h / 2, dy.w / 2);
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < dy.n; ++n)
        for (int c = 0; c < dy.c; ++c) {
            const T* g = dy.channel(n, c);
            T* out = dx.channel(n, c);
            for (int iy = 0; iy < dx.h; ++iy)
                for (int ix = 0; ix < dx.w; ++ix) {
                    const T* gi = g + (static_cast<std::size_t>(iy) * 2) * dy.w + ix * 2;
                    out[static_cast<std::size_t>(iy) * dx.w + ix] =
                        gi[0] + gi[1] + gi[dy.w] + gi[dy.w + 1];
                }
        }
    return dx;
}

template <typename T>
Tensor<T> downsample2_forward(const Tensor<T>& x) {
    if (x.h % 2 != 0 || x.w % 2 != 0)
        throw ShapeError("downsample requires even spatial size");
    Tensor<T> y(x.n, x.c, x.h / 2, x.w / 2);
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < x.c; ++c) {
            const T* in = x.channel(n, c);
            T* out = y.channel(n, c);
            for (int oy = 0; oy < y.h; ++oy)
                for (int ox = 0; ox < y.w; ++ox) {
                    const T* i0 = in + (static_cast<std::size_t>(oy) * 2) * x.w + ox * 2;
                    out[static_cast<std::size_t>(oy) * y.w + ox] =
                        (i0[0] + i0[1] + i0[x.w] + i0[x.w + 1]) / T(4);
                }
        }
    return y;
}

template <typename T>
Tensor<T> downsample2_backward(const Tensor<T>& dy) {
    Tensor<T> dx(dy.n, dy.c, dy.h * 2, dy.w * 2);
    for (int n = 0; n < dy.n; ++n)
        for (int c = 0; c < dy.c; ++c) {
            const T* g = dy.channel(n, c);
            T* out = dx.channel(n, c);
            for (int oy = 0; oy < dy.h; ++oy)
                for (int ox = 0; ox < dy.w; ++ox) {
                    const T v = g[static_cast<std::size_t>(oy) * dy.w + ox] / T(4);
                    T* o = out + (static_cast<std::size_t>(oy) * 2) * dx.w + ox * 2;
                    o[0] = v;
                    o[1] = v;
                    o[dx.w] = v;
                    o[dx.w + 1] = v;
                }
        }
    return dx;
}

} // namespace endo::ops
