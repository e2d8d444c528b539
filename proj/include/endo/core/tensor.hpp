#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "endo/core/error.hpp"
#include "endo/core/image.hpp"

namespace endo {

/// N x C x H x W batch tensor used by the networks. Channel-major per image
/// so convolution inner loops run over contiguous rows.
template <typename T>
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_, T fill = T(0))
        : n(n_), c(c_), h(h_), w(w_),
          v(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {
        if (n_ <= 0 || c_ <= 0 || h_ <= 0 || w_ <= 0)
            throw ShapeError("tensor dimensions must be positive");
    }

    std::size_t size() const { return v.size(); }
    std::size_t plane() const { return static_cast<std::size_t>(h) * w; }

    T* image(int ni) { return v.data() + static_cast<std::size_t>(ni) * c * plane(); }
    const T* image(int ni) const {
        return v.data() + static_cast<std::size_t>(ni) * c * plane();
    }
    T* channel(int ni, int ci) { return image(ni) + static_cast<std::size_t>(ci) * plane(); }
    const T* channel(int ni, int ci) const {
        return image(ni) + static_cast<std::size_t>(ci) * plane();
    }

    T& at(int ni, int ci, int y, int x) {
        return channel(ni, ci)[static_cast<std::size_t>(y) * w + x];
    }
    T at(int ni, int ci, int y, int x) const {
        return channel(ni, ci)[static_cast<std::size_t>(y) * w + x];
    }

    bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }
};

/// Packs [0,1] images into a [-1,1] network batch.
template <typename T>
Tensor<T> batch_from_images(const std::vector<Image>& images) {
    if (images.empty()) throw ShapeError("batch_from_images: empty batch");
    const Image& first = images.front();
    Tensor<T> out(static_cast<int>(images.size()), first.channels,
                  first.height, first.width);
    for (int ni = 0; ni < out.n; ++ni) {
        const Image& img = images[ni];
        if (!img.same_shape(first))
            throw ShapeError("batch_from_images: inconsistent image shapes");
        for (int ci = 0; ci < out.c; ++ci) {
            T* dst = out.channel(ni, ci);
            for (int y = 0; y < out.h; ++y)
                for (int x = 0; x < out.w; ++x)
                    dst[static_cast<std::size_t>(y) * out.w + x] =
                        T(2) * static_cast<T>(img.at(y, x, ci)) - T(1);
        }
    }
    return out;
}

/// Unpacks a [-1,1] batch back to clamped [0,1] images.
template <typename T>
std::vector<Image> images_from_batch(const Tensor<T>& batch) {
    std::vector<Image> out;
    out.reserve(batch.n);
    for (int ni = 0; ni < batch.n; ++ni) {
        Image img(batch.h, batch.w, batch.c);
        for (int ci = 0; ci < batch.c; ++ci) {
            const T* src = batch.channel(ni, ci);
            for (int y = 0; y < batch.h; ++y)
                for (int x = 0; x < batch.w; ++x) {
                    double v = (static_cast<double>(
                                    src[static_cast<std::size_t>(y) * batch.w + x]) +
                                1.0) * 0.5;
                    img.at(y, x, ci) = static_cast<float>(std::clamp(v, 0.0, 1.0));
                }
        }
        out.push_back(std::move(img));
    }
    return out;
}

} // namespace endo
