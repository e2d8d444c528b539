#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "endo/core/error.hpp"

namespace endo {

/// H x W x C floating-point image, row-major with channels fastest.
/// Values are nominally in [0, 1] at dataset boundaries; conversion to the
/// network range [-1, 1] happens at the training boundary.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int h, int w, int c, float fill = 0.0f)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {
        if (h <= 0 || w <= 0 || c <= 0)
            throw ShapeError("image dimensions must be positive");
    }

    float& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * width;
    }
    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

/// Round-half-up quantization of a [0,1] value to one byte.
inline std::uint8_t quantize8(float v) {
    float c = std::clamp(v, 0.0f, 1.0f);
    int q = static_cast<int>(std::floor(c * 255.0f + 0.5f));
    return static_cast<std::uint8_t>(std::clamp(q, 0, 255));
}

inline float dequantize8(std::uint8_t b) {
    return static_cast<float>(b) / 255.0f;
}

/// Mean absolute difference over all pixels and channels.
inline double mean_abs_difference(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ShapeError("mean_abs_difference: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        sum += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
    return a.data.empty() ? 0.0 : sum / static_cast<double>(a.data.size());
}

/// RGB -> HSV. Hue in degrees [0, 360), saturation and value in [0, 1].
inline void rgb_to_hsv(float r, float g, float b,
                       float& h, float& s, float& v) {
    float mx = std::max({r, g, b});
    float mn = std::min({r, g, b});
    float d = mx - mn;
    v = mx;
    s = mx > 0.0f ? d / mx : 0.0f;
    if (d <= 0.0f) {
        h = 0.0f;
        return;
    }
    if (mx == r)
        h = 60.0f * std::fmod((g - b) / d + 6.0f, 6.0f);
    else if (mx == g)
        h = 60.0f * ((b - r) / d + 2.0f);
    else
        h = 60.0f * ((r - g) / d + 4.0f);
}

inline void hsv_to_rgb(float h, float s, float v,
                       float& r, float& g, float& b) {
    h = std::fmod(std::fmod(h, 360.0f) + 360.0f, 360.0f) / 60.0f;
    int i = static_cast<int>(h) % 6;
    float f = h - std::floor(h);
    float p = v * (1.0f - s);
    float q = v * (1.0f - s * f);
    float t = v * (1.0f - s * (1.0f - f));
    switch (i) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
}

/// Bilinear resample to (out_h, out_w).
inline Image resize_bilinear(const Image& src, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0) throw ShapeError("resize: target must be positive");
    Image out(out_h, out_w, src.channels);
    const float sy = static_cast<float>(src.height) / out_h;
    const float sx = static_cast<float>(src.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        float fy = (y + 0.5f) * sy - 0.5f;
        int y0 = static_cast<int>(std::floor(fy));
        float wy = fy - y0;
        int y0c = std::clamp(y0, 0, src.height - 1);
        int y1c = std::clamp(y0 + 1, 0, src.height - 1);
        for (int x = 0; x < out_w; ++x) {
            float fx = (x + 0.5f) * sx - 0.5f;
            int x0 = static_cast<int>(std::floor(fx));
            float wx = fx - x0;
            int x0c = std::clamp(x0, 0, src.width - 1);
            int x1c = std::clamp(x0 + 1, 0, src.width - 1);
            for (int c = 0; c < src.channels; ++c) {
                float v00 = src.at(y0c, x0c, c), v01 = src.at(y0c, x1c, c);
                float v10 = src.at(y1c, x0c, c), v11 = src.at(y1c, x1c, c);
                out.at(y, x, c) = (1 - wy) * ((1 - wx) * v00 + wx * v01) +
                                  wy * ((1 - wx) * v10 + wx * v11);
            }
        }
    }
    return out;
}

inline Image center_crop(const Image& src, int out_h, int out_w) {
    if (out_h > src.height || out_w > src.width)
        throw ShapeError("center_crop: target larger than source");
    Image out(out_h, out_w, src.channels);
    int oy = (src.height - out_h) / 2;
    int ox = (src.width - out_w) / 2;
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x)
            for (int c = 0; c < src.channels; ++c)
                out.at(y, x, c) = src.at(y + oy, x + ox, c);
    return out;
}

/// Scale-shortest-side-then-center-crop to a square target.
inline Image resize_center_crop(const Image& src, int target) {
    int short_side = std::min(src.height, src.width);
    int rh = static_cast<int>(std::lround(
        static_cast<double>(src.height) * target / short_side));
    int rw = static_cast<int>(std::lround(
        static_cast<double>(src.width) * target / short_side));
    rh = std::max(rh, target);
    rw = std::max(rw, target);
    Image scaled = resize_bilinear(src, rh, rw);
    return center_crop(scaled, target, target);
}

} // namespace endo
