#pragma once

#include <string>

#include "endo/core/image.hpp"
#include "endo/io/png_io.hpp"

namespace endo {

struct LoadOptions {
    /// When > 0, scale the shorter side to this many pixels and center-crop
    /// to a square.
    int resize_to = 0;
};

/// 8-bit RGB file -> float image in [0,1]. Grayscale files are replicated
/// to three channels by the decoder.
inline Image load_image(const std::string& path, const LoadOptions& opts = {}) {
    int w = 0, h = 0;
    std::vector<std::uint8_t> rgb;
    read_png_rgb8(path, w, h, rgb);
    Image img(h, w, 3);
    for (std::size_t i = 0; i < rgb.size(); ++i)
        img.data[i] = dequantize8(rgb[i]);
    if (opts.resize_to > 0 &&
        (img.height != opts.resize_to || img.width != opts.resize_to))
        img = resize_center_crop(img, opts.resize_to);
    return img;
}

/// Float image in [0,1] -> 8-bit RGB file, round-half-up quantization.
inline void save_image(const Image& img, const std::string& path) {
    if (img.channels != 3)
        throw ShapeError("save_image expects 3 channels, got " +
                         std::to_string(img.channels));
    std::vector<std::uint8_t> rgb(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i)
        rgb[i] = quantize8(img.data[i]);
    write_png_rgb8(path, img.width, img.height, rgb);
}

} // namespace endo
