#pragma once

#include <algorithm>
#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include "endo/core/tensor.hpp"
#include "endo/eval/metrics.hpp"
#include "endo/io/png_io.hpp"
#include "endo/nets/network.hpp"
#include "endo/train/checkpoint.hpp"
#include "endo/train/trainer.hpp"

namespace endo {

/// Runs the virtual-to-real translator on [0,1] images: converts to the
/// network range, forwards, and maps back to [0,1]. Deterministic; outputs
/// preserve input order.
template <typename T>
std::vector<Image> translate(const Network<T>& generator,
                             const std::vector<Image>& images,
                             int batch_size = 1) {
    if (images.empty()) return {};
    std::vector<Image> out;
    out.reserve(images.size());
    for (std::size_t start = 0; start < images.size();
         start += static_cast<std::size_t>(batch_size)) {
        std::size_t end = std::min(images.size(),
                                   start + static_cast<std::size_t>(batch_size));
        std::vector<Image> chunk(images.begin() + start, images.begin() + end);
        Tensor<T> batch = batch_from_images<T>(chunk);
        Tensor<T> translated = generator.forward(batch);
        for (Image& img : images_from_batch(translated))
            out.push_back(std::move(img));
    }
    return out;
}

/// Loads just the virtual-to-real generator (G) from a training
/// checkpoint, validating its parameter names and shapes.
template <typename T = float>
std::pair<ArchitectureSpec, Network<T>> load_generator(const Checkpoint& ckpt) {
    ArchitectureSpec spec;
    TrainingConfig cfg;
    LossWeights w;
    read_checkpoint_config(ckpt, spec, cfg, w);
    Network<T> g(build_translator(spec));
    detail::get_store(ckpt, "G", g.description(), g.params());
    return {spec, std::move(g)};
}

/// Median wall-clock seconds for a single-image forward pass, measured
/// after warm-up runs. Timing runs are serialized by construction.
template <typename T>
double benchmark_inference(const Network<T>& generator, const Image& image,
                           int runs = 20, int warmup = 3) {
    if (runs < 20) throw ParamError("benchmark_inference requires runs >= 20");
    Tensor<T> batch = batch_from_images<T>(std::vector<Image>{image});
    for (int i = 0; i < warmup; ++i) (void)generator.forward(batch);
    std::vector<double> samples;
    samples.reserve(runs);
    for (int i = 0; i < runs; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        (void)generator.forward(batch);
        auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    return n % 2 == 1 ? samples[n / 2]
                      : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

/// Tiles images row-major into one canvas with 2-pixel separators between
/// tiles (none at the borders). Rows must all have the same length and all
/// tiles the same shape.
inline Image make_grid(const std::vector<std::vector<Image>>& rows,
                       float separator_gray = 1.0f) {
    if (rows.empty() || rows.front().empty())
        throw ShapeError("export_grid: empty input");
    const std::size_t cols = rows.front().size();
    const Image& first = rows.front().front();
    for (const auto& row : rows) {
        if (row.size() != cols)
            throw ShapeError("export_grid: ragged rows (" +
                             std::to_string(row.size()) + " vs " +
                             std::to_string(cols) + " tiles)");
        for (const Image& img : row)
            if (!img.same_shape(first))
                throw ShapeError("export_grid: tiles differ in shape");
    }
    const int sep = 2;
    const int out_h = static_cast<int>(rows.size()) * first.height +
                      (static_cast<int>(rows.size()) - 1) * sep;
    const int out_w = static_cast<int>(cols) * first.width +
                      (static_cast<int>(cols) - 1) * sep;
    Image canvas(out_h, out_w, first.channels, separator_gray);
    for (std::size_t ry = 0; ry < rows.size(); ++ry)
        for (std::size_t rx = 0; rx < cols; ++rx) {
            const Image& tile = rows[ry][rx];
            const int oy = static_cast<int>(ry) * (first.height + sep);
            const int ox = static_cast<int>(rx) * (first.width + sep);
            for (int y = 0; y < tile.height; ++y)
                for (int x = 0; x < tile.width; ++x)
                    for (int c = 0; c < tile.channels; ++c)
                        canvas.at(oy + y, ox + x, c) = tile.at(y, x, c);
        }
    return canvas;
}

inline void export_grid(const std::vector<std::vector<Image>>& rows,
                        const std::string& path) {
    Image canvas = make_grid(rows);
    std::vector<std::uint8_t> rgb(canvas.data.size());
    for (std::size_t i = 0; i < canvas.data.size(); ++i)
        rgb[i] = quantize8(canvas.data[i]);
    write_png_rgb8(path, canvas.width, canvas.height, rgb);
}

/// Quantitative evaluation summary. The histogram distance and smoothness
/// ratio are stand-in metrics: translation quality proxies computed from
/// pixel statistics, labelled as such in the report.
struct EvalReport {
    std::string variant;
    double temporal_smoothness = 0.0;
    double color_histogram_distance = 0.0;
    double seconds_per_image = 0.0;
    std::vector<std::pair<std::string, std::string>> per_image; // input, output

    std::string to_string() const {
        std::ostringstream os;
        os.precision(8);
        os << "variant = " << variant << '\n'
           << "temporal_smoothness = " << temporal_smoothness << '\n'
           << "color_histogram_distance = " << color_histogram_distance << '\n'
           << "seconds_per_image = " << seconds_per_image << '\n'
           << "metric_kind = pixel-statistic proxies\n";
        return os.str();
    }

    void save(const std::string& report_path, const std::string& csv_path) const {
        std::ofstream rep(report_path, std::ios::binary);
        if (!rep) throw IoError("cannot write eval report: " + report_path);
        rep << to_string();
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw IoError("cannot write eval csv: " + csv_path);
        csv << "index,input,output\n";
        for (std::size_t i = 0; i < per_image.size(); ++i)
            csv << i << ',' << per_image[i].first << ',' << per_image[i].second
                << '\n';
    }
};

} // namespace endo
