#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "endo/core/image.hpp"

namespace endo {

/// Ratio of translated to source frame-to-frame change: the mean over
/// consecutive pairs of MAD(out_t, out_{t+1}) / max(MAD(in_t, in_{t+1}),
/// 1e-6). Identity translation gives exactly 1; a constant output gives 0;
/// values near 1 mean the translation amplifies no temporal change.
inline double temporal_smoothness(const std::vector<Image>& input_seq,
                                  const std::vector<Image>& output_seq) {
    if (input_seq.size() != output_seq.size())
        throw ShapeError("temporal_smoothness: sequence length mismatch (" +
                         std::to_string(input_seq.size()) + " vs " +
                         std::to_string(output_seq.size()) + ")");
    if (input_seq.size() < 2)
        throw ShapeError("temporal_smoothness needs sequences of length >= 2");
    double sum = 0.0;
    const std::size_t pairs = input_seq.size() - 1;
    for (std::size_t t = 0; t + 1 < input_seq.size(); ++t) {
        double in_mad = mean_abs_difference(input_seq[t], input_seq[t + 1]);
        double out_mad = mean_abs_difference(output_seq[t], output_seq[t + 1]);
        sum += out_mad / std::max(in_mad, 1e-6);
    }
    return sum / static_cast<double>(pairs);
}

/// Mean normalized per-channel histogram of an image set.
inline std::vector<std::vector<double>> mean_channel_histograms(
    const std::vector<Image>& set, int bins) {
    if (set.empty()) throw DatasetError("histogram of an empty image set");
    if (bins < 8) throw ParamError("histogram bins must be >= 8 per channel");
    const int channels = set.front().channels;
    std::vector<std::vector<double>> hist(channels,
                                          std::vector<double>(bins, 0.0));
    for (const Image& img : set) {
        if (img.channels != channels)
            throw ShapeError("histogram: images disagree on channel count");
        for (std::size_t p = 0; p < img.pixel_count(); ++p)
            for (int c = 0; c < channels; ++c) {
                float v = img.data[p * channels + c];
                int b = std::clamp(static_cast<int>(v * bins), 0, bins - 1);
                hist[c][b] += 1.0;
            }
    }
    for (auto& h : hist) {
        double total = 0.0;
        for (double v : h) total += v;
        if (total > 0)
            for (double& v : h) v /= total;
    }
    return hist;
}

/// L1 distance between the mean per-channel histograms of two sets,
/// averaged over channels so the range is [0, 2] regardless of channel
/// count (2 = disjoint supports in every channel).
inline double color_histogram_distance(const std::vector<Image>& set_a,
                                       const std::vector<Image>& set_b,
                                       int bins = 32) {
    auto ha = mean_channel_histograms(set_a, bins);
    auto hb = mean_channel_histograms(set_b, bins);
    if (ha.size() != hb.size())
        throw ShapeError("histogram distance: channel count mismatch");
    double sum = 0.0;
    for (std::size_t c = 0; c < ha.size(); ++c)
        for (int b = 0; b < bins; ++b)
            sum += std::abs(ha[c][b] - hb[c][b]);
    return sum / static_cast<double>(ha.size());
}

} // namespace endo
