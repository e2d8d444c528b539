#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "endo/io/manifest.hpp"
#include "endo/io/png_io.hpp"
#include "endo/render/raycast.hpp"

namespace endo {

/// Scripted camera trajectory: cubic (Catmull-Rom) spline through keyframe
/// positions, linear interpolation of look targets. Sampling includes both
/// path endpoints, so a reversed path yields the reversed sample sequence.
struct FlyThroughPath {
    struct Keyframe {
        Vec3 position;
        Vec3 look_target;
    };

    std::vector<Keyframe> keyframes;
    int samples_per_segment = 8;

    void validate() const {
        if (keyframes.size() < 2)
            throw ParamError("fly-through path needs >= 2 keyframes");
        if (samples_per_segment < 1)
            throw ParamError("samples_per_segment must be >= 1");
        for (std::size_t i = 1; i < keyframes.size(); ++i)
            if ((keyframes[i].position - keyframes[i - 1].position).norm() < 1e-12)
                throw ParamError("consecutive keyframe positions must be distinct");
    }

    FlyThroughPath reversed() const {
        FlyThroughPath out = *this;
        std::reverse(out.keyframes.begin(), out.keyframes.end());
        return out;
    }

    int sample_count() const {
        return static_cast<int>(keyframes.size() - 1) * samples_per_segment;
    }
};

namespace detail {

inline Vec3 catmull_rom(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                        const Vec3& p3, double t) {
    double t2 = t * t, t3 = t2 * t;
    return (p1 * 2.0 + (p2 - p0) * t +
            (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * t2 +
            (p1 * 3.0 - p0 - p2 * 3.0 + p3) * t3) * 0.5;
}

} // namespace detail

struct PathSample {
    Vec3 position;
    Vec3 look_target;
};

/// Interpolated camera samples along the path, endpoints included.
inline std::vector<PathSample> path_samples(const FlyThroughPath& path) {
    path.validate();
    const auto& kf = path.keyframes;
    const int segments = static_cast<int>(kf.size()) - 1;
    const int count = path.sample_count();
    std::vector<PathSample> out;
    out.reserve(count);

    auto key = [&](int i) -> const FlyThroughPath::Keyframe& {
        return kf[std::clamp(i, 0, segments)];
    };
    for (int k = 0; k < count; ++k) {
        double u = count == 1
                       ? 0.0
                       : static_cast<double>(k) * segments / (count - 1);
        int seg = std::min(static_cast<int>(u), segments - 1);
        double t = u - seg;
        PathSample s;
        s.position = detail::catmull_rom(key(seg - 1).position, key(seg).position,
                                         key(seg + 1).position,
                                         key(seg + 2).position, t);
        s.look_target = key(seg).look_target * (1.0 - t) +
                        key(seg + 1).look_target * t;
        out.push_back(s);
    }
    return out;
}

/// Renders one frame per path sample. All sample positions must lie inside
/// the volume bounding box.
inline std::vector<Image> fly_through(const CtVolume& vol,
                                      const FlyThroughPath& path,
                                      const TransferFunction& tf,
                                      const RenderParams& rp,
                                      double vertical_fov = 70.0,
                                      int image_size = 256) {
    auto samples = path_samples(path);
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!vol.contains(samples[i].position))
            throw PathError("fly-through sample " + std::to_string(i) +
                            " lies outside the volume bounding box");
    std::vector<Image> frames;
    frames.reserve(samples.size());
    for (const auto& s : samples) {
        Camera cam = Camera::look_at(s.position, s.look_target, vertical_fov,
                                     image_size, image_size);
        frames.push_back(render_view(vol, cam, tf, rp));
    }
    return frames;
}

inline void save_image_png(const Image& img, const std::string& path) {
    if (img.channels != 3)
        throw ShapeError("save_image_png expects a 3-channel image");
    std::vector<std::uint8_t> rgb(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i)
        rgb[i] = quantize8(img.data[i]);
    write_png_rgb8(path, img.width, img.height, rgb);
}

/// Writes frames as 8-bit RGB PNGs plus a manifest tagging them `virtual`.
/// Returns the manifest path.
inline std::string export_dataset(const std::vector<Image>& frames,
                                  const std::string& out_dir,
                                  const std::string& source = "fly_through") {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    std::vector<ManifestRecord> records;
    records.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05zu.png", i);
        save_image_png(frames[i], (fs::path(out_dir) / name).string());
        records.push_back({name, "virtual", source});
    }
    std::string manifest_path = (fs::path(out_dir) / "manifest.tsv").string();
    write_manifest(manifest_path, records);
    return manifest_path;
}

} // namespace endo
