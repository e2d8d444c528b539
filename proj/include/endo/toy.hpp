#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "endo/core/rng.hpp"
#include "endo/data/image_io.hpp"
#include "endo/io/manifest.hpp"
#include "endo/render/fly_through.hpp"
#include "endo/render/phantom.hpp"

namespace endo::toy {

/// Tube phantom used by the bundled two-domain toy set.
inline Phantom make_toy_volume(int size = 64) {
    PhantomParams p;
    p.radius = size * 0.22;
    p.wall_thickness = size * 0.12;
    return make_phantom(PhantomKind::Tube, {size, size, size}, p);
}

/// Renders `count` interior views of the tube at varying depths and lateral
/// offsets: the virtual domain of the toy set.
inline std::vector<Image> render_virtual_frames(const Phantom& phantom, int count,
                                                int image_size,
                                                std::uint64_t seed) {
    const CtVolume& vol = phantom.volume;
    const double size = vol.dims()[2] * vol.spacing()[2];
    const double lumen = phantom.info.params.radius * vol.spacing()[0] * 0.55;
    Rng rng = Rng::derive(seed, 31);
    RenderParams rp;
    rp.step_size = 0.5 * vol.spacing()[0];
    TransferFunction tf = TransferFunction::colon_default();
    Vec3 center = vol.center();

    std::vector<Image> frames;
    frames.reserve(count);
    for (int i = 0; i < count; ++i) {
        double z = size * (0.15 + 0.55 * rng.next_uniform());
        double ang = 2.0 * 3.14159265358979 * rng.next_uniform();
        double rad = lumen * rng.next_uniform();
        Vec3 pos{center.x + rad * std::cos(ang), center.y + rad * std::sin(ang), z};
        double ang2 = 2.0 * 3.14159265358979 * rng.next_uniform();
        double rad2 = lumen * 0.8 * rng.next_uniform();
        Vec3 target{center.x + rad2 * std::cos(ang2),
                    center.y + rad2 * std::sin(ang2),
                    z + size * (0.2 + 0.2 * rng.next_uniform())};
        Camera cam = Camera::look_at(pos, target, 70.0, image_size, image_size);
        frames.push_back(render_view(vol, cam, tf, rp));
    }
    return frames;
}

/// Maps one rendered frame into the toy "real" appearance: a hue rotation
/// toward warm red, boosted saturation, a mild gamma lift and speckle
/// noise.
inline Image realify_frame(const Image& src, Rng& rng) {
    Image out(src.height, src.width, 3);
    for (std::size_t p = 0; p < src.pixel_count(); ++p) {
        float r = src.data[3 * p], g = src.data[3 * p + 1], b = src.data[3 * p + 2];
        float h, s, v;
        rgb_to_hsv(r, g, b, h, s, v);
        h = h - 28.0f;
        s = std::min(1.0f, s * 1.7f + 0.12f);
        v = std::pow(v, 0.85f);
        hsv_to_rgb(h, s, v, r, g, b);
        float noise = static_cast<float>(rng.next_uniform() - 0.5) * 0.08f;
        out.data[3 * p] = std::clamp(r + noise, 0.0f, 1.0f);
        out.data[3 * p + 1] = std::clamp(g + noise * 0.7f, 0.0f, 1.0f);
        out.data[3 * p + 2] = std::clamp(b + noise * 0.7f, 0.0f, 1.0f);
    }
    return out;
}

struct ToyDataset {
    std::vector<Image> virtual_images;
    std::vector<Image> real_images;
};

/// Deterministic two-domain toy set: tube fly-through renders as domain V,
/// and the warm-shifted noisy variants of a disjoint batch of renders as
/// domain R. No image appears in both domains.
inline ToyDataset make_toy_dataset(int count_per_domain = 200,
                                   int image_size = 64,
                                   std::uint64_t seed = 7) {
    Phantom phantom = make_toy_volume();
    ToyDataset ds;
    ds.virtual_images =
        render_virtual_frames(phantom, count_per_domain, image_size, seed);
    std::vector<Image> base =
        render_virtual_frames(phantom, count_per_domain, image_size, seed + 1);
    Rng noise = Rng::derive(seed, 32);
    ds.real_images.reserve(base.size());
    for (const Image& img : base) ds.real_images.push_back(realify_frame(img, noise));
    return ds;
}

/// Writes the toy set to <dir>/virtual and <dir>/real with manifests.
inline void write_toy_dataset(const std::string& dir, const ToyDataset& ds) {
    namespace fs = std::filesystem;
    for (const char* domain : {"virtual", "real"}) {
        fs::create_directories(fs::path(dir) / domain);
        const auto& images = std::string(domain) == "virtual" ? ds.virtual_images
                                                              : ds.real_images;
        std::vector<ManifestRecord> records;
        for (std::size_t i = 0; i < images.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "%s_%05zu.png", domain, i);
            save_image(images[i], (fs::path(dir) / domain / name).string());
            records.push_back({name, domain, "toy"});
        }
        write_manifest((fs::path(dir) / domain / "manifest.tsv").string(),
                       records);
    }
}

} // namespace endo::toy
