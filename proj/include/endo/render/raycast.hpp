#pragma once

#include <algorithm>
#include <cmath>

#include "endo/core/image.hpp"
#include "endo/render/camera.hpp"
#include "endo/render/transfer_function.hpp"
#include "endo/render/volume.hpp"

namespace endo {

struct ShadedSample {
    double r = 0, g = 0, b = 0;
    double alpha = 0; // step-corrected opacity
};

/// Shades one sample point: headlight Blinn-Phong on the central-difference
/// gradient normal, with distance falloff toward the camera. Exposed so
/// tests can reproduce a composited pixel independently.
inline ShadedSample shade_sample(const CtVolume& vol, const TransferFunction& tf,
                                 const RenderParams& rp, const Vec3& point,
                                 const Vec3& ray_dir, const Vec3& camera_pos,
                                 double step_size) {
    double scalar = vol.sample(point);
    Rgba base = tf.evaluate(scalar);
    ShadedSample out;
    if (base.a <= 0.0) return out;

    out.alpha = 1.0 - std::pow(1.0 - base.a,
                               step_size / rp.opacity_reference_step);

    Vec3 grad = vol.gradient(point);
    double gn = grad.norm();
    double diffuse = 0.0, spec = 0.0;
    if (gn > 1e-12) {
        Vec3 normal = grad / gn;
        // Two-sided: flip toward the viewer.
        if (normal.dot(ray_dir) > 0.0) normal = normal * -1.0;
        Vec3 light = ray_dir * -1.0; // headlight co-located with the camera
        double ndotl = std::max(0.0, normal.dot(light));
        diffuse = ndotl;
        // With light == view the Blinn half vector is the light itself.
        spec = ndotl > 0.0 ? std::pow(ndotl, rp.shininess) : 0.0;
    }
    double dist = (point - camera_pos).norm();
    double att = 1.0 / (1.0 + rp.light_falloff * dist * dist);
    double lit = rp.ambient + rp.diffuse * diffuse * att;
    out.r = std::clamp(base.r * lit + rp.specular * spec * att, 0.0, 1.0);
    out.g = std::clamp(base.g * lit + rp.specular * spec * att, 0.0, 1.0);
    out.b = std::clamp(base.b * lit + rp.specular * spec * att, 0.0, 1.0);
    return out;
}

namespace detail {

/// Ray / axis-aligned box intersection; returns false when the ray misses.
inline bool intersect_box(const Vec3& origin, const Vec3& dir, const Vec3& lo,
                          const Vec3& hi, double& t_enter, double& t_exit) {
    t_enter = 0.0;
    t_exit = std::numeric_limits<double>::max();
    const double o[3] = {origin.x, origin.y, origin.z};
    const double d[3] = {dir.x, dir.y, dir.z};
    const double l[3] = {lo.x, lo.y, lo.z};
    const double h[3] = {hi.x, hi.y, hi.z};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(d[i]) < 1e-15) {
            if (o[i] < l[i] || o[i] > h[i]) return false;
            continue;
        }
        double t0 = (l[i] - o[i]) / d[i];
        double t1 = (h[i] - o[i]) / d[i];
        if (t0 > t1) std::swap(t0, t1);
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
    }
    return t_enter <= t_exit;
}

} // namespace detail

/// Casts one ray and composites front to back. Returns RGB plus the final
/// accumulated opacity (before background compositing).
inline void cast_ray(const CtVolume& vol, const TransferFunction& tf,
                     const RenderParams& rp, const Vec3& origin,
                     const Vec3& dir, double out_rgba[4]) {
    double r = 0, g = 0, b = 0, acc = 0;
    double t0, t1;
    if (detail::intersect_box(origin, dir, vol.box_min(), vol.box_max(), t0, t1)) {
        for (double t = t0; t <= t1; t += rp.step_size) {
            Vec3 p = origin + dir * t;
            ShadedSample s =
                shade_sample(vol, tf, rp, p, dir, origin, rp.step_size);
            if (s.alpha <= 0.0) continue;
            double weight = (1.0 - acc) * s.alpha;
            r += weight * s.r;
            g += weight * s.g;
            b += weight * s.b;
            acc += weight;
            if (acc >= rp.termination) break;
        }
    }
    // Remaining transparency shows the background color.
    r += (1.0 - acc) * rp.background[0];
    g += (1.0 - acc) * rp.background[1];
    b += (1.0 - acc) * rp.background[2];
    out_rgba[0] = std::clamp(r, 0.0, 1.0);
    out_rgba[1] = std::clamp(g, 0.0, 1.0);
    out_rgba[2] = std::clamp(b, 0.0, 1.0);
    out_rgba[3] = acc;
}

/// Perspective ray casting of the volume from `camera`. Pure function of
/// its inputs; rows are evaluated independently.
inline Image render_view(const CtVolume& vol, const Camera& camera,
                         const TransferFunction& tf, const RenderParams& rp) {
    if (rp.step_size <= 0) throw ParamError("render step_size must be positive");
    Camera cam = camera;
    cam.orthonormalize();
    Image img(cam.image_height, cam.image_width, 3);

#pragma omp parallel for schedule(static)
    for (int py = 0; py < cam.image_height; ++py) {
        for (int px = 0; px < cam.image_width; ++px) {
            double rgba[4];
            cast_ray(vol, tf, rp, cam.position, cam.ray_direction(px, py), rgba);
            img.at(py, px, 0) = static_cast<float>(rgba[0]);
            img.at(py, px, 1) = static_cast<float>(rgba[1]);
            img.at(py, px, 2) = static_cast<float>(rgba[2]);
        }
    }
    return img;
}

/// Accumulated-opacity map of the same view; used by geometry oracles to
/// find silhouettes without depending on shading constants.
inline Image render_opacity(const CtVolume& vol, const Camera& camera,
                            const TransferFunction& tf, const RenderParams& rp) {
    Camera cam = camera;
    cam.orthonormalize();
    Image img(cam.image_height, cam.image_width, 1);
#pragma omp parallel for schedule(static)
    for (int py = 0; py < cam.image_height; ++py) {
        for (int px = 0; px < cam.image_width; ++px) {
            double rgba[4];
            cast_ray(vol, tf, rp, cam.position, cam.ray_direction(px, py), rgba);
            img.at(py, px, 0) = static_cast<float>(rgba[3]);
        }
    }
    return img;
}

} // namespace endo
