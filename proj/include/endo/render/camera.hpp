#pragma once

#include <cmath>
#include <numbers>

#include "endo/render/volume.hpp"

namespace endo {

/// Pinhole camera. `forward` and `up` are re-orthonormalized on
/// construction; `vertical_fov` is in degrees.
struct Camera {
    Vec3 position;
    Vec3 forward{0, 0, 1};
    Vec3 up{0, 1, 0};
    double vertical_fov = 70.0;
    int image_width = 256;
    int image_height = 256;

    static Camera look_at(const Vec3& position, const Vec3& target,
                          double vertical_fov = 70.0, int width = 256,
                          int height = 256) {
        Camera cam;
        cam.position = position;
        cam.forward = (target - position).normalized();
        // Global up hint, with a fallback when looking straight along it.
        Vec3 hint{0, 0, 1};
        if (std::abs(cam.forward.dot(hint)) > 0.98) hint = {0, 1, 0};
        Vec3 right = cam.forward.cross(hint).normalized();
        cam.up = right.cross(cam.forward).normalized();
        cam.vertical_fov = vertical_fov;
        cam.image_width = width;
        cam.image_height = height;
        return cam;
    }

    /// Re-orthonormalizes (forward, up) and validates the result.
    void orthonormalize() {
        forward = forward.normalized();
        Vec3 right = forward.cross(up);
        if (right.norm() < 1e-9)
            throw ParamError("camera up is parallel to forward");
        right = right.normalized();
        up = right.cross(forward).normalized();
        if (std::abs(forward.dot(up)) > 1e-6)
            throw ParamError("camera basis failed to orthonormalize");
    }

    /// World-space unit ray direction through pixel center (px, py).
    /// px runs left to right, py top to bottom.
    Vec3 ray_direction(int px, int py) const {
        double tan_half = std::tan(vertical_fov * std::numbers::pi / 360.0);
        double aspect = static_cast<double>(image_width) / image_height;
        double ndc_x = (2.0 * (px + 0.5) / image_width - 1.0) * tan_half * aspect;
        double ndc_y = (1.0 - 2.0 * (py + 0.5) / image_height) * tan_half;
        Vec3 right = forward.cross(up).normalized();
        return (forward + right * ndc_x + up * ndc_y).normalized();
    }
};

/// Ray-casting parameters. Opacity from the transfer function is defined
/// per `opacity_reference_step` of ray length and corrected for the actual
/// step, so halving the step does not double the accumulated opacity.
struct RenderParams {
    double step_size = 0.5;             // mm
    double opacity_reference_step = 1.0; // mm
    double termination = 0.99;          // early ray termination threshold
    double background[3] = {0.0, 0.0, 0.0};
    double ambient = 0.1;
    double diffuse = 0.7;
    double specular = 0.2;
    double shininess = 20.0;
    double light_falloff = 0.004;       // headlight 1/(1 + k d^2), per mm^2
    double gradient_epsilon_scale = 1.0; // central-difference offset, in voxels
};

} // namespace endo
