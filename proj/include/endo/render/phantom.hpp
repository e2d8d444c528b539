#pragma once

#include <array>
#include <cmath>
#include <string>

#include "endo/render/volume.hpp"

namespace endo {

enum class PhantomKind { Sphere, Tube, Torus };

/// Two-material test volumes: air is -1000 HU, wall tissue is +40 HU.
/// Sphere: centered ball of `radius` voxels. With interior_air=false the
///   ball is solid tissue in an air background (silhouette target); with
///   interior_air=true it is an air cavity inside solid tissue (voxel-count
///   target).
/// Tube: air lumen of `radius` along the z axis through the volume center,
///   wrapped in a tissue wall of `wall_thickness`, air outside.
/// Torus: solid tissue ring in the z = center plane with `radius` as the
///   major radius and `minor_radius` as the tube radius, air elsewhere.
struct PhantomParams {
    double radius = 10.0;         // voxels
    double wall_thickness = 4.0;  // voxels (tube wall)
    double minor_radius = 4.0;    // voxels (torus tube)
    bool interior_air = false;    // sphere material selection
};

struct PhantomInfo {
    PhantomKind kind{};
    std::array<int, 3> dims{};
    PhantomParams params;
    Vec3 center_world;    // world-space shape center
    double radius_world;  // primary radius in world units
};

constexpr std::int16_t kPhantomAir = -1000;
constexpr std::int16_t kPhantomTissue = 40;

struct Phantom {
    CtVolume volume;
    PhantomInfo info;
};

inline Phantom make_phantom(PhantomKind kind, std::array<int, 3> dims,
                            const PhantomParams& params = {},
                            std::array<double, 3> spacing = {1.0, 1.0, 1.0}) {
    if (dims[0] < 8 || dims[1] < 8 || dims[2] < 8)
        throw ParamError("phantom dims must be >= 8 per axis");
    if (params.radius <= 0)
        throw ParamError("phantom radius must be positive");
    if (kind == PhantomKind::Tube && params.wall_thickness <= 0)
        throw ParamError("tube wall thickness must be positive");
    if (kind == PhantomKind::Torus && params.minor_radius <= 0)
        throw ParamError("torus minor radius must be positive");

    CtVolume vol(dims, spacing, {0, 0, 0}, kPhantomAir);
    const double cx = (dims[0] - 1) * 0.5;
    const double cy = (dims[1] - 1) * 0.5;
    const double cz = (dims[2] - 1) * 0.5;

    for (int z = 0; z < dims[2]; ++z) {
        for (int y = 0; y < dims[1]; ++y) {
            for (int x = 0; x < dims[0]; ++x) {
                double dx = x - cx, dy = y - cy, dz = z - cz;
                std::int16_t v = kPhantomAir;
                switch (kind) {
                    case PhantomKind::Sphere: {
                        double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                        bool inside = r <= params.radius;
                        if (params.interior_air)
                            v = inside ? kPhantomAir : kPhantomTissue;
                        else
                            v = inside ? kPhantomTissue : kPhantomAir;
                        break;
                    }
                    case PhantomKind::Tube: {
                        double r = std::sqrt(dx * dx + dy * dy);
                        if (r < params.radius)
                            v = kPhantomAir;
                        else if (r <= params.radius + params.wall_thickness)
                            v = kPhantomTissue;
                        else
                            v = kPhantomAir;
                        break;
                    }
                    case PhantomKind::Torus: {
                        double ring = std::sqrt(dx * dx + dy * dy) - params.radius;
                        double r = std::sqrt(ring * ring + dz * dz);
                        v = r <= params.minor_radius ? kPhantomTissue : kPhantomAir;
                        break;
                    }
                }
                vol.at(x, y, z) = v;
            }
        }
    }

    PhantomInfo info;
    info.kind = kind;
    info.dims = dims;
    info.params = params;
    info.center_world = {cx * spacing[0], cy * spacing[1], cz * spacing[2]};
    info.radius_world = params.radius * spacing[0];
    return {std::move(vol), info};
}

} // namespace endo
