#include <gtest/gtest.h>

#include <cmath>

#include "endo/render/phantom.hpp"
#include "endo/render/raycast.hpp"

using namespace endo;

namespace {

constexpr double kPi = 3.14159265358979;

/// Analytic pixel radius of a sphere silhouette: angular radius asin(R/d)
/// mapped through the pinhole with vertical fov `vfov_deg` at `side` pixels.
double projected_sphere_radius_px(double radius, double distance,
                                  double vfov_deg, int side) {
    double alpha = std::asin(radius / distance);
    return (side / 2.0) * std::tan(alpha) /
           std::tan(vfov_deg * kPi / 360.0);
}

/// Area-equivalent silhouette radius measured from the opacity map.
double measured_radius_px(const Image& opacity) {
    std::size_t hits = 0;
    for (float a : opacity.data)
        if (a >= 0.5f) ++hits;
    return std::sqrt(static_cast<double>(hits) / kPi);
}

Phantom solid_sphere() {
    PhantomParams p;
    p.radius = 20.0;
    p.interior_air = false;
    return make_phantom(PhantomKind::Sphere, {64, 64, 64}, p);
}

} // namespace

TEST(Render, AllAirVolumeIsBackground) {
    CtVolume air({16, 16, 16}, {1, 1, 1}); // filled with -1024
    Camera cam = Camera::look_at({8, 8, -20}, {8, 8, 8}, 70, 32, 32);
    RenderParams rp;
    rp.background[0] = 0.1;
    rp.background[1] = 0.2;
    rp.background[2] = 0.3;
    Image img = render_view(air, cam, TransferFunction::colon_default(), rp);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            EXPECT_FLOAT_EQ(img.at(y, x, 0), 0.1f);
            EXPECT_FLOAT_EQ(img.at(y, x, 1), 0.2f);
            EXPECT_FLOAT_EQ(img.at(y, x, 2), 0.3f);
        }
}

TEST(Render, SphereSilhouetteMatchesPerspectiveProjection) {
    Phantom phantom = solid_sphere();
    const Vec3 center = phantom.info.center_world;
    const double distance = 100.0;
    Camera cam = Camera::look_at({center.x, center.y, center.z + distance},
                                 center, 70, 256, 256);
    RenderParams rp;
    rp.step_size = 0.25;
    // Binary opacity centered on the air/tissue midpoint scalar, so the
    // detected surface is the midpoint isosurface of the sampled field.
    TransferFunction tf =
        TransferFunction::opaque_above(-480.0, {0.9, 0.9, 0.9, 1.0});
    Image opacity = render_opacity(phantom.volume, cam, tf, rp);

    double expected = projected_sphere_radius_px(phantom.info.radius_world,
                                                 distance, 70, 256);
    double measured = measured_radius_px(opacity);
    EXPECT_NEAR(measured, expected, 1.0);
}

TEST(Render, SilhouetteRadiusScalesWithResolution) {
    Phantom phantom = solid_sphere();
    const Vec3 center = phantom.info.center_world;
    RenderParams rp;
    rp.step_size = 0.25;
    TransferFunction tf =
        TransferFunction::opaque_above(-480.0, {0.9, 0.9, 0.9, 1.0});
    Camera cam256 = Camera::look_at({center.x, center.y, center.z + 100},
                                    center, 70, 256, 256);
    Camera cam128 = Camera::look_at({center.x, center.y, center.z + 100},
                                    center, 70, 128, 128);
    double r256 = measured_radius_px(render_opacity(phantom.volume, cam256, tf, rp));
    double r128 = measured_radius_px(render_opacity(phantom.volume, cam128, tf, rp));
    EXPECT_NEAR(r256, 2.0 * r128, 1.0);
}

TEST(Render, OpaqueFirstSampleEqualsItsShadedColor) {
    CtVolume tissue({16, 16, 16}, {1, 1, 1}, {0, 0, 0}, 500);
    TransferFunction tf =
        TransferFunction::opaque_above(0.0, {0.8, 0.5, 0.4, 1.0});
    RenderParams rp;
    Camera cam = Camera::look_at({8, 8, 8}, {8, 8, 15}, 70, 8, 8);
    cam.orthonormalize();
    Image img = render_view(tissue, cam, tf, rp);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            Vec3 dir = cam.ray_direction(x, y);
            ShadedSample s = shade_sample(tissue, tf, rp, cam.position, dir,
                                          cam.position, rp.step_size);
            ASSERT_DOUBLE_EQ(s.alpha, 1.0);
            EXPECT_EQ(img.at(y, x, 0), static_cast<float>(s.r));
            EXPECT_EQ(img.at(y, x, 1), static_cast<float>(s.g));
            EXPECT_EQ(img.at(y, x, 2), static_cast<float>(s.b));
        }
}

TEST(Render, HalvingStepSizeBarelyChangesPixels) {
    Phantom phantom = solid_sphere();
    const Vec3 center = phantom.info.center_world;
    Camera cam = Camera::look_at({center.x + 5, center.y - 3, center.z + 90},
                                 center, 70, 64, 64);
    RenderParams coarse;
    coarse.step_size = 0.4;
    RenderParams fine = coarse;
    fine.step_size = 0.2;
    TransferFunction tf = TransferFunction::colon_default();
    Image a = render_view(phantom.volume, cam, tf, coarse);
    Image b = render_view(phantom.volume, cam, tf, fine);
    float worst = 0.0f;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    EXPECT_LT(worst, 0.02f);
}

TEST(Render, TubeInteriorLumenIsDarkerThanWall) {
    PhantomParams p;
    p.radius = 14.0;
    p.wall_thickness = 6.0;
    Phantom tube = make_phantom(PhantomKind::Tube, {64, 64, 64}, p);
    Vec3 c = tube.volume.center();
    Camera cam = Camera::look_at({c.x, c.y, 12.0}, {c.x, c.y, 60.0}, 70, 64, 64);
    RenderParams rp;
    Image img = render_view(tube.volume, cam, TransferFunction::colon_default(), rp);

    auto patch_mean = [&](int cy, int cx) {
        double sum = 0.0;
        for (int y = cy - 8; y < cy + 8; ++y)
            for (int x = cx - 8; x < cx + 8; ++x)
                for (int ch = 0; ch < 3; ++ch) sum += img.at(y, x, ch);
        return sum / (16.0 * 16.0 * 3.0);
    };
    double lumen = patch_mean(32, 32);  // central: looking down the lumen
    double wall = patch_mean(32, 10);   // off-axis: the near wall
    EXPECT_LT(lumen, wall);
}

TEST(Render, PureFunctionBitIdenticalRuns) {
    Phantom phantom = solid_sphere();
    Camera cam = Camera::look_at({10, 20, 100}, phantom.info.center_world, 70,
                                 48, 48);
    RenderParams rp;
    TransferFunction tf = TransferFunction::colon_default();
    Image a = render_view(phantom.volume, cam, tf, rp);
    Image b = render_view(phantom.volume, cam, tf, rp);
    EXPECT_EQ(a.data, b.data);
}

TEST(Render, InvalidStepSizeIsAnError) {
    CtVolume vol({8, 8, 8}, {1, 1, 1});
    Camera cam = Camera::look_at({4, 4, -10}, {4, 4, 4});
    RenderParams rp;
    rp.step_size = 0.0;
    EXPECT_THROW(render_view(vol, cam, TransferFunction::colon_default(), rp),
                 ParamError);
}
