#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "endo/core/error.hpp"

namespace endo {

struct Rgba {
    double r = 0, g = 0, b = 0, a = 0;
};

/// Piecewise-linear map from scalar value to color and opacity. Evaluation
/// clamps outside the control-point range to the nearest endpoint. Opacity
/// is defined per reference step length; the renderer corrects it for the
/// actual step size.
class TransferFunction {
public:
    struct ControlPoint {
        double scalar;
        Rgba rgba;
    };

    TransferFunction() = default;
    explicit TransferFunction(std::vector<ControlPoint> points)
        : points_(std::move(points)) {
        if (points_.size() < 2)
            throw ParamError("transfer function needs >= 2 control points");
        for (std::size_t i = 1; i < points_.size(); ++i)
            if (!(points_[i - 1].scalar < points_[i].scalar))
                throw ParamError(
                    "transfer function control points must be strictly "
                    "increasing in scalar value");
        for (const auto& p : points_) {
            auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
            if (!in01(p.rgba.r) || !in01(p.rgba.g) || !in01(p.rgba.b) ||
                !in01(p.rgba.a))
                throw ParamError("transfer function rgba must lie in [0,1]");
        }
    }

    Rgba evaluate(double scalar) const {
        if (scalar <= points_.front().scalar) return points_.front().rgba;
        if (scalar >= points_.back().scalar) return points_.back().rgba;
        auto it = std::upper_bound(
            points_.begin(), points_.end(), scalar,
            [](double s, const ControlPoint& p) { return s < p.scalar; });
        const ControlPoint& hi = *it;
        const ControlPoint& lo = *(it - 1);
        double t = (scalar - lo.scalar) / (hi.scalar - lo.scalar);
        return {lo.rgba.r + t * (hi.rgba.r - lo.rgba.r),
                lo.rgba.g + t * (hi.rgba.g - lo.rgba.g),
                lo.rgba.b + t * (hi.rgba.b - lo.rgba.b),
                lo.rgba.a + t * (hi.rgba.a - lo.rgba.a)};
    }

    const std::vector<ControlPoint>& control_points() const { return points_; }

    /// Colon-like default: air fully transparent, opacity ramping up over
    /// scalar -500..0, tissue opaque pale pink.
    static TransferFunction colon_default() {
        const Rgba pink{0.85, 0.60, 0.55, 1.0};
        return TransferFunction({{-1024.0, {pink.r, pink.g, pink.b, 0.0}},
                                 {-500.0, {pink.r, pink.g, pink.b, 0.0}},
                                 {0.0, pink},
                                 {3071.0, pink}});
    }

    /// Everything transparent; renders to the background color.
    static TransferFunction transparent() {
        return TransferFunction({{-1024.0, {0, 0, 0, 0}}, {3071.0, {0, 0, 0, 0}}});
    }

    /// Step map: opacity 1 at or above the threshold, 0 below.
    static TransferFunction opaque_above(double threshold, Rgba color) {
        color.a = 1.0;
        Rgba clear = color;
        clear.a = 0.0;
        return TransferFunction({{-1024.0, clear},
                                 {threshold - 1e-3, clear},
                                 {threshold, color},
                                 {3071.0, color}});
    }

private:
    std::vector<ControlPoint> points_;
};

} // namespace endo
