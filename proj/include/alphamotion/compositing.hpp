#pragma once

#include "alphamotion/rgba.hpp"

#include <algorithm>
#include <cmath>

namespace alphamotion
{

// Premultiplied color planes: rgb scaled by alpha, alpha unchanged.
template <typename Scalar>
struct PremultipliedFrame
{
    std::array<Plane<Scalar>, 4> planes;

    int width() const { return static_cast<int>(planes[0].cols()); }
    int height() const { return static_cast<int>(planes[0].rows()); }
};

template <typename Scalar>
PremultipliedFrame<Scalar> premultiply(const BasicRgbaFrame<Scalar>& frame)
{
    PremultipliedFrame<Scalar> out;
    const auto& a = frame.alpha();
    for (int c = 0; c < 3; ++c)
        out.planes[c] = frame.channel(c) * a;
    out.planes[kAlpha] = a;
    return out;
}

// Transparent pixels come back as (0,0,0,0).
template <typename Scalar>
BasicRgbaFrame<Scalar> unpremultiply(const PremultipliedFrame<Scalar>& frame)
{
    std::array<Plane<Scalar>, 4> out;
    const auto& a = frame.planes[kAlpha];
    for (int c = 0; c < 3; ++c)
        out[c] = (a > Scalar(0)).select((frame.planes[c] / a).min(Scalar(1)).max(Scalar(0)), Scalar(0));
    out[kAlpha] = a.min(Scalar(1)).max(Scalar(0));
    return BasicRgbaFrame<Scalar>::fromPlanes(std::move(out));
}

template <typename Scalar>
PremultipliedFrame<Scalar> compositeOver(const PremultipliedFrame<Scalar>& fg, const PremultipliedFrame<Scalar>& bg)
{
    if (fg.width() != bg.width() || fg.height() != bg.height())
        throw SizeError("composite_over: foreground and background differ in size");
    PremultipliedFrame<Scalar> out;
    const Plane<Scalar> keep = Scalar(1) - fg.planes[kAlpha];
    for (int c = 0; c < 4; ++c)
        out.planes[c] = fg.planes[c] + bg.planes[c] * keep;
    return out;
}

// Porter-Duff "over" on straight-alpha frames.
//
// Pixels whose foreground alpha is exactly 0 or 1 pass the background or
// foreground through unchanged; a fully transparent result has rgb = 0.
template <typename Scalar>
BasicRgbaFrame<Scalar> compositeOver(const BasicRgbaFrame<Scalar>& fg, const BasicRgbaFrame<Scalar>& bg)
{
    if (!fg.sameSize(bg))
        throw SizeError("composite_over: foreground " + std::to_string(fg.width()) + "x" +
                        std::to_string(fg.height()) + " vs background " + std::to_string(bg.width()) + "x" +
                        std::to_string(bg.height()));

    const auto& fa = fg.alpha();
    const auto& ba = bg.alpha();
    const Plane<Scalar> bgWeight = ba * (Scalar(1) - fa);
    const Plane<Scalar> outA = fa + bgWeight;

    std::array<Plane<Scalar>, 4> out;
    for (int c = 0; c < 3; ++c)
    {
        const Plane<Scalar> num = fg.channel(c) * fa + bg.channel(c) * bgWeight;
        Plane<Scalar> rgb = (outA > Scalar(0)).select(num / outA, Scalar(0));
        rgb = (fa == Scalar(1)).select(fg.channel(c), rgb);
        rgb = (fa == Scalar(0)).select(bg.channel(c), rgb);
        out[c] = rgb.min(Scalar(1)).max(Scalar(0));
    }
    Plane<Scalar> a = (fa == Scalar(1)).select(Scalar(1), outA);
    out[kAlpha] = (fa == Scalar(0)).select(ba, a).min(Scalar(1));
    return BasicRgbaFrame<Scalar>::fromPlanes(std::move(out));
}

// Attaches a matte to an RGB frame; rgb is copied, alpha := mask.
template <typename Scalar>
BasicRgbaFrame<Scalar> applyMask(const BasicRgbaFrame<Scalar>& rgb, const Plane<Scalar>& mask)
{
    if (mask.rows() != rgb.height() || mask.cols() != rgb.width())
        throw SizeError("apply_mask: mask " + std::to_string(mask.cols()) + "x" + std::to_string(mask.rows()) +
                        " vs frame " + std::to_string(rgb.width()) + "x" + std::to_string(rgb.height()));
    if (!((mask >= Scalar(0)) && (mask <= Scalar(1))).all())
        throw std::domain_error("apply_mask: mask values must lie in [0,1]");
    BasicRgbaFrame<Scalar> out = rgb;
    out.alpha() = mask;
    return out;
}

inline constexpr double kEdgeStepThreshold = 0.5;

// Sobel gradient magnitude of the alpha plane, in alpha units per pixel step.
// Borders replicate the nearest pixel.
template <typename Scalar>
Plane<Scalar> alphaGradientMagnitude(const BasicRgbaFrame<Scalar>& frame)
{
    const auto& a = frame.alpha();
    const int w = frame.width();
    const int h = frame.height();
    auto at = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return a(y, x);
    };
    Plane<Scalar> mag(h, w);
    for (int y = 0; y < h; ++y)
    {
        for (int x = 0; x < w; ++x)
        {
            const Scalar gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
            const Scalar gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
            mag(y, x) = std::sqrt(gx * gx + gy * gy) / Scalar(8);
        }
    }
    return mag;
}

// Share of semi-transparent pixels that sit on a soft ramp rather than a hard
// step. 1.0 when the frame has no semi-transparent pixels.
template <typename Scalar>
double edgeQuality(const BasicRgbaFrame<Scalar>& frame, double threshold = kEdgeStepThreshold)
{
    const auto& a = frame.alpha();
    const auto soft = (a > Scalar(0)) && (a < Scalar(1));
    const auto total = soft.count();
    if (total == 0)
        return 1.0;
    const Plane<Scalar> mag = alphaGradientMagnitude(frame);
    const auto hard = (soft && (mag >= Scalar(threshold))).count();
    return 1.0 - static_cast<double>(hard) / static_cast<double>(total);
}

} // namespace alphamotion
