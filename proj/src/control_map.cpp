#include "alphamotion/control_map.hpp"

#include "alphamotion/motion_spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace alphamotion
{

double ControlGeometry::maxShaftLength(Extent canvas)
{
    return kMaxShaftFraction * std::min(canvas.width, canvas.height);
}

double ControlGeometry::shaftLength(double velocity, Extent canvas)
{
    return std::clamp(velocity * kPixelsPerVelocity, kMinShaft, maxShaftLength(canvas));
}

double ControlGeometry::maxEncodableVelocity(Extent canvas) { return maxShaftLength(canvas) / kPixelsPerVelocity; }

double ControlGeometry::shaftHalfWidth(double shaftLength)
{
    return std::max(kMinShaftHalfWidth, kShaftHalfWidthFraction * shaftLength);
}

Pixel<double> scaleColor(ScaleMode mode)
{
    switch (mode)
    {
    case ScaleMode::Grow: return {0.0, 1.0, 0.0, 1.0};
    case ScaleMode::Stable: return {0.0, 0.0, 1.0, 1.0};
    case ScaleMode::Shrink: return {1.0, 0.0, 0.0, 1.0};
    }
    return {0.0, 0.0, 0.0, 1.0};
}

ControlMap renderControl(const MotionSpec& spec, Extent canvas)
{
    spec.validate();
    if (canvas.width < ControlGeometry::kMinCanvas || canvas.height < ControlGeometry::kMinCanvas)
        throw SizeError("control map canvas must be at least 64x64, got " + std::to_string(canvas.width) + "x" +
                        std::to_string(canvas.height));

    RgbaFrame img = RgbaFrame::filled(canvas.width, canvas.height, Pixel<double>(1.0, 1.0, 1.0, 1.0));
    const Pixel<double> color = scaleColor(spec.scaleMode);
    const double cx = (canvas.width - 1) / 2.0;
    const double cy = (canvas.height - 1) / 2.0;

    if (!spec.direction)
    {
        const double r = ControlGeometry::kDiscRadiusFraction * std::min(canvas.width, canvas.height);
        for (int y = 0; y < canvas.height; ++y)
            for (int x = 0; x < canvas.width; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                    img.setPixel(x, y, color);
        return {std::move(img), specDigest(spec)};
    }

    const Eigen::Vector2d dir = unitVector(*spec.direction);
    const Eigen::Vector2d perp(-dir.y(), dir.x());
    const double len = ControlGeometry::shaftLength(spec.velocity, canvas);
    const double halfShaft = ControlGeometry::shaftHalfWidth(len);
    const double headLen = ControlGeometry::kHeadLengthFraction * len;
    const double halfHead = ControlGeometry::kHeadWidthFraction * len / 2.0;

    for (int y = 0; y < canvas.height; ++y)
    {
        for (int x = 0; x < canvas.width; ++x)
        {
            const Eigen::Vector2d d(x - cx, y - cy);
            const double u = d.dot(dir);
            const double v = std::abs(d.dot(perp));
            bool inside = false;
            // the head takes the last headLen of the arrow, tip at distance len
            const double neck = len - headLen;
            if (u >= 0.0 && u <= neck)
                inside = v <= halfShaft;
            else if (u > neck && u <= len)
                inside = v <= halfHead * (1.0 - (u - neck) / headLen);
            if (inside)
                img.setPixel(x, y, color);
        }
    }
    return {std::move(img), specDigest(spec)};
}

Plane<bool> glyphMask(const RgbaFrame& image)
{
    return (image.channel(kRed) < 0.5) || (image.channel(kGreen) < 0.5) || (image.channel(kBlue) < 0.5);
}

DecodedControl decodeControl(const RgbaFrame& image)
{
    const Plane<bool> glyph = glyphMask(image);
    const auto glyphCount = glyph.count();
    if (glyphCount == 0)
        throw DecodeError("control map contains no glyph pixels");

    // A pixel votes for channel c when c is high and the other two are low.
    std::array<Plane<bool>, 3> saturated;
    std::array<Eigen::Index, 3> votes{};
    for (int c = 0; c < 3; ++c)
    {
        const int o1 = (c + 1) % 3;
        const int o2 = (c + 2) % 3;
        saturated[c] =
            glyph && (image.channel(c) >= 0.5) && (image.channel(o1) < 0.5) && (image.channel(o2) < 0.5);
        votes[c] = saturated[c].count();
    }
    const int dominant = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    for (int c = 0; c < 3; ++c)
        if (c != dominant && votes[c] == votes[dominant])
            throw DecodeError("control map hue is ambiguous");
    if (2 * votes[dominant] <= glyphCount)
        throw DecodeError("control map has no dominant saturated hue");

    DecodedControl out;
    out.scaleMode = dominant == kGreen ? ScaleMode::Grow : dominant == kBlue ? ScaleMode::Stable : ScaleMode::Shrink;

    const Plane<bool>& mask = saturated[dominant];
    const double cx = (image.width() - 1) / 2.0;
    const double cy = (image.height() - 1) / 2.0;

    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    double maxDist2 = -1.0;
    for (int y = 0; y < image.height(); ++y)
    {
        for (int x = 0; x < image.width(); ++x)
        {
            if (!mask(y, x))
                continue;
            centroid += Eigen::Vector2d(x, y);
            maxDist2 = std::max(maxDist2, (x - cx) * (x - cx) + (y - cy) * (y - cy));
        }
    }
    centroid /= static_cast<double>(votes[dominant]);

    // A disc is centered on the canvas; an arrow's mass sits away from its origin.
    if ((centroid - Eigen::Vector2d(cx, cy)).norm() < 1.0)
        return out;

    Eigen::Vector2d tip = Eigen::Vector2d::Zero();
    int tipCount = 0;
    for (int y = 0; y < image.height(); ++y)
    {
        for (int x = 0; x < image.width(); ++x)
        {
            if (mask(y, x) && (x - cx) * (x - cx) + (y - cy) * (y - cy) >= maxDist2 - 1e-9)
            {
                tip += Eigen::Vector2d(x, y);
                ++tipCount;
            }
        }
    }
    tip /= tipCount;

    const Eigen::Vector2d axis = tip - centroid;
    const double angle = std::atan2(-axis.y(), axis.x()) * 180.0 / std::numbers::pi;
    out.direction = snapHeading(angle);

    const double arrowLength = (tip - Eigen::Vector2d(cx, cy)).norm();
    out.velocity = arrowLength / ControlGeometry::kPixelsPerVelocity;
    return out;
}

} // namespace alphamotion
