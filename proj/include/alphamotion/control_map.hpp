#pragma once

#include "alphamotion/motion_spec.hpp"
#include "alphamotion/rgba.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace alphamotion
{

class DecodeError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Geometry of the rendered glyph. Arrow shaft length is linear in velocity and
// clamped; these constants are part of the control-map format.
struct ControlGeometry
{
    static constexpr double kPixelsPerVelocity = 8.0;
    static constexpr double kMinShaft = 12.0;
    static constexpr double kMaxShaftFraction = 0.45;    // of min(w, h)
    static constexpr double kHeadWidthFraction = 0.4;    // of shaft length
    static constexpr double kHeadLengthFraction = 0.4;   // of shaft length, counted inside it
    static constexpr double kShaftHalfWidthFraction = 0.05;
    static constexpr double kMinShaftHalfWidth = 1.5;
    static constexpr double kDiscRadiusFraction = 0.08;  // of min(w, h)
    static constexpr int kMinCanvas = 64;

    static double shaftLength(double velocity, Extent canvas);
    static double maxShaftLength(Extent canvas);
    // Largest velocity whose shaft length is not clamped from above.
    static double maxEncodableVelocity(Extent canvas);
    static double shaftHalfWidth(double shaftLength);
};

Pixel<double> scaleColor(ScaleMode mode);

struct ControlMap
{
    RgbaFrame image;        // opaque; white background
    std::string specHash;   // specDigest() of the generating spec
};

// Arrow from the canvas center along the heading, or a centered disc when
// the spec has no direction, filled with the color of the scale mode.
// Rotation rate is not encoded.
ControlMap renderControl(const MotionSpec& spec, Extent canvas = {});

// Pixels belonging to the glyph (anything that is not background).
Plane<bool> glyphMask(const RgbaFrame& image);

struct DecodedControl
{
    std::optional<Direction> direction;
    double velocity = 0.0;
    ScaleMode scaleMode = ScaleMode::Stable;
};

DecodedControl decodeControl(const RgbaFrame& image);
inline DecodedControl decodeControl(const ControlMap& map) { return decodeControl(map.image); }

} // namespace alphamotion
