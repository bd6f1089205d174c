#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace alphamotion
{

// Compass headings in counterclockwise order starting at East.
enum class Direction : int
{
    E = 0,
    NE,
    N,
    NW,
    W,
    SW,
    S,
    SE,
};

inline constexpr std::array<Direction, 8> kAllDirections = {Direction::E,  Direction::NE, Direction::N,
                                                            Direction::NW, Direction::W,  Direction::SW,
                                                            Direction::S,  Direction::SE};

enum class ScaleMode
{
    Grow,
    Stable,
    Shrink,
};

inline constexpr std::array<ScaleMode, 3> kAllScaleModes = {ScaleMode::Grow, ScaleMode::Stable, ScaleMode::Shrink};

class SpecError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

std::string_view toString(Direction d);
std::string_view toString(ScaleMode m);
std::optional<Direction> parseDirection(std::string_view s); // throws on unknown; "none" -> nullopt
ScaleMode parseScaleMode(std::string_view s);

// Heading angle in degrees, counterclockwise from East.
inline double headingDegrees(Direction d) { return 45.0 * static_cast<int>(d); }

// Unit step in image coordinates (x right, y down): E = (1,0), N = (0,-1).
Eigen::Vector2d unitVector(Direction d);

// Nearest of the 8 headings; an angle exactly halfway between two headings
// resolves to the one with the smaller counterclockwise angle from East.
Direction snapHeading(double degreesCcwFromEast);

Direction rotateCcw(Direction d, int eighthTurns);

struct MotionSpec
{
    std::optional<Direction> direction;
    double velocity = 0.0;       // px/frame
    ScaleMode scaleMode = ScaleMode::Stable;
    double scaleRate = 1.0;      // per-frame multiplicative factor
    double rotationRate = 0.0;   // deg/frame, counterclockwise on screen
    int frameCount = 16;

    bool operator==(const MotionSpec&) const = default;

    // Throws SpecError naming the violated rule.
    void validate() const;
    bool isValid() const noexcept;
};

} // namespace alphamotion
