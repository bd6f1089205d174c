#include "alphamotion/motion_spec.hpp"
#include "alphamotion/motion_spec_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace alphamotion
{

namespace
{
constexpr std::array<std::string_view, 8> kDirectionNames = {"E", "NE", "N", "NW", "W", "SW", "S", "SE"};
constexpr std::array<std::string_view, 3> kScaleModeNames = {"grow", "stable", "shrink"};
} // namespace

std::string_view toString(Direction d) { return kDirectionNames[static_cast<int>(d)]; }

std::string_view toString(ScaleMode m) { return kScaleModeNames[static_cast<int>(m)]; }

std::optional<Direction> parseDirection(std::string_view s)
{
    if (s == "none" || s == "None" || s.empty())
        return std::nullopt;
    for (int i = 0; i < 8; ++i)
        if (kDirectionNames[i] == s)
            return static_cast<Direction>(i);
    throw SpecError("unknown direction '" + std::string(s) + "'");
}

ScaleMode parseScaleMode(std::string_view s)
{
    for (int i = 0; i < 3; ++i)
        if (kScaleModeNames[i] == s)
            return static_cast<ScaleMode>(i);
    throw SpecError("unknown scale_mode '" + std::string(s) + "'");
}

Eigen::Vector2d unitVector(Direction d)
{
    constexpr double h = 0.70710678118654752440; // sqrt(2)/2
    switch (d)
    {
    case Direction::E: return {1.0, 0.0};
    case Direction::NE: return {h, -h};
    case Direction::N: return {0.0, -1.0};
    case Direction::NW: return {-h, -h};
    case Direction::W: return {-1.0, 0.0};
    case Direction::SW: return {-h, h};
    case Direction::S: return {0.0, 1.0};
    case Direction::SE: return {h, h};
    }
    return {0.0, 0.0};
}

Direction snapHeading(double degrees)
{
    double a = std::fmod(degrees, 360.0);
    if (a < 0.0)
        a += 360.0;
    // ceil(x - 0.5) rounds halves down, i.e. toward the smaller angle.
    const int idx = static_cast<int>(std::ceil(a / 45.0 - 0.5));
    return static_cast<Direction>(((idx % 8) + 8) % 8);
}

Direction rotateCcw(Direction d, int eighthTurns)
{
    return static_cast<Direction>((((static_cast<int>(d) + eighthTurns) % 8) + 8) % 8);
}

void MotionSpec::validate() const
{
    if (!std::isfinite(velocity) || velocity < 0.0)
        throw SpecError("velocity must be a finite value >= 0");
    if (!direction && velocity != 0.0)
        throw SpecError("direction none requires velocity 0");
    if (!std::isfinite(scaleRate) || !(scaleRate > 0.0))
        throw SpecError("scale_rate must be a finite value > 0");
    switch (scaleMode)
    {
    case ScaleMode::Grow:
        if (!(scaleRate > 1.0))
            throw SpecError("scale_mode grow requires scale_rate > 1");
        break;
    case ScaleMode::Stable:
        if (scaleRate != 1.0)
            throw SpecError("scale_mode stable requires scale_rate = 1");
        break;
    case ScaleMode::Shrink:
        if (!(scaleRate < 1.0))
            throw SpecError("scale_mode shrink requires scale_rate < 1");
        break;
    }
    if (!std::isfinite(rotationRate))
        throw SpecError("rotation_rate must be finite");
    if (frameCount < 1)
        throw SpecError("frame_count must be >= 1");
}

bool MotionSpec::isValid() const noexcept
{
    try
    {
        validate();
        return true;
    }
    catch (const SpecError&)
    {
        return false;
    }
}

nlohmann::json toJson(const MotionSpec& spec)
{
    nlohmann::json j;
    j["direction"] = spec.direction ? std::string(toString(*spec.direction)) : std::string("none");
    j["velocity"] = spec.velocity;
    j["scale_mode"] = std::string(toString(spec.scaleMode));
    j["scale_rate"] = spec.scaleRate;
    j["rotation_rate"] = spec.rotationRate;
    j["frame_count"] = spec.frameCount;
    return j;
}

MotionSpec motionSpecFromJson(const nlohmann::json& j)
{
    if (!j.is_object())
        throw SpecError("motion spec record must be an object");
    MotionSpec spec;
    try
    {
        if (j.contains("direction") && !j["direction"].is_null())
            spec.direction = parseDirection(j["direction"].get<std::string>());
        if (j.contains("velocity"))
            spec.velocity = j["velocity"].get<double>();
        if (j.contains("scale_mode"))
            spec.scaleMode = parseScaleMode(j["scale_mode"].get<std::string>());
        if (j.contains("scale_rate"))
            spec.scaleRate = j["scale_rate"].get<double>();
        if (j.contains("rotation_rate"))
            spec.rotationRate = j["rotation_rate"].get<double>();
        if (j.contains("frame_count"))
            spec.frameCount = j["frame_count"].get<int>();
    }
    catch (const nlohmann::json::exception& e)
    {
        throw SpecError(std::string("malformed motion spec field: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string serializeMotionSpec(const MotionSpec& spec) { return toJson(spec).dump(); }

MotionSpec parseMotionSpec(const std::string& text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw SpecError(std::string("motion spec is not valid JSON: ") + e.what());
    }
    return motionSpecFromJson(j);
}

void writeMotionSpec(const std::filesystem::path& path, const MotionSpec& spec)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << serializeMotionSpec(spec) << '\n';
}

MotionSpec readMotionSpec(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    return parseMotionSpec(line);
}

std::string fnv1aHex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string specDigest(const MotionSpec& spec) { return fnv1aHex(serializeMotionSpec(spec)); }

} // namespace alphamotion
