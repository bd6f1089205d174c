#pragma once

#include "alphamotion/motion_spec.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace alphamotion
{

// Record fields: direction, velocity, scale_mode, scale_rate, rotation_rate, frame_count.
nlohmann::json toJson(const MotionSpec& spec);

// Missing fields take MotionSpec defaults; the result is validated.
MotionSpec motionSpecFromJson(const nlohmann::json& j);

// One-line canonical text form, used for `control.spec` files and digests.
std::string serializeMotionSpec(const MotionSpec& spec);
MotionSpec parseMotionSpec(const std::string& text);

void writeMotionSpec(const std::filesystem::path& path, const MotionSpec& spec);
MotionSpec readMotionSpec(const std::filesystem::path& path);

// 64-bit FNV-1a of the canonical record, as 16 lowercase hex digits.
std::string specDigest(const MotionSpec& spec);
std::string fnv1aHex(std::string_view bytes);

} // namespace alphamotion
