#pragma once

#include "alphamotion/rgba.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphamotion
{

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed file contents (bad PNG, bad sidecar, inconsistent clip).
class FormatError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

// 8-bit straight-alpha RGBA PNG. Channels are quantized as round(v * 255).
Bytes encodePng(const RgbaFrame& frame);
RgbaFrame decodePng(const Bytes& png);

void writePng(const std::filesystem::path& path, const RgbaFrame& frame);
RgbaFrame readPng(const std::filesystem::path& path);

// Single-channel matte from a PNG; gray or the red channel of color images.
AlphaMask readMaskPng(const std::filesystem::path& path);

// Values a frame takes after an 8-bit round trip.
RgbaFrame quantize8(const RgbaFrame& frame);

Bytes readFileBytes(const std::filesystem::path& path);
void writeFileBytes(const std::filesystem::path& path, const Bytes& bytes);

struct ClipMeta
{
    double fps = 8.0;
    int frameCount = 0;
    int width = 0;
    int height = 0;
    nlohmann::json extra = nlohmann::json::object();  // e.g. class_name
};

inline constexpr const char* kMetaFileName = "meta";

std::string frameFileName(int index);  // frame_0000.png

nlohmann::json toJson(const ClipMeta& meta);
ClipMeta clipMetaFromJson(const nlohmann::json& j);
ClipMeta readClipMeta(const std::filesystem::path& clipDir);

// A clip directory holds frame_%04d.png files plus a one-line JSON `meta`
// sidecar with fps, frame_count, width and height.
void writeClip(const std::filesystem::path& dir, const RgbaClip& clip,
               const nlohmann::json& extraMeta = nlohmann::json::object());

// In-memory form of the same layout: (relative file name, bytes) pairs.
std::vector<std::pair<std::string, Bytes>> encodeClipFiles(const RgbaClip& clip,
                                                           const nlohmann::json& extraMeta = nlohmann::json::object());

// Throws FormatError if the sidecar is malformed or disagrees with the frames.
RgbaClip readClip(const std::filesystem::path& dir);

// Frames only, sorted by name; no sidecar required. Used for raw RGB and mask
// sequences.
std::vector<std::filesystem::path> listFramePngs(const std::filesystem::path& dir);

} // namespace alphamotion
