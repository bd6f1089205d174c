#include "alphamotion/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>

namespace alphamotion
{

namespace fs = std::filesystem;

namespace
{

std::uint8_t toByte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

Bytes toInterleaved(const RgbaFrame& frame)
{
    const int w = frame.width();
    const int h = frame.height();
    Bytes buf(static_cast<std::size_t>(w) * h * 4);
    std::size_t i = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 4; ++c)
                buf[i++] = toByte(frame.channel(c)(y, x));
    return buf;
}

struct DecodedImage
{
    int width = 0;
    int height = 0;
    Bytes rgba;
};

DecodedImage decodeRgba8(const Bytes& png)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, png.data(), png.size()))
        throw FormatError(std::string("PNG decode failed: ") + image.message);
    image.format = PNG_FORMAT_RGBA;
    DecodedImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.rgba.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.rgba.data(), 0, nullptr))
    {
        png_image_free(&image);
        throw FormatError(std::string("PNG decode failed: ") + image.message);
    }
    if (out.width <= 0 || out.height <= 0)
        throw FormatError("PNG has zero size");
    return out;
}

} // namespace

Bytes encodePng(const RgbaFrame& frame)
{
    if (frame.empty())
        throw FormatError("cannot encode an empty frame");
    const Bytes pixels = toInterleaved(frame);
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(frame.width());
    image.height = static_cast<png_uint_32>(frame.height());
    image.format = PNG_FORMAT_RGBA;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr))
        throw FormatError(std::string("PNG encode failed: ") + image.message);
    Bytes out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr))
        throw FormatError(std::string("PNG encode failed: ") + image.message);
    out.resize(size);
    return out;
}

RgbaFrame decodePng(const Bytes& png)
{
    const DecodedImage img = decodeRgba8(png);
    RgbaFrame frame(img.width, img.height);
    std::size_t i = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 4; ++c)
                frame.channel(c)(y, x) = img.rgba[i++] / 255.0;
    return frame;
}

Bytes readFileBytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void writeFileBytes(const fs::path& path, const Bytes& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("short write to " + path.string());
}

void writePng(const fs::path& path, const RgbaFrame& frame) { writeFileBytes(path, encodePng(frame)); }

RgbaFrame readPng(const fs::path& path) { return decodePng(readFileBytes(path)); }

AlphaMask readMaskPng(const fs::path& path)
{
    const DecodedImage img = decodeRgba8(readFileBytes(path));
    AlphaMask mask(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            mask(y, x) = img.rgba[(static_cast<std::size_t>(y) * img.width + x) * 4] / 255.0;
    return mask;
}

RgbaFrame quantize8(const RgbaFrame& frame)
{
    RgbaFrame out = frame;
    for (int c = 0; c < 4; ++c)
        out.channel(c) = out.channel(c).unaryExpr([](double v) { return toByte(v) / 255.0; });
    return out;
}

std::string frameFileName(int index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04d.png", index);
    return buf;
}

nlohmann::json toJson(const ClipMeta& meta)
{
    nlohmann::json j = meta.extra.is_object() ? meta.extra : nlohmann::json::object();
    j["fps"] = meta.fps;
    j["frame_count"] = meta.frameCount;
    j["width"] = meta.width;
    j["height"] = meta.height;
    return j;
}

ClipMeta clipMetaFromJson(const nlohmann::json& j)
{
    if (!j.is_object())
        throw FormatError("clip sidecar must be an object");
    ClipMeta meta;
    try
    {
        meta.fps = j.at("fps").get<double>();
        meta.frameCount = j.at("frame_count").get<int>();
        meta.width = j.at("width").get<int>();
        meta.height = j.at("height").get<int>();
    }
    catch (const nlohmann::json::exception& e)
    {
        throw FormatError(std::string("clip sidecar: ") + e.what());
    }
    if (!(meta.fps > 0.0) || meta.frameCount < 1 || meta.width < 1 || meta.height < 1)
        throw FormatError("clip sidecar has non-positive fps, frame_count or dimensions");
    meta.extra = j;
    for (const char* key : {"fps", "frame_count", "width", "height"})
        meta.extra.erase(key);
    return meta;
}

ClipMeta readClipMeta(const fs::path& clipDir)
{
    std::ifstream in(clipDir / kMetaFileName);
    if (!in)
        throw FormatError("missing sidecar " + (clipDir / kMetaFileName).string());
    std::string line;
    std::getline(in, line);
    try
    {
        return clipMetaFromJson(nlohmann::json::parse(line));
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw FormatError("sidecar " + (clipDir / kMetaFileName).string() + ": " + e.what());
    }
}

std::vector<std::pair<std::string, Bytes>> encodeClipFiles(const RgbaClip& clip, const nlohmann::json& extraMeta)
{
    std::vector<std::pair<std::string, Bytes>> files;
    files.reserve(clip.size() + 1);
    for (std::size_t i = 0; i < clip.size(); ++i)
        files.emplace_back(frameFileName(static_cast<int>(i)), encodePng(clip[i]));
    ClipMeta meta{clip.fps(), static_cast<int>(clip.size()), clip.width(), clip.height(), extraMeta};
    const std::string line = toJson(meta).dump() + "\n";
    files.emplace_back(kMetaFileName, Bytes(line.begin(), line.end()));
    return files;
}

void writeClip(const fs::path& dir, const RgbaClip& clip, const nlohmann::json& extraMeta)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, bytes] : encodeClipFiles(clip, extraMeta))
        writeFileBytes(dir / name, bytes);
}

std::vector<fs::path> listFramePngs(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw IoError("not a directory: " + dir.string());
    static const std::regex pattern(R"(frame_\d{4,}\.png)");
    std::vector<fs::path> frames;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && std::regex_match(e.path().filename().string(), pattern))
            frames.push_back(e.path());
    std::sort(frames.begin(), frames.end());
    return frames;
}

RgbaClip readClip(const fs::path& dir)
{
    const ClipMeta meta = readClipMeta(dir);
    const auto files = listFramePngs(dir);
    if (static_cast<int>(files.size()) != meta.frameCount)
        throw FormatError(dir.string() + ": sidecar lists " + std::to_string(meta.frameCount) + " frames, found " +
                          std::to_string(files.size()));
    std::vector<RgbaFrame> frames;
    frames.reserve(files.size());
    for (int i = 0; i < meta.frameCount; ++i)
    {
        const fs::path p = dir / frameFileName(i);
        if (!fs::exists(p))
            throw FormatError(dir.string() + ": missing " + frameFileName(i));
        RgbaFrame f = readPng(p);
        if (f.width() != meta.width || f.height() != meta.height)
            throw FormatError(p.string() + ": size " + std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                              " disagrees with sidecar " + std::to_string(meta.width) + "x" +
                              std::to_string(meta.height));
        frames.push_back(std::move(f));
    }
    return RgbaClip(std::move(frames), meta.fps);
}

} // namespace alphamotion
