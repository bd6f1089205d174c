#pragma once

#include "alphamotion/image_io.hpp"
#include "alphamotion/motion_spec.hpp"
#include "alphamotion/rgba.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace httplib
{
class Server;
}

namespace alphamotion
{

struct ServiceLimits
{
    int maxCanvas = 1024;                     // per side
    int maxFrames = 64;
    std::size_t maxSpriteBytes = 8u << 20;    // 8 MiB
};

struct ServiceResponse
{
    int status = 200;
    std::string contentType;
    std::string body;
};

// Stateless facade over clip synthesis and control-map rendering. Every
// handler is a pure function of its inputs and the immutable limits.
//
//   GET  /v1/health       -> "ok"
//   POST /v1/preview      multipart: sprite (PNG), spec (JSON), [canvas]
//                         -> zip of frame_%04d.png
//   POST /v1/control-map  JSON {"spec": {...}, "canvas": [w, h]} -> PNG
//   POST /v1/export       multipart: sprite, spec, class_name, [canvas], [id]
//                         -> zip laid out as a dataset entry directory plus
//                            captions.jsonl
//
// `canvas` is "[w, h]" or "WxH" and defaults to 256x256; frame_count comes
// from the spec and defaults to 16.
class PreviewService
{
public:
    explicit PreviewService(ServiceLimits limits = {}) : limits_(limits) {}

    const ServiceLimits& limits() const { return limits_; }

    ServiceResponse preview(const Bytes& spritePng, const std::string& specJson, const std::string& canvas) const;
    ServiceResponse controlMap(const std::string& body) const;
    ServiceResponse exportEntry(const Bytes& spritePng, const std::string& specJson, const std::string& className,
                                const std::string& canvas, const std::string& id) const;

    // Registers every route on `server` and sets its payload limit.
    void mount(httplib::Server& server) const;

private:
    ServiceLimits limits_;
};

// Id used for an exported entry when the client does not name one.
std::string exportEntryId(const MotionSpec& spec, const std::string& className, const Bytes& spritePng);

Extent parseCanvas(const std::string& text);

} // namespace alphamotion
