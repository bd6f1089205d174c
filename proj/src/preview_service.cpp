#include "alphamotion/preview_service.hpp"

#include "alphamotion/archive.hpp"
#include "alphamotion/caption.hpp"
#include "alphamotion/control_map.hpp"
#include "alphamotion/dataset.hpp"
#include "alphamotion/motion_spec_io.hpp"
#include "alphamotion/motion_synth.hpp"

#include "httplib.h"
#include "json.hpp"

#include <regex>

namespace alphamotion
{

namespace
{

// Carries an HTTP status out of request validation.
struct RequestError
{
    int status;
    std::string message;
};

ServiceResponse errorResponse(int status, const std::string& message)
{
    return {status, "application/json", nlohmann::json{{"error", message}}.dump()};
}

ServiceResponse bytesResponse(const std::string& type, const Bytes& b)
{
    return {200, type, std::string(b.begin(), b.end())};
}

std::string toText(const Bytes& b) { return std::string(b.begin(), b.end()); }

MotionSpec specFromText(const std::string& text)
{
    try
    {
        return parseMotionSpec(text.empty() ? std::string("{}") : text);
    }
    catch (const std::exception& e)
    {
        throw RequestError{400, std::string("invalid spec: ") + e.what()};
    }
}

Extent canvasFromText(const std::string& text)
{
    try
    {
        return parseCanvas(text);
    }
    catch (const std::exception& e)
    {
        throw RequestError{400, std::string("invalid canvas: ") + e.what()};
    }
}

void checkLimits(const ServiceLimits& limits, Extent canvas, const MotionSpec& spec)
{
    if (canvas.width > limits.maxCanvas || canvas.height > limits.maxCanvas)
        throw RequestError{413, "canvas exceeds the server limit of " + std::to_string(limits.maxCanvas) + " px"};
    if (spec.frameCount > limits.maxFrames)
        throw RequestError{413, "frame_count exceeds the server limit of " + std::to_string(limits.maxFrames)};
}

RgbaFrame spriteFromBytes(const ServiceLimits& limits, const Bytes& png)
{
    if (png.size() > limits.maxSpriteBytes)
        throw RequestError{413, "sprite exceeds " + std::to_string(limits.maxSpriteBytes) + " bytes"};
    if (png.empty())
        throw RequestError{400, "sprite is missing or empty"};
    try
    {
        return decodePng(png);
    }
    catch (const std::exception& e)
    {
        throw RequestError{400, std::string("invalid sprite: ") + e.what()};
    }
}

RgbaClip synthesize(const RgbaFrame& sprite, const MotionSpec& spec, Extent canvas)
{
    try
    {
        return synthesizeClip(sprite, spec, canvas);
    }
    catch (const PlacementError& e)
    {
        throw RequestError{422, e.what()};
    }
}

template <typename Fn>
ServiceResponse guarded(Fn&& fn)
{
    try
    {
        return fn();
    }
    catch (const RequestError& e)
    {
        return errorResponse(e.status, e.message);
    }
    catch (const SizeError& e)
    {
        return errorResponse(400, e.what());
    }
    catch (const SpecError& e)
    {
        return errorResponse(400, e.what());
    }
    catch (const std::exception& e)
    {
        return errorResponse(500, e.what());
    }
}

std::string fieldOf(const httplib::Request& req, const std::string& name)
{
    if (req.has_file(name))
        return req.get_file_value(name).content;
    if (req.has_param(name))
        return req.get_param_value(name);
    return {};
}

void reply(httplib::Response& res, const ServiceResponse& r)
{
    res.status = r.status;
    res.set_content(r.body, r.contentType);
}

} // namespace

Extent parseCanvas(const std::string& text)
{
    Extent e;  // 256x256
    if (text.empty())
        return e;
    static const std::regex wxh(R"(\s*(\d+)\s*[xX]\s*(\d+)\s*)");
    std::smatch m;
    if (std::regex_match(text, m, wxh))
    {
        e.width = std::stoi(m[1]);
        e.height = std::stoi(m[2]);
    }
    else
    {
        const auto j = nlohmann::json::parse(text);
        if (j.is_array() && j.size() == 2)
        {
            e.width = j[0].get<int>();
            e.height = j[1].get<int>();
        }
        else if (j.is_object())
        {
            e.width = j.at("width").get<int>();
            e.height = j.at("height").get<int>();
        }
        else
        {
            throw std::invalid_argument("canvas must be [w, h], {width, height} or WxH");
        }
    }
    if (e.width < 1 || e.height < 1)
        throw std::invalid_argument("canvas dimensions must be positive");
    return e;
}

std::string exportEntryId(const MotionSpec& spec, const std::string& className, const Bytes& spritePng)
{
    return "export_" + fnv1aHex(serializeMotionSpec(spec) + "\n" + className + "\n" + toText(spritePng));
}

ServiceResponse PreviewService::preview(const Bytes& spritePng, const std::string& specJson,
                                        const std::string& canvasText) const
{
    return guarded([&] {
        const MotionSpec spec = specFromText(specJson);
        const Extent canvas = canvasFromText(canvasText);
        checkLimits(limits_, canvas, spec);
        const RgbaFrame sprite = spriteFromBytes(limits_, spritePng);
        const RgbaClip clip = synthesize(sprite, spec, canvas);
        std::vector<ArchiveMember> members;
        for (std::size_t i = 0; i < clip.size(); ++i)
            members.push_back({frameFileName(static_cast<int>(i)), encodePng(clip[i])});
        return bytesResponse("application/zip", writeZip(members));
    });
}

ServiceResponse PreviewService::controlMap(const std::string& body) const
{
    return guarded([&] {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(body.empty() ? std::string("{}") : body);
        }
        catch (const nlohmann::json::parse_error& e)
        {
            throw RequestError{400, std::string("body is not JSON: ") + e.what()};
        }
        if (!j.is_object())
            throw RequestError{400, "body must be a JSON object"};
        const MotionSpec spec = specFromText(j.contains("spec") ? j["spec"].dump() : std::string("{}"));
        std::string canvasText;
        if (j.contains("canvas"))
            canvasText = j["canvas"].is_string() ? j["canvas"].get<std::string>() : j["canvas"].dump();
        const Extent canvas = canvasFromText(canvasText);
        checkLimits(limits_, canvas, spec);
        return bytesResponse("image/png", encodePng(renderControl(spec, canvas).image));
    });
}

ServiceResponse PreviewService::exportEntry(const Bytes& spritePng, const std::string& specJson,
                                            const std::string& className, const std::string& canvasText,
                                            const std::string& requestedId) const
{
    return guarded([&] {
        if (className.empty())
            throw RequestError{400, "class_name must not be empty"};
        const MotionSpec spec = specFromText(specJson);
        const Extent canvas = canvasFromText(canvasText);
        checkLimits(limits_, canvas, spec);
        const RgbaFrame sprite = spriteFromBytes(limits_, spritePng);
        const RgbaClip clip = synthesize(sprite, spec, canvas);

        const std::string id = requestedId.empty() ? exportEntryId(spec, className, spritePng) : requestedId;
        static const std::regex safeId(R"([A-Za-z0-9_.-]+)");
        if (!std::regex_match(id, safeId) || id == "." || id == "..")
            throw RequestError{400, "id may only contain letters, digits, '_', '-' and '.'"};

        const CaptionRecord caption = composeCaption(className, spec, Source::Iterated);
        std::vector<ArchiveMember> members;
        for (auto& [name, bytes] : encodeClipFiles(clip, {{"class_name", className}}))
            members.push_back({id + "/" + name, std::move(bytes)});
        members.push_back({id + "/" + kControlImageName, encodePng(renderControl(spec, canvas).image)});
        const std::string specLine = serializeMotionSpec(spec) + "\n";
        members.push_back({id + "/" + kControlSpecName, Bytes(specLine.begin(), specLine.end())});
        const std::string captionLine = toJson(caption).dump() + "\n";
        members.push_back({id + "/" + kCaptionFileName, Bytes(captionLine.begin(), captionLine.end())});
        const std::string index = nlohmann::json{{"id", id}, {"caption", className}}.dump() + "\n";
        members.push_back({"captions.jsonl", Bytes(index.begin(), index.end())});
        return bytesResponse("application/zip", writeZip(members));
    });
}

void PreviewService::mount(httplib::Server& server) const
{
    server.set_payload_max_length(limits_.maxSpriteBytes + (1u << 20));

    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });

    server.Post("/v1/preview", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string sprite = fieldOf(req, "sprite");
        reply(res, preview(Bytes(sprite.begin(), sprite.end()), fieldOf(req, "spec"), fieldOf(req, "canvas")));
    });

    server.Post("/v1/control-map", [this](const httplib::Request& req, httplib::Response& res) {
        reply(res, controlMap(req.body));
    });

    server.Post("/v1/export", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string sprite = fieldOf(req, "sprite");
        reply(res, exportEntry(Bytes(sprite.begin(), sprite.end()), fieldOf(req, "spec"), fieldOf(req, "class_name"),
                               fieldOf(req, "canvas"), fieldOf(req, "id")));
    });
}

} // namespace alphamotion
