#include "alphamotion/cli.hpp"

#include "alphamotion/preview_service.hpp"
#include "alphamotion/validation.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace alphamotion
{

namespace fs = std::filesystem;

void RunConfig::validate() const
{
    if (canvas.width < 64 || canvas.height < 64 || canvas.width > 4096 || canvas.height > 4096)
        throw std::invalid_argument("canvas must be between 64 and 4096 px per side");
    if (frameCount < 2 || frameCount > 1024)
        throw std::invalid_argument("frame_count must be between 2 and 1024");
    if (!(fps > 0.0))
        throw std::invalid_argument("fps must be positive");
    if (!(motionThreshold >= 0.0))
        throw std::invalid_argument("motion_threshold must be >= 0");
    if (outputRoot.empty())
        throw std::invalid_argument("output_root must not be empty");
    SpecDistribution d = distribution;
    d.canvas = canvas;
    d.frameCount = frameCount;
    d.fps = fps;
    d.validate();
}

void RunConfig::merge(const nlohmann::json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("run config must be a JSON object");
    seed = j.value("seed", seed);
    if (j.contains("canvas"))
        canvas = parseCanvas(j["canvas"].is_string() ? j["canvas"].get<std::string>() : j["canvas"].dump());
    frameCount = j.value("frame_count", frameCount);
    fps = j.value("fps", fps);
    motionThreshold = j.value("motion_threshold", motionThreshold);
    if (j.contains("output_root"))
        outputRoot = j["output_root"].get<std::string>();
    if (j.contains("distribution"))
        distribution = SpecDistribution::fromJson(j["distribution"]);
    if (j.contains("caption_templates"))
        templates = CaptionTemplates::fromJson(j["caption_templates"]);
}

nlohmann::json RunConfig::toJson() const
{
    return {{"seed", seed},
            {"canvas", {canvas.width, canvas.height}},
            {"frame_count", frameCount},
            {"fps", fps},
            {"motion_threshold", motionThreshold},
            {"output_root", outputRoot.string()},
            {"distribution", distribution.toJson()}};
}

RunConfig RunConfig::fromFile(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config " + path.string());
    RunConfig c;
    try
    {
        c.merge(nlohmann::json::parse(in));
    }
    catch (const nlohmann::json::exception& e)
    {
        throw FormatError("config " + path.string() + ": " + e.what());
    }
    return c;
}

namespace
{

void ensureLogger()
{
    if (!spdlog::get("alphamotion"))
    {
        auto logger = spdlog::stderr_color_mt("alphamotion");
        logger->set_pattern("[%l] %v");
        spdlog::set_default_logger(logger);
    }
}

struct UsageError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

// Flags that were given explicitly override the config file.
struct ConfigFlags
{
    std::string configPath;
    std::string canvas;
    int frames = 0;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    std::string out;
    CLI::Option* seedOpt = nullptr;
    CLI::Option* framesOpt = nullptr;
    CLI::Option* thresholdOpt = nullptr;

    void add(CLI::App& cmd, bool withThreshold)
    {
        cmd.add_option("--config", configPath, "JSON run configuration");
        cmd.add_option("--canvas", canvas, "Canvas size as WxH");
        framesOpt = cmd.add_option("--frames", frames, "Frames per clip");
        seedOpt = cmd.add_option("--seed", seed, "Random seed");
        cmd.add_option("--out", out, "Dataset output root");
        if (withThreshold)
            thresholdOpt = cmd.add_option("--threshold", threshold, "Foreground motion threshold (px/frame)");
    }

    RunConfig resolve() const
    {
        RunConfig c = configPath.empty() ? RunConfig{} : RunConfig::fromFile(configPath);
        if (!canvas.empty())
            c.canvas = parseCanvas(canvas);
        if (framesOpt && framesOpt->count())
            c.frameCount = frames;
        if (seedOpt && seedOpt->count())
            c.seed = seed;
        if (thresholdOpt && thresholdOpt->count())
            c.motionThreshold = threshold;
        if (!out.empty())
            c.outputRoot = out;
        try
        {
            c.validate();
        }
        catch (const std::invalid_argument& e)
        {
            throw UsageError(e.what());
        }
        return c;
    }
};

std::int64_t nowSeconds()
{
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// Merges new entries into <root>/manifest.jsonl, replacing entries that share an id.
DatasetManifest updateManifest(const fs::path& root, const std::vector<DatasetEntry>& added,
                               std::optional<double> threshold)
{
    const fs::path path = root / kManifestFileName;
    DatasetManifest previous;
    if (fs::exists(path))
        previous = readManifest(path);

    DatasetManifest merged;
    for (const auto& e : previous.entries())
    {
        const bool replaced =
            std::any_of(added.begin(), added.end(), [&](const DatasetEntry& a) { return a.id == e.id; });
        if (!replaced)
            merged.add(e);
    }
    for (const auto& e : added)
        merged.add(e);
    if (threshold)
        merged.setMotionThreshold(*threshold);
    else if (previous.motionThreshold())
        merged.setMotionThreshold(*previous.motionThreshold());
    writeManifest(merged, path);
    return merged;
}

nlohmann::json skippedJson(const std::vector<SkippedItem>& skipped)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : skipped)
        arr.push_back({{"item", s.item}, {"reason", s.reason}});
    return arr;
}

nlohmann::json idsJson(const std::vector<DatasetEntry>& entries)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries)
        arr.push_back(e.id);
    return arr;
}

void emitSummary(std::ostream& out, bool json, const nlohmann::json& summary)
{
    if (json)
    {
        out << summary.dump() << '\n';
        return;
    }
    for (const auto& [k, v] : summary.items())
        if (!v.is_array())
            out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
}

} // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    ensureLogger();

    CLI::App app{"Transparent motion dataset toolchain"};
    app.require_subcommand(1);
    app.fallthrough();
    bool jsonSummary = false;
    app.add_flag("--json-summary", jsonSummary, "Print a machine-readable summary on stdout");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate synthetic motion clips from sprites");
    ConfigFlags synthFlags;
    synthFlags.add(*synth, false);
    std::string spritesDir;
    long long count = -1;
    unsigned threads = 0;
    std::int64_t timestamp = 0;
    synth->add_option("--sprites", spritesDir, "Directory of sprite PNGs")->required();
    synth->add_option("--count", count, "Number of clips")->required();
    synth->add_option("--threads", threads, "Worker threads (0 = all cores)");
    synth->add_option("--timestamp", timestamp, "created_at for every entry (default 0 for reproducibility)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Ingest game-effect, foreground or curated clips");
    ConfigFlags ingestFlags;
    ingestFlags.add(*ingest, true);
    std::string kind, input, rgbDir, maskDir, className, captionsPath;
    CLI::Option* ingestTimestampOpt = nullptr;
    std::int64_t ingestTimestamp = 0;
    ingest->add_option("--kind", kind, "game-effect | foreground | curated")
        ->required()
        ->check(CLI::IsMember({"game-effect", "foreground", "curated"}));
    ingest->add_option("--input", input, "Clip directory (game-effect, curated)");
    ingest->add_option("--rgb", rgbDir, "RGB frame directory (foreground)");
    ingest->add_option("--mask", maskDir, "Mask frame directory (foreground)");
    ingest->add_option("--class", className, "Class name (foreground)");
    ingest->add_option("--captions", captionsPath, "Captions file (curated)");
    ingestTimestampOpt = ingest->add_option("--timestamp", ingestTimestamp, "created_at (default: now)");

    // validate
    auto* validate = app.add_subcommand("validate", "Run the invariant self-check suites");
    std::vector<std::string> suites;
    std::string schedulePath;
    std::uint64_t validateSeed = 1;
    auto* suiteOpt = validate->add_option("--suite", suites, "math, roundtrip (default: all)")->delimiter(',');
    validate->add_option("--schedule", schedulePath, "JSON {\"alpha_bar\": [...]} schedule to check");
    validate->add_option("--seed", validateSeed, "Seed for randomized checks");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the preview HTTP service");
    int port = 8080;
    std::string host = "127.0.0.1";
    ServiceLimits limits;
    serve->add_option("--port", port, "Listen port");
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--max-canvas", limits.maxCanvas, "Largest canvas side accepted");
    serve->add_option("--max-frames", limits.maxFrames, "Largest frame_count accepted");

    std::vector<std::string> argvStore;
    argvStore.reserve(args.size() + 1);
    argvStore.push_back("alphamotion");
    argvStore.insert(argvStore.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argvStore)
        argv.push_back(a.c_str());

    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (*synth)
        {
            if (count < 1)
                throw UsageError("--count must be >= 1");
            const RunConfig cfg = synthFlags.resolve();
            const auto sprites = loadSprites(spritesDir);
            if (sprites.empty())
                throw UsageError("no sprite PNGs in " + spritesDir);
            SpecDistribution dist = cfg.distribution;
            dist.canvas = cfg.canvas;
            dist.frameCount = cfg.frameCount;
            dist.fps = cfg.fps;
            SynthOptions opts;
            opts.outputRoot = cfg.outputRoot;
            opts.createdAt = timestamp;
            opts.threads = threads;
            opts.templates = cfg.templates;
            const SynthResult r = generateSynthetic(sprites, static_cast<std::size_t>(count), cfg.seed, dist, opts);
            const DatasetManifest m = updateManifest(cfg.outputRoot, r.entries, std::nullopt);
            spdlog::info("synth: wrote {} entries to {}", r.entries.size(), cfg.outputRoot.string());
            emitSummary(out, jsonSummary,
                        {{"command", "synth"},
                         {"requested", r.requested},
                         {"written", r.entries.size()},
                         {"deficit", r.deficit()},
                         {"manifest", (cfg.outputRoot / kManifestFileName).string()},
                         {"manifest_entries", m.size()},
                         {"skipped", skippedJson(r.skipped)}});
            return kExitOk;
        }

        if (*ingest)
        {
            const RunConfig cfg = ingestFlags.resolve();
            IngestOptions opts;
            opts.outputRoot = cfg.outputRoot;
            opts.createdAt = ingestTimestampOpt->count() ? ingestTimestamp : nowSeconds();
            fs::create_directories(cfg.outputRoot);

            IngestResult r;
            std::optional<double> threshold;
            std::size_t filtered = 0;
            if (kind == "game-effect")
            {
                if (input.empty())
                    throw UsageError("--input is required for game-effect ingestion");
                r = ingestGameEffects(input, opts);
            }
            else if (kind == "foreground")
            {
                if (rgbDir.empty() || maskDir.empty())
                    throw UsageError("--rgb and --mask are required for foreground ingestion");
                threshold = cfg.motionThreshold;
                auto e = ingestForeground(rgbDir, maskDir, cfg.motionThreshold, opts, className);
                if (e)
                    r.entries.push_back(std::move(*e));
                else
                    filtered = 1;
            }
            else
            {
                if (input.empty() || captionsPath.empty())
                    throw UsageError("--input and --captions are required for curated import");
                r = importCurated(input, captionsPath, opts);
            }
            const DatasetManifest m = updateManifest(cfg.outputRoot, r.entries, threshold);
            emitSummary(out, jsonSummary,
                        {{"command", "ingest"},
                         {"kind", kind},
                         {"added", r.entries.size()},
                         {"added_ids", idsJson(r.entries)},
                         {"filtered", filtered},
                         {"skipped", skippedJson(r.skipped)},
                         {"manifest_entries", m.size()}});
            return kExitOk;
        }

        if (*validate)
        {
            ValidationOptions opts;
            if (suiteOpt->count())
            {
                opts.suites.clear();
                for (const auto& s : suites)
                    if (!s.empty())
                        opts.suites.insert(s);
                if (opts.suites.empty())
                    throw UsageError("--suite given without any suite name");
                for (const auto& s : opts.suites)
                    if (!kValidationSuites.count(s))
                        throw UsageError("unknown suite '" + s + "'");
            }
            opts.seed = validateSeed;
            if (!schedulePath.empty())
                opts.scheduleOverride = readScheduleFile(schedulePath);
            const auto results = runValidation(opts);
            std::size_t failed = 0;
            nlohmann::json list = nlohmann::json::array();
            for (const auto& r : results)
            {
                failed += r.passed ? 0 : 1;
                if (!jsonSummary)
                    out << (r.passed ? "PASS " : "FAIL ") << r.suite << '/' << r.name
                        << (r.detail.empty() ? "" : ": " + r.detail) << '\n';
                list.push_back({{"suite", r.suite}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
            }
            if (jsonSummary)
                out << nlohmann::json{{"command", "validate"}, {"failed", failed}, {"checks", list}}.dump() << '\n';
            else
                out << (results.size() - failed) << "/" << results.size() << " checks passed\n";
            return failed == 0 ? kExitOk : kExitValidation;
        }

        if (*serve)
        {
            if (limits.maxCanvas < 64 || limits.maxFrames < 1)
                throw UsageError("--max-canvas must be >= 64 and --max-frames >= 1");
            httplib::Server server;
            PreviewService service(limits);
            service.mount(server);
            // httplib's default also sets SO_REUSEPORT, which would let two servers share a port
            server.set_socket_options([](socket_t sock) {
                int yes = 1;
                ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
            });
            if (!server.bind_to_port(host, port))
            {
                err << "error: cannot listen on " << host << ":" << port << '\n';
                return kExitIo;
            }
            spdlog::info("serving on http://{}:{}/v1/", host, port);
            server.listen_after_bind();
            return kExitOk;
        }
    }
    catch (const UsageError& e)
    {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const IoError& e)
    {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    catch (const fs::filesystem_error& e)
    {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitUsage;
}

} // namespace alphamotion
