#include "alphamotion/dataset.hpp"

#include "alphamotion/compositing.hpp"
#include "alphamotion/control_map.hpp"
#include "alphamotion/motion_spec_io.hpp"
#include "alphamotion/motion_synth.hpp"
#include "alphamotion/random.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace alphamotion
{

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Entries and manifest

nlohmann::json toJson(const DatasetEntry& e)
{
    nlohmann::json j;
    j["id"] = e.id;
    j["source"] = std::string(toString(e.source));
    j["clip_path"] = e.clipPath;
    j["control_path"] = e.controlPath ? nlohmann::json(*e.controlPath) : nlohmann::json(nullptr);
    j["caption"] = toJson(e.caption);
    j["edge_score"] = e.edgeScore;
    j["motion_score"] = e.motionScore;
    j["created_at"] = e.createdAt;
    return j;
}

DatasetEntry entryFromJson(const nlohmann::json& j)
{
    DatasetEntry e;
    try
    {
        e.id = j.at("id").get<std::string>();
        e.source = parseSource(j.at("source").get<std::string>());
        e.clipPath = j.at("clip_path").get<std::string>();
        if (j.contains("control_path") && !j["control_path"].is_null())
            e.controlPath = j["control_path"].get<std::string>();
        e.caption = captionFromJson(j.at("caption"));
        e.edgeScore = j.at("edge_score").get<double>();
        e.motionScore = j.at("motion_score").get<double>();
        e.createdAt = j.at("created_at").get<std::int64_t>();
    }
    catch (const nlohmann::json::exception& ex)
    {
        throw ValidationError(std::string("manifest entry: ") + ex.what());
    }
    catch (const std::invalid_argument& ex)
    {
        throw ValidationError(std::string("manifest entry: ") + ex.what());
    }
    return e;
}

void validateEntry(const DatasetEntry& e)
{
    if (e.id.empty())
        throw ValidationError("entry id must not be empty");
    if (e.source == Source::Synthetic && !e.controlPath)
        throw ValidationError("synthetic entry " + e.id + " has no control map");
    if (!std::isfinite(e.edgeScore) || e.edgeScore < 0.0 || e.edgeScore > 1.0)
        throw ValidationError("entry " + e.id + " has edge_score outside [0,1]");
    if (!std::isfinite(e.motionScore) || e.motionScore < 0.0)
        throw ValidationError("entry " + e.id + " has negative or non-finite motion_score");
    if (e.caption.source != e.source)
        throw ValidationError("entry " + e.id + " caption source disagrees with entry source");
    if (e.caption.triggers != triggersFor(e.source))
        throw ValidationError("entry " + e.id + " carries the wrong trigger tokens for its source");
}

void DatasetManifest::add(DatasetEntry entry)
{
    validateEntry(entry);
    if (contains(entry.id))
        throw ValidationError("duplicate entry id " + entry.id);
    ++counts_[entry.source];
    entries_.push_back(std::move(entry));
}

void DatasetManifest::addAll(std::vector<DatasetEntry> entries)
{
    for (auto& e : entries)
        add(std::move(e));
}

std::size_t DatasetManifest::count(Source s) const { return counts_.at(s); }

bool DatasetManifest::contains(const std::string& id) const
{
    return std::any_of(entries_.begin(), entries_.end(), [&](const DatasetEntry& e) { return e.id == id; });
}

std::string serializeManifest(const DatasetManifest& m)
{
    nlohmann::json counts = nlohmann::json::object();
    for (Source s : kAllSources)
        counts[std::string(toString(s))] = m.count(s);
    nlohmann::json header;
    header["schema_version"] = m.schemaVersion();
    header["entry_count"] = m.size();
    header["counts"] = counts;
    header["motion_threshold"] = m.motionThreshold() ? nlohmann::json(*m.motionThreshold()) : nlohmann::json(nullptr);

    std::string out = header.dump() + "\n";
    for (const auto& e : m.entries())
        out += toJson(e).dump() + "\n";
    return out;
}

DatasetManifest parseManifest(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("manifest is empty (missing header line)");

    nlohmann::json header;
    try
    {
        header = nlohmann::json::parse(line);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ValidationError(std::string("manifest header: ") + e.what());
    }
    if (!header.is_object() || !header.contains("schema_version"))
        throw ValidationError("manifest header lacks schema_version");
    const int version = header["schema_version"].get<int>();
    if (version != kSchemaVersion)
        throw SchemaVersionError("manifest schema_version " + std::to_string(version) + " is not supported (expected " +
                                 std::to_string(kSchemaVersion) + ")");

    DatasetManifest m;
    if (header.contains("motion_threshold") && !header["motion_threshold"].is_null())
        m.setMotionThreshold(header["motion_threshold"].get<double>());

    std::size_t lineNo = 1;
    while (std::getline(in, line))
    {
        ++lineNo;
        if (line.empty())
            continue;
        try
        {
            m.add(entryFromJson(nlohmann::json::parse(line)));
        }
        catch (const nlohmann::json::parse_error& e)
        {
            throw ValidationError("manifest line " + std::to_string(lineNo) + ": " + e.what());
        }
    }

    try
    {
        if (header.at("entry_count").get<std::size_t>() != m.size())
            throw ValidationError("manifest header entry_count " + header["entry_count"].dump() + " disagrees with " +
                                  std::to_string(m.size()) + " entries");
        const auto& counts = header.at("counts");
        for (Source s : kAllSources)
        {
            const auto declared = counts.at(std::string(toString(s))).get<std::size_t>();
            if (declared != m.count(s))
                throw ValidationError("manifest header count for " + std::string(toString(s)) + " is " +
                                      std::to_string(declared) + " but body has " + std::to_string(m.count(s)));
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError(std::string("manifest header: ") + e.what());
    }
    return m;
}

void writeManifest(const DatasetManifest& m, const fs::path& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    const std::string text = serializeManifest(m);
    writeFileBytes(path, Bytes(text.begin(), text.end()));
}

DatasetManifest readManifest(const fs::path& path)
{
    const Bytes b = readFileBytes(path);
    return parseManifest(std::string(b.begin(), b.end()));
}

// ---------------------------------------------------------------------------
// Scores and motion estimation

double clipEdgeScore(const RgbaClip& clip)
{
    double sum = 0.0;
    for (const auto& f : clip.frames())
        sum += edgeQuality(f);
    return sum / static_cast<double>(clip.size());
}

MotionSpec estimateMotion(const RgbaClip& clip)
{
    MotionSpec spec;
    spec.frameCount = static_cast<int>(clip.size());
    if (clip.size() < 2)
        return spec;

    const double steps = static_cast<double>(clip.size() - 1);
    const double firstMass = clip[0].alpha().sum();
    const double lastMass = clip[clip.size() - 1].alpha().sum();
    if (firstMass > 0.0 && lastMass > 0.0)
    {
        const Eigen::Vector2d net = alphaCentroid(clip[clip.size() - 1]) - alphaCentroid(clip[0]);
        const double speed = net.norm() / steps;
        if (speed >= 0.5)
        {
            spec.direction = snapHeading(std::atan2(-net.y(), net.x()) * 180.0 / std::numbers::pi);
            spec.velocity = speed;
        }
        const double rate = std::pow(lastMass / firstMass, 0.5 / steps);
        if (rate > 1.005)
        {
            spec.scaleMode = ScaleMode::Grow;
            spec.scaleRate = rate;
        }
        else if (rate < 0.995)
        {
            spec.scaleMode = ScaleMode::Shrink;
            spec.scaleRate = rate;
        }
    }
    return spec;
}

namespace
{

void replaceDirectory(const fs::path& dir)
{
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string relativeTo(const fs::path& p, const fs::path& root)
{
    return root.empty() ? p.string() : fs::relative(p, root).generic_string();
}

std::vector<fs::path> sortedSubdirectories(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw IoError("not a readable directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_directory())
            out.push_back(e.path());
    if (ec)
        throw IoError("cannot list " + dir.string() + ": " + ec.message());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Game effects

IngestResult ingestGameEffects(const fs::path& dir, const IngestOptions& opts)
{
    IngestResult result;
    for (const auto& clipDir : sortedSubdirectories(dir))
    {
        const std::string name = clipDir.filename().string();
        try
        {
            const ClipMeta meta = readClipMeta(clipDir);
            const RgbaClip clip = readClip(clipDir);
            DatasetEntry e;
            e.id = "fx_" + name;
            e.source = Source::GameEffect;
            e.motionScore = motionMagnitude(clip);
            e.edgeScore = clipEdgeScore(clip);
            const std::string className = meta.extra.value("class_name", name);
            e.caption = composeCaption(className, estimateMotion(clip), Source::GameEffect);
            e.createdAt = opts.createdAt;
            if (!opts.outputRoot.empty())
            {
                const fs::path out = opts.outputRoot / e.id;
                replaceDirectory(out);
                writeClip(out, clip, meta.extra);
                e.clipPath = relativeTo(out, opts.outputRoot);
            }
            else
            {
                e.clipPath = clipDir.string();
            }
            result.entries.push_back(std::move(e));
        }
        catch (const IoError&)
        {
            throw;
        }
        catch (const std::exception& ex)
        {
            spdlog::warn("skipping game-effect clip {}: {}", name, ex.what());
            result.skipped.push_back({name, ex.what()});
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Foreground extraction

std::optional<DatasetEntry> ingestForeground(const fs::path& rgbClip, const fs::path& maskClip, double threshold,
                                             const IngestOptions& opts, std::string className)
{
    const auto rgbFiles = listFramePngs(rgbClip);
    const auto maskFiles = listFramePngs(maskClip);
    if (rgbFiles.size() != maskFiles.size())
        throw std::invalid_argument("foreground: rgb has " + std::to_string(rgbFiles.size()) + " frames, mask has " +
                                    std::to_string(maskFiles.size()));
    if (rgbFiles.empty())
        throw std::invalid_argument("foreground: no frames in " + rgbClip.string());

    double fps = kDefaultFps;
    if (fs::exists(rgbClip / kMetaFileName))
        fps = readClipMeta(rgbClip).fps;

    std::vector<RgbaFrame> frames;
    frames.reserve(rgbFiles.size());
    for (std::size_t i = 0; i < rgbFiles.size(); ++i)
    {
        RgbaFrame rgb = readPng(rgbFiles[i]);
        rgb.alpha().setOnes();
        frames.push_back(applyMask(rgb, readMaskPng(maskFiles[i])));
    }
    const RgbaClip clip(std::move(frames), fps);
    const double motion = motionMagnitude(clip);
    if (motion < threshold)
    {
        spdlog::info("foreground {} filtered: motion {:.3f} px/frame below threshold {:.3f}", rgbClip.string(), motion,
                     threshold);
        return std::nullopt;
    }

    const std::string name = rgbClip.filename().string();
    DatasetEntry e;
    e.id = "fg_" + name;
    e.source = Source::Foreground;
    e.motionScore = motion;
    e.edgeScore = clipEdgeScore(clip);
    e.caption = composeCaption(className.empty() ? name : className, estimateMotion(clip), Source::Foreground);
    e.createdAt = opts.createdAt;
    if (opts.outputRoot.empty())
        throw std::invalid_argument("foreground ingestion needs an output root for the composed RGBA clip");
    const fs::path out = opts.outputRoot / e.id;
    replaceDirectory(out);
    writeClip(out, clip);
    e.clipPath = relativeTo(out, opts.outputRoot);
    return e;
}

// ---------------------------------------------------------------------------
// Synthetic generation

void SpecDistribution::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("spec distribution: " + what); };
    if (canvas.width < 64 || canvas.height < 64)
        fail("canvas must be at least 64x64");
    if (frameCount < 2)
        fail("frame_count must be >= 2");
    if (!(fps > 0.0))
        fail("fps must be positive");
    if (noDirectionProbability < 0.0 || noDirectionProbability > 1.0 || rotationProbability < 0.0 ||
        rotationProbability > 1.0)
        fail("probabilities must lie in [0,1]");
    if (minVelocity < 0.0 || maxVelocity < minVelocity)
        fail("velocity range must satisfy 0 <= min <= max");
    if (growWeight < 0.0 || stableWeight < 0.0 || shrinkWeight < 0.0 ||
        !(growWeight + stableWeight + shrinkWeight > 0.0))
        fail("scale mode weights must be non-negative with positive sum");
    if (!(minGrowRate > 1.0) || maxGrowRate < minGrowRate)
        fail("grow rates must satisfy 1 < min <= max");
    if (!(minShrinkRate > 0.0) || maxShrinkRate < minShrinkRate || !(maxShrinkRate < 1.0))
        fail("shrink rates must satisfy 0 < min <= max < 1");
    if (maxRotationRate < 0.0)
        fail("max rotation rate must be >= 0");
}

SpecDistribution SpecDistribution::fromJson(const nlohmann::json& j)
{
    SpecDistribution d;
    if (!j.is_object())
        return d;
    if (j.contains("canvas"))
    {
        d.canvas.width = j["canvas"].at(0).get<int>();
        d.canvas.height = j["canvas"].at(1).get<int>();
    }
    d.frameCount = j.value("frame_count", d.frameCount);
    d.fps = j.value("fps", d.fps);
    d.noDirectionProbability = j.value("no_direction_probability", d.noDirectionProbability);
    d.minVelocity = j.value("min_velocity", d.minVelocity);
    d.maxVelocity = j.value("max_velocity", d.maxVelocity);
    d.growWeight = j.value("grow_weight", d.growWeight);
    d.stableWeight = j.value("stable_weight", d.stableWeight);
    d.shrinkWeight = j.value("shrink_weight", d.shrinkWeight);
    d.minGrowRate = j.value("min_grow_rate", d.minGrowRate);
    d.maxGrowRate = j.value("max_grow_rate", d.maxGrowRate);
    d.minShrinkRate = j.value("min_shrink_rate", d.minShrinkRate);
    d.maxShrinkRate = j.value("max_shrink_rate", d.maxShrinkRate);
    d.rotationProbability = j.value("rotation_probability", d.rotationProbability);
    d.maxRotationRate = j.value("max_rotation_rate", d.maxRotationRate);
    return d;
}

nlohmann::json SpecDistribution::toJson() const
{
    return {{"canvas", {canvas.width, canvas.height}},
            {"frame_count", frameCount},
            {"fps", fps},
            {"no_direction_probability", noDirectionProbability},
            {"min_velocity", minVelocity},
            {"max_velocity", maxVelocity},
            {"grow_weight", growWeight},
            {"stable_weight", stableWeight},
            {"shrink_weight", shrinkWeight},
            {"min_grow_rate", minGrowRate},
            {"max_grow_rate", maxGrowRate},
            {"min_shrink_rate", minShrinkRate},
            {"max_shrink_rate", maxShrinkRate},
            {"rotation_probability", rotationProbability},
            {"max_rotation_rate", maxRotationRate}};
}

namespace
{

MotionSpec drawSpec(SplitMix64& rng, const SpecDistribution& dist)
{
    MotionSpec spec;
    spec.frameCount = dist.frameCount;
    if (!rng.bernoulli(dist.noDirectionProbability))
    {
        spec.direction = static_cast<Direction>(rng.below(8));
        spec.velocity = rng.uniform(dist.minVelocity, dist.maxVelocity);
    }
    const double total = dist.growWeight + dist.stableWeight + dist.shrinkWeight;
    const double pick = rng.uniform() * total;
    if (pick < dist.growWeight)
    {
        spec.scaleMode = ScaleMode::Grow;
        spec.scaleRate = rng.uniform(dist.minGrowRate, dist.maxGrowRate);
    }
    else if (pick < dist.growWeight + dist.stableWeight)
    {
        spec.scaleMode = ScaleMode::Stable;
        spec.scaleRate = 1.0;
    }
    else
    {
        spec.scaleMode = ScaleMode::Shrink;
        spec.scaleRate = rng.uniform(dist.minShrinkRate, dist.maxShrinkRate);
    }
    if (rng.bernoulli(dist.rotationProbability))
        spec.rotationRate = rng.uniform(-dist.maxRotationRate, dist.maxRotationRate);
    return spec;
}

struct SynthOutcome
{
    std::optional<DatasetEntry> entry;
    std::string error;
};

SynthOutcome synthesizeOne(const std::vector<NamedSprite>& sprites, std::size_t index, std::uint64_t seed,
                           const SpecDistribution& dist, const SynthOptions& opts)
{
    SynthOutcome outcome;
    try
    {
        SplitMix64 rng(entrySeed(seed, index));
        // spec first so drawMotionSpec(entrySeed(seed, index)) reproduces it
        const MotionSpec spec = drawSpec(rng, dist);
        const NamedSprite& sprite = sprites[rng.below(sprites.size())];
        const RgbaClip clip = synthesizeClip(sprite.image, spec, dist.canvas, dist.fps);
        const ControlMap control = renderControl(spec, dist.canvas);

        DatasetEntry e;
        e.id = synthEntryId(index);
        e.source = Source::Synthetic;
        e.motionScore = motionMagnitude(clip);
        e.edgeScore = clipEdgeScore(clip);
        e.caption = composeCaption(sprite.className, spec, Source::Synthetic, opts.templates);
        e.createdAt = opts.createdAt;

        const fs::path out = opts.outputRoot / e.id;
        replaceDirectory(out);
        writeClip(out, clip, {{"class_name", sprite.className}});
        writePng(out / kControlImageName, control.image);
        writeMotionSpec(out / kControlSpecName, spec);
        e.clipPath = relativeTo(out, opts.outputRoot);
        e.controlPath = relativeTo(out / kControlImageName, opts.outputRoot);
        outcome.entry = std::move(e);
    }
    catch (const std::exception& ex)
    {
        outcome.error = ex.what();
    }
    return outcome;
}

} // namespace

MotionSpec drawMotionSpec(std::uint64_t seed, const SpecDistribution& dist)
{
    SplitMix64 rng(seed);
    return drawSpec(rng, dist);
}

std::string synthEntryId(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "syn_%06zu", index);
    return buf;
}

std::vector<NamedSprite> loadSprites(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw IoError("sprite directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<NamedSprite> sprites;
    for (const auto& f : files)
    {
        const std::string stem = f.stem().string();
        sprites.push_back({stem.substr(0, stem.find('_')), readPng(f)});
    }
    return sprites;
}

SynthResult generateSynthetic(const std::vector<NamedSprite>& sprites, std::size_t count, std::uint64_t seed,
                              const SpecDistribution& dist, const SynthOptions& opts)
{
    if (sprites.empty())
        throw std::invalid_argument("synthetic generation needs at least one sprite");
    if (count < 1)
        throw std::invalid_argument("synthetic generation needs count >= 1");
    if (opts.outputRoot.empty())
        throw std::invalid_argument("synthetic generation needs an output root");
    dist.validate();
    fs::create_directories(opts.outputRoot);

    std::vector<SynthOutcome> outcomes(count);
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t)
            workers.emplace_back([&, t] {
                for (std::size_t i = t; i < count; i += threads)
                    outcomes[i] = synthesizeOne(sprites, i, seed, dist, opts);
            });
    }

    SynthResult result;
    result.requested = count;
    for (std::size_t i = 0; i < count; ++i)
    {
        if (outcomes[i].entry)
        {
            result.entries.push_back(std::move(*outcomes[i].entry));
        }
        else
        {
            spdlog::warn("skipping synthetic entry {}: {}", synthEntryId(i), outcomes[i].error);
            result.skipped.push_back({synthEntryId(i), outcomes[i].error});
        }
    }
    if (result.deficit() > 0)
        spdlog::warn("synthetic generation produced {} of {} requested entries", result.entries.size(), count);
    return result;
}

// ---------------------------------------------------------------------------
// Curated import

std::map<std::string, std::string> readCaptionsFile(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read captions file " + path.string());
    std::map<std::string, std::string> captions;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line))
    {
        ++lineNo;
        if (line.empty())
            continue;
        try
        {
            const auto j = nlohmann::json::parse(line);
            captions[j.at("id").get<std::string>()] = j.at("caption").get<std::string>();
        }
        catch (const nlohmann::json::exception& e)
        {
            throw FormatError("captions line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return captions;
}

IngestResult importCurated(const fs::path& clips, const fs::path& captionsPath, const IngestOptions& opts)
{
    const auto clipDirs = sortedSubdirectories(clips);
    IngestResult result;
    if (clipDirs.empty())
        return result;
    const auto captions = readCaptionsFile(captionsPath);

    for (const auto& clipDir : clipDirs)
    {
        const std::string id = clipDir.filename().string();
        const auto caption = captions.find(id);
        if (caption == captions.end() || caption->second.empty())
        {
            spdlog::warn("skipping curated clip {}: no caption", id);
            result.skipped.push_back({id, "no caption"});
            continue;
        }
        try
        {
            const ClipMeta meta = readClipMeta(clipDir);
            const RgbaClip clip = readClip(clipDir);
            const bool hasSpec = fs::exists(clipDir / kControlSpecName);
            const MotionSpec spec = hasSpec ? readMotionSpec(clipDir / kControlSpecName) : estimateMotion(clip);

            DatasetEntry e;
            e.id = "it_" + id;
            e.source = Source::Iterated;
            e.motionScore = motionMagnitude(clip);
            e.edgeScore = clipEdgeScore(clip);
            e.caption = composeCaption(caption->second, motionPhrase(spec), Source::Iterated);
            e.createdAt = opts.createdAt;
            if (opts.outputRoot.empty())
            {
                e.clipPath = clipDir.string();
                if (fs::exists(clipDir / kControlImageName))
                    e.controlPath = (clipDir / kControlImageName).string();
            }
            else
            {
                const fs::path out = opts.outputRoot / e.id;
                replaceDirectory(out);
                writeClip(out, clip, meta.extra);
                for (const char* extra : {kControlImageName, kControlSpecName})
                    if (fs::exists(clipDir / extra))
                        fs::copy_file(clipDir / extra, out / extra, fs::copy_options::overwrite_existing);
                e.clipPath = relativeTo(out, opts.outputRoot);
                if (fs::exists(out / kControlImageName))
                    e.controlPath = relativeTo(out / kControlImageName, opts.outputRoot);
            }
            result.entries.push_back(std::move(e));
        }
        catch (const IoError&)
        {
            throw;
        }
        catch (const std::exception& ex)
        {
            spdlog::warn("skipping curated clip {}: {}", id, ex.what());
            result.skipped.push_back({id, ex.what()});
        }
    }
    return result;
}

} // namespace alphamotion
