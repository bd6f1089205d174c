#pragma once

#include "alphamotion/caption.hpp"
#include "alphamotion/image_io.hpp"
#include "alphamotion/motion_spec.hpp"
#include "alphamotion/rgba.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphamotion
{

class ValidationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class SchemaVersionError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kManifestFileName = "manifest.jsonl";
inline constexpr const char* kControlImageName = "control.png";
inline constexpr const char* kControlSpecName = "control.spec";
inline constexpr const char* kCaptionFileName = "caption.json";
inline constexpr double kDefaultMotionThreshold = 1.0;

struct DatasetEntry
{
    std::string id;
    Source source = Source::Synthetic;
    std::string clipPath;                    // relative to the dataset root
    std::optional<std::string> controlPath;  // relative to the dataset root
    CaptionRecord caption;
    double edgeScore = 1.0;
    double motionScore = 0.0;
    std::int64_t createdAt = 0;              // seconds since the Unix epoch

    bool operator==(const DatasetEntry&) const = default;
};

nlohmann::json toJson(const DatasetEntry& e);
DatasetEntry entryFromJson(const nlohmann::json& j);

void validateEntry(const DatasetEntry& e);

class DatasetManifest
{
public:
    DatasetManifest() = default;

    // Rejects duplicate ids and entries that break the per-source rules.
    void add(DatasetEntry entry);
    void addAll(std::vector<DatasetEntry> entries);

    const std::vector<DatasetEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t count(Source s) const;
    std::map<Source, std::size_t> counts() const { return counts_; }
    bool contains(const std::string& id) const;

    int schemaVersion() const { return schemaVersion_; }
    std::optional<double> motionThreshold() const { return motionThreshold_; }
    void setMotionThreshold(double t) { motionThreshold_ = t; }

    bool operator==(const DatasetManifest&) const = default;

private:
    std::vector<DatasetEntry> entries_;
    std::map<Source, std::size_t> counts_{
        {Source::GameEffect, 0}, {Source::Foreground, 0}, {Source::Synthetic, 0}, {Source::Iterated, 0}};
    int schemaVersion_ = kSchemaVersion;
    std::optional<double> motionThreshold_;
};

// Header line (schema_version, counts, entry_count, motion_threshold) then
// one entry per line. UTF-8, LF endings.
std::string serializeManifest(const DatasetManifest& m);
DatasetManifest parseManifest(const std::string& text);
void writeManifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest readManifest(const std::filesystem::path& path);

struct SkippedItem
{
    std::string item;
    std::string reason;
};

struct IngestResult
{
    std::vector<DatasetEntry> entries;
    std::vector<SkippedItem> skipped;
};

// Scores shared by all sources: mean per-frame edge quality and centroid speed.
double clipEdgeScore(const RgbaClip& clip);

// Rough motion description of an unlabelled clip, for captioning: net
// centroid heading (none below 0.5 px/frame) and alpha-mass trend.
MotionSpec estimateMotion(const RgbaClip& clip);

struct IngestOptions
{
    std::filesystem::path outputRoot;   // entry directories are written here
    std::int64_t createdAt = 0;
};

// Every subdirectory of `dir` holding a clip (frames + meta sidecar) becomes a
// game_effect entry. Broken clips are skipped and reported.
IngestResult ingestGameEffects(const std::filesystem::path& dir, const IngestOptions& opts);

// Combines an RGB sequence with a matte sequence. Returns nullopt when the
// clip's motion falls below the threshold.
std::optional<DatasetEntry> ingestForeground(const std::filesystem::path& rgbClip,
                                             const std::filesystem::path& maskClip, double threshold,
                                             const IngestOptions& opts, std::string className = {});

struct SpecDistribution
{
    Extent canvas{256, 256};
    int frameCount = 16;
    double fps = 8.0;
    double noDirectionProbability = 0.1;
    double minVelocity = 0.5;
    double maxVelocity = 6.0;
    double growWeight = 1.0;
    double stableWeight = 1.0;
    double shrinkWeight = 1.0;
    double minGrowRate = 1.01;
    double maxGrowRate = 1.05;
    double minShrinkRate = 0.95;
    double maxShrinkRate = 0.99;
    double rotationProbability = 0.3;
    double maxRotationRate = 10.0;   // deg/frame, drawn from [-max, max]

    void validate() const;
    static SpecDistribution fromJson(const nlohmann::json& j);  // missing keys keep defaults
    nlohmann::json toJson() const;
};

MotionSpec drawMotionSpec(std::uint64_t seed, const SpecDistribution& dist);

// Per-entry seed: seed XOR index.
inline std::uint64_t entrySeed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

struct NamedSprite
{
    std::string className;
    RgbaFrame image;
};

// Loads every *.png in `dir`; the class name is the file stem up to the first
// '_' (fire_01.png -> fire).
std::vector<NamedSprite> loadSprites(const std::filesystem::path& dir);

struct SynthOptions
{
    std::filesystem::path outputRoot;
    std::int64_t createdAt = 0;
    unsigned threads = 0;   // 0: hardware concurrency
    CaptionTemplates templates;
};

struct SynthResult
{
    std::vector<DatasetEntry> entries;
    std::vector<SkippedItem> skipped;
    std::size_t requested = 0;
    std::size_t deficit() const { return requested - entries.size(); }
};

std::string synthEntryId(std::size_t index);

SynthResult generateSynthetic(const std::vector<NamedSprite>& sprites, std::size_t count, std::uint64_t seed,
                              const SpecDistribution& dist, const SynthOptions& opts);

// `captions` is line-delimited JSON: {"id": ..., "caption": ...} per line.
IngestResult importCurated(const std::filesystem::path& clips, const std::filesystem::path& captions,
                           const IngestOptions& opts);

std::map<std::string, std::string> readCaptionsFile(const std::filesystem::path& path);

} // namespace alphamotion
