#pragma once

#include "alphamotion/motion_spec.hpp"

#include "json.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace alphamotion
{

enum class Source
{
    GameEffect,
    Foreground,
    Synthetic,
    Iterated,
};

inline constexpr std::array<Source, 4> kAllSources = {Source::GameEffect, Source::Foreground, Source::Synthetic,
                                                      Source::Iterated};

std::string_view toString(Source s);  // game_effect, foreground, synthetic, iterated
Source parseSource(std::string_view s);

inline constexpr std::string_view kEdgeTrigger = "<edge_hq>";
inline constexpr std::string_view kMotionTrigger = "<motion_hq>";

// Quality axes each source is known to be good at.
struct SourceQuality
{
    bool edge;
    bool motion;
    bool diversity;
};
SourceQuality sourceQuality(Source s);

// Trigger tokens for a source, edge before motion.
std::vector<std::string> triggersFor(Source s);

struct CaptionTemplates
{
    std::array<std::string, 8> directionWords = {"right", "up-right", "up",        "up-left",
                                                 "left",  "down-left", "down", "down-right"};
    std::string moving = "moving";
    std::string grow = "growing larger";
    std::string stable = "at constant size";
    std::string shrink = "shrinking";
    std::string rotating = "rotating";
    std::string separator = ", ";

    static CaptionTemplates fromJson(const nlohmann::json& j);  // missing keys keep defaults
};

struct CaptionRecord
{
    std::string className;
    std::string motionPhrase;
    std::vector<std::string> triggers;
    Source source = Source::Synthetic;
    std::string fullText;

    bool operator==(const CaptionRecord&) const = default;
};

std::string motionPhrase(const MotionSpec& spec, const CaptionTemplates& templates = {});

// "<class> <motion phrase> <triggers...>"
CaptionRecord composeCaption(std::string_view className, const MotionSpec& spec, Source source,
                             const CaptionTemplates& templates = {});

// Caption for text supplied verbatim (curated sources): class_name carries the
// text, the phrase comes from the observed motion.
CaptionRecord composeCaption(std::string_view className, std::string_view phrase, Source source);

// Appends both triggers, each exactly once, edge first. Idempotent.
std::string inferencePrompt(std::string_view base);

std::size_t countOccurrences(std::string_view text, std::string_view token);

nlohmann::json toJson(const CaptionRecord& c);
CaptionRecord captionFromJson(const nlohmann::json& j);

} // namespace alphamotion
