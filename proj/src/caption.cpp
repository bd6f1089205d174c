#include "alphamotion/caption.hpp"

#include <stdexcept>

namespace alphamotion
{

namespace
{
constexpr std::array<std::string_view, 4> kSourceNames = {"game_effect", "foreground", "synthetic", "iterated"};

std::string trimRight(std::string s)
{
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    return s;
}

std::string removeToken(std::string text, std::string_view token)
{
    for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos))
    {
        auto end = pos + token.size();
        // Swallow one adjoining space so removal does not leave a gap.
        if (end < text.size() && text[end] == ' ')
            ++end;
        else if (pos > 0 && text[pos - 1] == ' ')
            --pos;
        text.erase(pos, end - pos);
    }
    return text;
}
} // namespace

std::string_view toString(Source s) { return kSourceNames[static_cast<int>(s)]; }

Source parseSource(std::string_view s)
{
    for (int i = 0; i < 4; ++i)
        if (kSourceNames[i] == s)
            return static_cast<Source>(i);
    throw std::invalid_argument("unknown source kind '" + std::string(s) + "'");
}

SourceQuality sourceQuality(Source s)
{
    switch (s)
    {
    case Source::GameEffect: return {true, true, false};
    case Source::Foreground: return {false, true, true};
    case Source::Synthetic: return {true, false, true};
    case Source::Iterated: return {true, true, true};
    }
    throw std::invalid_argument("unknown source kind");
}

std::vector<std::string> triggersFor(Source s)
{
    const SourceQuality q = sourceQuality(s);
    std::vector<std::string> out;
    if (q.edge)
        out.emplace_back(kEdgeTrigger);
    if (q.motion)
        out.emplace_back(kMotionTrigger);
    return out;
}

CaptionTemplates CaptionTemplates::fromJson(const nlohmann::json& j)
{
    CaptionTemplates t;
    if (!j.is_object())
        return t;
    if (j.contains("direction_words"))
    {
        const auto words = j["direction_words"].get<std::vector<std::string>>();
        if (words.size() != 8)
            throw std::invalid_argument("direction_words needs 8 entries (E, NE, N, NW, W, SW, S, SE)");
        std::copy(words.begin(), words.end(), t.directionWords.begin());
    }
    t.moving = j.value("moving", t.moving);
    t.grow = j.value("grow", t.grow);
    t.stable = j.value("stable", t.stable);
    t.shrink = j.value("shrink", t.shrink);
    t.rotating = j.value("rotating", t.rotating);
    t.separator = j.value("separator", t.separator);
    return t;
}

std::string motionPhrase(const MotionSpec& spec, const CaptionTemplates& t)
{
    std::string phrase;
    if (spec.direction)
        phrase = t.moving + " " + t.directionWords[static_cast<int>(*spec.direction)] + t.separator;
    switch (spec.scaleMode)
    {
    case ScaleMode::Grow: phrase += t.grow; break;
    case ScaleMode::Stable: phrase += t.stable; break;
    case ScaleMode::Shrink: phrase += t.shrink; break;
    }
    if (spec.rotationRate != 0.0)
        phrase += t.separator + t.rotating;
    return phrase;
}

CaptionRecord composeCaption(std::string_view className, std::string_view phrase, Source source)
{
    if (className.empty())
        throw std::invalid_argument("caption class name must not be empty");
    CaptionRecord rec;
    rec.className = std::string(className);
    rec.motionPhrase = std::string(phrase);
    rec.triggers = triggersFor(source);
    rec.source = source;
    rec.fullText = rec.className;
    if (!rec.motionPhrase.empty())
        rec.fullText += " " + rec.motionPhrase;
    for (const auto& tok : rec.triggers)
        rec.fullText += " " + tok;
    return rec;
}

CaptionRecord composeCaption(std::string_view className, const MotionSpec& spec, Source source,
                             const CaptionTemplates& templates)
{
    return composeCaption(className, motionPhrase(spec, templates), source);
}

std::size_t countOccurrences(std::string_view text, std::string_view token)
{
    std::size_t n = 0;
    for (auto pos = text.find(token); pos != std::string_view::npos; pos = text.find(token, pos + token.size()))
        ++n;
    return n;
}

std::string inferencePrompt(std::string_view base)
{
    std::string text(base);
    const std::string suffix = std::string(kEdgeTrigger) + " " + std::string(kMotionTrigger);
    if (countOccurrences(text, kEdgeTrigger) == 1 && countOccurrences(text, kMotionTrigger) == 1 &&
        text.size() >= suffix.size() && text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0)
        return text;

    text = trimRight(removeToken(removeToken(std::move(text), kEdgeTrigger), kMotionTrigger));
    return text.empty() ? suffix : text + " " + suffix;
}

nlohmann::json toJson(const CaptionRecord& c)
{
    return {{"class_name", c.className},
            {"motion_phrase", c.motionPhrase},
            {"triggers", c.triggers},
            {"source", std::string(toString(c.source))},
            {"full_text", c.fullText}};
}

CaptionRecord captionFromJson(const nlohmann::json& j)
{
    CaptionRecord c;
    c.className = j.at("class_name").get<std::string>();
    c.motionPhrase = j.at("motion_phrase").get<std::string>();
    c.triggers = j.at("triggers").get<std::vector<std::string>>();
    c.source = parseSource(j.at("source").get<std::string>());
    c.fullText = j.at("full_text").get<std::string>();
    return c;
}

} // namespace alphamotion
