#include "doctest_setup.hpp"
#include "test_support.hpp"

#include "alphamotion/caption.hpp"

#include <set>

using namespace alphamotion;
using namespace testsupport;

namespace
{

bool hasToken(const std::vector<std::string>& v, std::string_view t)
{
    return std::find(v.begin(), v.end(), std::string(t)) != v.end();
}

} // namespace

TEST_CASE("trigger mapping follows the per-source quality table")
{
    for (Source s : kAllSources)
    {
        const SourceQuality q = sourceQuality(s);
        const auto t = triggersFor(s);
        CHECK(hasToken(t, kEdgeTrigger) == q.edge);
        CHECK(hasToken(t, kMotionTrigger) == q.motion);
    }
    CHECK(triggersFor(Source::Synthetic) == std::vector<std::string>{"<edge_hq>"});
    CHECK(triggersFor(Source::Foreground) == std::vector<std::string>{"<motion_hq>"});
    CHECK(triggersFor(Source::GameEffect) == std::vector<std::string>{"<edge_hq>", "<motion_hq>"});
    CHECK(triggersFor(Source::Iterated) == std::vector<std::string>{"<edge_hq>", "<motion_hq>"});
    CHECK(sourceQuality(Source::Synthetic).diversity);
    CHECK(sourceQuality(Source::Foreground).diversity);
    CHECK_FALSE(sourceQuality(Source::GameEffect).diversity);
}

TEST_CASE("source names")
{
    for (Source s : kAllSources)
        CHECK(parseSource(toString(s)) == s);
    CHECK(toString(Source::GameEffect) == "game_effect");
    CHECK_THROWS(parseSource("video"));
}

TEST_CASE("compose caption: fire moving right and growing, synthetic")
{
    const CaptionRecord c =
        composeCaption("fire", movingSpec(Direction::E, 2.0, ScaleMode::Grow, 1.03), Source::Synthetic);
    CHECK(c.fullText.find("fire") != std::string::npos);
    CHECK(c.fullText.find("moving right") != std::string::npos);
    CHECK(c.fullText.find("growing larger") != std::string::npos);
    CHECK(countOccurrences(c.fullText, kEdgeTrigger) == 1);
    CHECK(countOccurrences(c.fullText, kMotionTrigger) == 0);
    CHECK(c.fullText == "fire moving right, growing larger <edge_hq>");
}

TEST_CASE("compose caption: foreground gets the motion trigger")
{
    const CaptionRecord c = composeCaption("dancer", movingSpec(Direction::W, 1.0), Source::Foreground);
    CHECK(hasToken(c.triggers, kMotionTrigger));
    CHECK(countOccurrences(c.fullText, kMotionTrigger) == 1);
}

TEST_CASE("compose caption: null motion has no direction word")
{
    const CaptionRecord c = composeCaption("smoke", stableSpec(), Source::GameEffect);
    CHECK(c.motionPhrase == "at constant size");
    for (const auto& w : CaptionTemplates{}.directionWords)
        CHECK(c.motionPhrase.find(w) == std::string::npos);
    CHECK(c.fullText == "smoke at constant size <edge_hq> <motion_hq>");
}

TEST_CASE("compose caption: every direction word, rotation and shrink")
{
    const CaptionTemplates t;
    for (Direction d : kAllDirections)
    {
        const std::string p = motionPhrase(movingSpec(d, 1.0));
        CHECK(p.rfind("moving " + t.directionWords[static_cast<int>(d)], 0) == 0);
    }
    MotionSpec s = movingSpec(Direction::SE, 1.0, ScaleMode::Shrink, 0.97);
    s.rotationRate = 5.0;
    CHECK(motionPhrase(s) == "moving down-right, shrinking, rotating");
}

TEST_CASE("compose caption: invariants hold for every source and spec")
{
    SplitMix64 rng(31);
    for (int i = 0; i < 200; ++i)
    {
        const ScaleMode m = kAllScaleModes[rng.below(3)];
        MotionSpec s = movingSpec(kAllDirections[rng.below(8)], 1.0 + rng.below(5), m, rateFor(m));
        if (rng.bernoulli(0.2))
            s = stableSpec();
        if (rng.bernoulli(0.3))
            s.rotationRate = 3.0;
        const Source src = kAllSources[rng.below(4)];
        const CaptionRecord c = composeCaption("spark", s, src);
        CHECK(c.source == src);
        CHECK(c.triggers == triggersFor(src));
        CHECK(countOccurrences(c.fullText, "spark") == 1);
        CHECK(countOccurrences(c.fullText, c.motionPhrase) == 1);
        for (const auto& tok : c.triggers)
            CHECK(countOccurrences(c.fullText, tok) == 1);
        CHECK(composeCaption("spark", s, src) == c);
        CHECK(captionFromJson(toJson(c)) == c);
    }
    CHECK_THROWS(composeCaption("", stableSpec(), Source::Synthetic));
}

TEST_CASE("compose caption: distinct inputs give distinct captions")
{
    std::set<std::string> seen;
    std::size_t n = 0;
    for (const char* cls : {"fire", "smoke"})
        for (Direction d : kAllDirections)
            for (ScaleMode m : kAllScaleModes)
                for (Source src : kAllSources)
                {
                    seen.insert(composeCaption(cls, movingSpec(d, 1.0, m, rateFor(m)), src).fullText);
                    ++n;
                }
    // synthetic and foreground differ by token; game_effect and iterated share one text
    CHECK(seen.size() == n / 4 * 3);
}

TEST_CASE("templates are overridable")
{
    const CaptionTemplates t = CaptionTemplates::fromJson({{"moving", "drifting"}, {"separator", " and "}});
    CHECK(t.stable == "at constant size");
    const MotionSpec s = movingSpec(Direction::N, 1.0);
    CHECK(motionPhrase(s, t) == "drifting up and at constant size");
}

TEST_CASE("inference prompt appends both tokens once, idempotently")
{
    CHECK(inferencePrompt("a burst of blue flame") == "a burst of blue flame <edge_hq> <motion_hq>");
    CHECK(inferencePrompt("") == "<edge_hq> <motion_hq>");
    const std::vector<std::string> bases = {"fire <edge_hq>",     "<motion_hq> smoke", "x <motion_hq> <edge_hq>",
                                            "<edge_hq><edge_hq>", "  spaced  ",        "plain"};
    for (const auto& b : bases)
    {
        const std::string p = inferencePrompt(b);
        CHECK(countOccurrences(p, kEdgeTrigger) == 1);
        CHECK(countOccurrences(p, kMotionTrigger) == 1);
        CHECK(p.find(kEdgeTrigger) < p.find(kMotionTrigger));
        CHECK(inferencePrompt(p) == p);
    }
}
