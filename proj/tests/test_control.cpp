#include "doctest_setup.hpp"
#include "test_support.hpp"

#include "alphamotion/control_map.hpp"
#include "alphamotion/motion_spec_io.hpp"

using namespace alphamotion;
using namespace testsupport;

namespace
{

bool isWhite(const Pixel<double>& p) { return p[0] == 1.0 && p[1] == 1.0 && p[2] == 1.0; }

// Longest horizontal run of glyph pixels along the center row, starting at the center.
int runEastFromCenter(const RgbaFrame& img)
{
    const int cy = img.height() / 2;
    int x = img.width() / 2;  // first column with u >= 0
    int n = 0;
    while (x < img.width() && !isWhite(img.pixel(x, cy)))
    {
        ++n;
        ++x;
    }
    return n;
}

} // namespace

TEST_CASE("control geometry")
{
    const Extent c{256, 256};
    CHECK(ControlGeometry::shaftLength(4.0, c) == 32.0);
    CHECK(ControlGeometry::shaftLength(0.5, c) == 12.0);
    CHECK(ControlGeometry::shaftLength(100.0, c) == doctest::Approx(0.45 * 256));
    CHECK(ControlGeometry::maxEncodableVelocity(c) == doctest::Approx(0.45 * 256 / 8));
    CHECK(ControlGeometry::shaftHalfWidth(10.0) == 1.5);
    CHECK(ControlGeometry::shaftHalfWidth(60.0) == doctest::Approx(3.0));
}

TEST_CASE("render control: background, opacity and colors")
{
    for (ScaleMode m : kAllScaleModes)
    {
        const ControlMap map = renderControl(movingSpec(Direction::NE, 3.0, m, rateFor(m)));
        CHECK((map.image.alpha() == 1.0).all());
        CHECK(isWhite(map.image.pixel(0, 0)));
        const Plane<bool> glyph = glyphMask(map.image);
        CHECK(glyph.count() > 0);
        const Pixel<double> want = scaleColor(m);
        for (int y = 0; y < 256; ++y)
            for (int x = 0; x < 256; ++x)
                if (glyph(y, x))
                    CHECK(map.image.pixel(x, y).isApprox(want, 0.0));
                else
                    CHECK(isWhite(map.image.pixel(x, y)));
    }
    CHECK(scaleColor(ScaleMode::Grow).isApprox(Pixel<double>(0, 1, 0, 1), 0.0));
    CHECK(scaleColor(ScaleMode::Stable).isApprox(Pixel<double>(0, 0, 1, 1), 0.0));
    CHECK(scaleColor(ScaleMode::Shrink).isApprox(Pixel<double>(1, 0, 0, 1), 0.0));
}

TEST_CASE("render control: no direction draws a centered disc")
{
    const ControlMap map = renderControl(stableSpec());
    const Plane<bool> glyph = glyphMask(map.image);
    const double r = 0.08 * 256;
    const double c = 127.5;
    int outside = 0;
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 256; ++x)
            if (glyph(y, x) && std::hypot(x - c, y - c) > r + 1e-9)
                ++outside;
    CHECK(outside == 0);
    CHECK(glyph.count() == doctest::Approx(3.14159265 * r * r).epsilon(0.05));
    const auto d = decodeControl(map);
    CHECK_FALSE(d.direction.has_value());
    CHECK(d.scaleMode == ScaleMode::Stable);
    CHECK(d.velocity == 0.0);
}

TEST_CASE("render control: east velocity 4 shrink is a 32 px red arrow")
{
    const ControlMap map = renderControl(movingSpec(Direction::E, 4.0, ScaleMode::Shrink, 0.97));
    // 32 px from center to tip; the head is the last 0.4 * 32 of it
    const int run = runEastFromCenter(map.image);
    CHECK(std::abs(run - 32) <= 1);
    const Plane<bool> g = glyphMask(map.image);
    CHECK(g.col(128 + 15).count() <= 4);
    CHECK(g.col(128 + 21).count() > 8);
    CHECK(map.image.pixel(140, 128).isApprox(Pixel<double>(1, 0, 0, 1), 0.0));
    // nothing left of the center beyond the shaft's half-width
    CHECK_FALSE(g.leftCols(120).any());
    const auto d = decodeControl(map);
    CHECK(d.direction == Direction::E);
    CHECK(std::abs(d.velocity - 4.0) <= 1.0);
}

TEST_CASE("render control is deterministic and hashes the spec")
{
    const MotionSpec s = movingSpec(Direction::SW, 2.2, ScaleMode::Grow, 1.03);
    const ControlMap a = renderControl(s);
    const ControlMap b = renderControl(s);
    CHECK(encodePng(a.image) == encodePng(b.image));
    CHECK(a.specHash == specDigest(s));
    CHECK_THROWS(renderControl(s, Extent{63, 200}));
}

TEST_CASE("decode control: exhaustive direction by mode grid")
{
    for (Direction d : kAllDirections)
        for (ScaleMode m : kAllScaleModes)
        {
            const auto got = decodeControl(renderControl(movingSpec(d, 3.0, m, rateFor(m))));
            CHECK(got.direction == d);
            CHECK(got.scaleMode == m);
            CHECK(std::abs(got.velocity - 3.0) <= 1.0);
        }
}

TEST_CASE("decode control: non-square canvases")
{
    for (Extent c : {Extent{64, 64}, Extent{320, 180}, Extent{97, 131}})
        for (Direction d : kAllDirections)
        {
            const auto got = decodeControl(renderControl(movingSpec(d, 2.0), c));
            CHECK(got.direction == d);
        }
}

TEST_CASE("decode control: rotating a map by 90 degrees rotates the direction")
{
    for (Direction d : kAllDirections)
    {
        const RgbaFrame img = renderControl(movingSpec(d, 5.0, ScaleMode::Grow, 1.02)).image;
        const auto got = decodeControl(rotate90Ccw(img));
        CHECK(got.direction == rotateCcw(d, 2));
        CHECK(got.scaleMode == ScaleMode::Grow);
    }
}

TEST_CASE("decode control: errors")
{
    CHECK_THROWS_AS(decodeControl(RgbaFrame::filled(64, 64, {1, 1, 1, 1})), DecodeError);
    // gray glyph has no dominant hue
    RgbaFrame gray = RgbaFrame::filled(64, 64, {1, 1, 1, 1});
    for (int y = 28; y < 36; ++y)
        for (int x = 28; x < 36; ++x)
            gray.setPixel(x, y, {0.3, 0.3, 0.3, 1});
    CHECK_THROWS_AS(decodeControl(gray), DecodeError);
}

TEST_CASE("heading snap: nearest of eight, ties toward the smaller angle")
{
    CHECK(snapHeading(0.0) == Direction::E);
    CHECK(snapHeading(21.0) == Direction::E);
    CHECK(snapHeading(24.0) == Direction::NE);
    CHECK(snapHeading(44.0) == Direction::NE);
    CHECK(snapHeading(46.0) == Direction::NE);
    CHECK(snapHeading(22.5) == Direction::E);
    CHECK(snapHeading(67.5) == Direction::NE);
    CHECK(snapHeading(337.5) == Direction::SE);
    CHECK(snapHeading(359.0) == Direction::E);
    CHECK(snapHeading(-10.0) == Direction::E);
    CHECK(snapHeading(180.0) == Direction::W);
    CHECK(snapHeading(270.0) == Direction::S);
}
