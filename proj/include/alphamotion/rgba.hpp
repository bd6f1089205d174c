#pragma once

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphamotion
{

// A single image channel, indexed (row = y, col = x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Pixel = Eigen::Array<Scalar, 4, 1>;

enum Channel : int
{
    kRed = 0,
    kGreen = 1,
    kBlue = 2,
    kAlpha = 3,
};

struct Extent
{
    int width = 256;
    int height = 256;

    bool operator==(const Extent&) const = default;
};

class SizeError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Straight (non-premultiplied) RGBA raster with channels in [0,1], stored planar.
template <typename Scalar>
class BasicRgbaFrame
{
public:
    using PlaneType = Plane<Scalar>;

    BasicRgbaFrame() = default;

    // Fully transparent black frame.
    BasicRgbaFrame(int width, int height)
    {
        if (width <= 0 || height <= 0)
            throw SizeError("frame dimensions must be positive, got " + std::to_string(width) + "x" +
                            std::to_string(height));
        for (auto& p : planes_)
            p = PlaneType::Zero(height, width);
    }

    static BasicRgbaFrame filled(int width, int height, const Pixel<Scalar>& value)
    {
        BasicRgbaFrame f(width, height);
        for (int c = 0; c < 4; ++c)
            f.planes_[c].setConstant(value[c]);
        return f;
    }

    static BasicRgbaFrame fromPlanes(std::array<PlaneType, 4> planes)
    {
        const auto rows = planes[0].rows();
        const auto cols = planes[0].cols();
        if (rows <= 0 || cols <= 0)
            throw SizeError("frame dimensions must be positive");
        for (const auto& p : planes)
        {
            if (p.rows() != rows || p.cols() != cols)
                throw SizeError("channel planes differ in size");
            if (!((p >= Scalar(0)) && (p <= Scalar(1))).all())
                throw std::domain_error("channel values must lie in [0,1]");
        }
        BasicRgbaFrame f;
        f.planes_ = std::move(planes);
        return f;
    }

    int width() const { return static_cast<int>(planes_[0].cols()); }
    int height() const { return static_cast<int>(planes_[0].rows()); }
    Extent extent() const { return {width(), height()}; }
    bool empty() const { return planes_[0].size() == 0; }

    const PlaneType& channel(int c) const { return planes_[c]; }
    PlaneType& channel(int c) { return planes_[c]; }
    const PlaneType& alpha() const { return planes_[kAlpha]; }
    PlaneType& alpha() { return planes_[kAlpha]; }

    Pixel<Scalar> pixel(int x, int y) const
    {
        return {planes_[0](y, x), planes_[1](y, x), planes_[2](y, x), planes_[3](y, x)};
    }

    void setPixel(int x, int y, const Pixel<Scalar>& v)
    {
        for (int c = 0; c < 4; ++c)
            planes_[c](y, x) = v[c];
    }

    bool sameSize(const BasicRgbaFrame& other) const
    {
        return width() == other.width() && height() == other.height();
    }

    bool inRange() const
    {
        for (const auto& p : planes_)
            if (!((p >= Scalar(0)) && (p <= Scalar(1))).all())
                return false;
        return true;
    }

    bool operator==(const BasicRgbaFrame& other) const
    {
        if (!sameSize(other))
            return false;
        for (int c = 0; c < 4; ++c)
            if ((planes_[c] != other.planes_[c]).any())
                return false;
        return true;
    }

    template <typename Other>
    BasicRgbaFrame<Other> cast() const
    {
        std::array<Plane<Other>, 4> out;
        for (int c = 0; c < 4; ++c)
            out[c] = planes_[c].template cast<Other>();
        return BasicRgbaFrame<Other>::fromPlanes(std::move(out));
    }

private:
    std::array<PlaneType, 4> planes_;
};

// A fixed-rate sequence of equally sized frames.
template <typename Scalar>
class BasicRgbaClip
{
public:
    using Frame = BasicRgbaFrame<Scalar>;

    BasicRgbaClip(std::vector<Frame> frames, double fps) : frames_(std::move(frames)), fps_(fps)
    {
        if (frames_.empty())
            throw SizeError("clip must contain at least one frame");
        if (!(fps_ > 0.0))
            throw std::invalid_argument("clip fps must be positive");
        for (const auto& f : frames_)
            if (!f.sameSize(frames_.front()))
                throw SizeError("clip frames differ in size");
    }

    const std::vector<Frame>& frames() const { return frames_; }
    const Frame& operator[](std::size_t i) const { return frames_[i]; }
    std::size_t size() const { return frames_.size(); }
    double fps() const { return fps_; }
    int width() const { return frames_.front().width(); }
    int height() const { return frames_.front().height(); }
    Extent extent() const { return frames_.front().extent(); }

    bool operator==(const BasicRgbaClip& other) const
    {
        return fps_ == other.fps_ && frames_ == other.frames_;
    }

private:
    std::vector<Frame> frames_;
    double fps_;
};

using RgbaFrame = BasicRgbaFrame<double>;
using RgbaClip = BasicRgbaClip<double>;
using AlphaMask = Plane<double>;

} // namespace alphamotion
