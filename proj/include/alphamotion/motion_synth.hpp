#pragma once

#include "alphamotion/compositing.hpp"
#include "alphamotion/motion_spec.hpp"
#include "alphamotion/rgba.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace alphamotion
{

class PlacementError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Inverse mapping: output pixel coordinates -> source coordinates.
// Pixel (x, y) has its center at coordinate (x, y).
template <typename Scalar>
class AffineTransform
{
public:
    using Matrix = Eigen::Matrix<Scalar, 2, 3>;
    using Vector = Eigen::Matrix<Scalar, 2, 1>;

    static constexpr Scalar kMinDeterminant = Scalar(1e-9);

    AffineTransform() : m_(Matrix::Zero()) { m_.template leftCols<2>().setIdentity(); }

    explicit AffineTransform(const Matrix& inverseMap) : m_(inverseMap)
    {
        if (!(std::abs(determinant()) > kMinDeterminant) || !m_.allFinite())
            throw std::invalid_argument("affine transform is degenerate");
    }

    static AffineTransform identity() { return {}; }

    // Builds the transform from a forward (source -> output) map.
    static AffineTransform fromForward(const Matrix& forward)
    {
        const Eigen::Matrix<Scalar, 2, 2> lin = forward.template leftCols<2>();
        if (!(std::abs(lin.determinant()) > kMinDeterminant))
            throw std::invalid_argument("affine transform is degenerate");
        const Eigen::Matrix<Scalar, 2, 2> inv = lin.inverse();
        Matrix m;
        m.template leftCols<2>() = inv;
        m.col(2) = -inv * forward.col(2);
        return AffineTransform(m);
    }

    const Matrix& inverseMap() const { return m_; }

    Matrix forwardMap() const
    {
        const Eigen::Matrix<Scalar, 2, 2> inv = m_.template leftCols<2>().inverse();
        Matrix f;
        f.template leftCols<2>() = inv;
        f.col(2) = -inv * m_.col(2);
        return f;
    }

    Vector sourceOf(const Vector& out) const { return m_.template leftCols<2>() * out + m_.col(2); }

    Scalar determinant() const { return m_.template leftCols<2>().determinant(); }

    bool isApprox(const AffineTransform& other, Scalar tol) const
    {
        return (m_ - other.m_).cwiseAbs().maxCoeff() <= tol;
    }

private:
    Matrix m_;
};

// Frame k of a trajectory: about the canvas center, rotate by k*rotationRate,
// scale by scaleRate^k, then translate by k*velocity along the heading.
template <typename Scalar = double>
AffineTransform<Scalar> trajectory(const MotionSpec& spec, int frameIndex, Extent canvas)
{
    if (frameIndex < 0 || frameIndex >= spec.frameCount)
        throw std::out_of_range("trajectory: frame index " + std::to_string(frameIndex) + " outside [0, " +
                                std::to_string(spec.frameCount) + ")");
    if (frameIndex == 0)
        return AffineTransform<Scalar>::identity();

    using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
    using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
    const Scalar k = static_cast<Scalar>(frameIndex);
    const Vec2 center(Scalar(canvas.width - 1) / 2, Scalar(canvas.height - 1) / 2);

    const Scalar theta = Scalar(spec.rotationRate) * k * std::numbers::pi_v<Scalar> / Scalar(180);
    const Scalar c = std::cos(theta);
    const Scalar s = std::sin(theta);
    // Counterclockwise on screen with y pointing down.
    Mat2 rot;
    rot << c, s, -s, c;
    const Scalar scale = std::pow(Scalar(spec.scaleRate), k);

    Vec2 shift = Vec2::Zero();
    if (spec.direction)
        shift = unitVector(*spec.direction).cast<Scalar>() * (Scalar(spec.velocity) * k);

    // source = center + (1/scale) * rot^T * (out - center - shift)
    const Mat2 lin = rot.transpose() / scale;
    Eigen::Matrix<Scalar, 2, 3> m;
    m.template leftCols<2>() = lin;
    m.col(2) = center - lin * (center + shift);
    return AffineTransform<Scalar>(m);
}

namespace detail
{
template <typename Scalar>
Scalar snapNearInteger(Scalar v)
{
    const Scalar r = std::round(v);
    return std::abs(v - r) < Scalar(1e-9) ? r : v;
}
} // namespace detail

// Inverse-mapped bilinear resampling in premultiplied space. Samples that land
// exactly on a pixel center copy that pixel; anything outside the source is
// transparent.
template <typename Scalar>
BasicRgbaFrame<Scalar> warp(const BasicRgbaFrame<Scalar>& frame, const AffineTransform<Scalar>& t)
{
    const int w = frame.width();
    const int h = frame.height();
    const auto pre = premultiply(frame);
    BasicRgbaFrame<Scalar> out(w, h);
    const auto& m = t.inverseMap();

    auto fetchPre = [&](int x, int y, int c) -> Scalar {
        if (x < 0 || y < 0 || x >= w || y >= h)
            return Scalar(0);
        return pre.planes[c](y, x);
    };

    for (int y = 0; y < h; ++y)
    {
        for (int x = 0; x < w; ++x)
        {
            const Scalar sx = detail::snapNearInteger(m(0, 0) * x + m(0, 1) * y + m(0, 2));
            const Scalar sy = detail::snapNearInteger(m(1, 0) * x + m(1, 1) * y + m(1, 2));
            const Scalar fx0 = std::floor(sx);
            const Scalar fy0 = std::floor(sy);
            if (fx0 < Scalar(-1) || fy0 < Scalar(-1) || fx0 > Scalar(w) || fy0 > Scalar(h))
                continue;
            const int x0 = static_cast<int>(fx0);
            const int y0 = static_cast<int>(fy0);
            const Scalar tx = sx - fx0;
            const Scalar ty = sy - fy0;

            if (tx == Scalar(0) && ty == Scalar(0))
            {
                if (x0 >= 0 && y0 >= 0 && x0 < w && y0 < h)
                    out.setPixel(x, y, frame.pixel(x0, y0));
                continue;
            }

            Scalar acc[4];
            const Scalar w00 = (1 - tx) * (1 - ty);
            const Scalar w10 = tx * (1 - ty);
            const Scalar w01 = (1 - tx) * ty;
            const Scalar w11 = tx * ty;
            for (int c = 0; c < 4; ++c)
                acc[c] = w00 * fetchPre(x0, y0, c) + w10 * fetchPre(x0 + 1, y0, c) + w01 * fetchPre(x0, y0 + 1, c) +
                         w11 * fetchPre(x0 + 1, y0 + 1, c);

            const Scalar a = std::clamp(acc[kAlpha], Scalar(0), Scalar(1));
            if (a > Scalar(0))
            {
                out.setPixel(x, y,
                             Pixel<Scalar>(std::clamp(acc[0] / a, Scalar(0), Scalar(1)),
                                           std::clamp(acc[1] / a, Scalar(0), Scalar(1)),
                                           std::clamp(acc[2] / a, Scalar(0), Scalar(1)), a));
            }
        }
    }
    return out;
}

// Sprite pasted onto a transparent canvas with its top-left corner at
// ((W - w) / 2, (H - h) / 2).
template <typename Scalar>
BasicRgbaFrame<Scalar> placeCentered(const BasicRgbaFrame<Scalar>& sprite, Extent canvas)
{
    if (sprite.empty())
        throw PlacementError("sprite is empty");
    if (sprite.width() > canvas.width || sprite.height() > canvas.height)
        throw PlacementError("sprite " + std::to_string(sprite.width()) + "x" + std::to_string(sprite.height()) +
                             " does not fit canvas " + std::to_string(canvas.width) + "x" +
                             std::to_string(canvas.height));
    BasicRgbaFrame<Scalar> base(canvas.width, canvas.height);
    const int ox = (canvas.width - sprite.width()) / 2;
    const int oy = (canvas.height - sprite.height()) / 2;
    for (int c = 0; c < 4; ++c)
        base.channel(c).block(oy, ox, sprite.height(), sprite.width()) = sprite.channel(c);
    return base;
}

inline constexpr double kDefaultFps = 8.0;

template <typename Scalar>
BasicRgbaClip<Scalar> synthesizeClip(const BasicRgbaFrame<Scalar>& sprite, const MotionSpec& spec, Extent canvas,
                                     double fps = kDefaultFps)
{
    spec.validate();
    const auto base = placeCentered(sprite, canvas);
    std::vector<BasicRgbaFrame<Scalar>> frames;
    frames.reserve(spec.frameCount);
    frames.push_back(base);
    for (int k = 1; k < spec.frameCount; ++k)
        frames.push_back(warp(base, trajectory<Scalar>(spec, k, canvas)));
    return BasicRgbaClip<Scalar>(std::move(frames), fps);
}

// Alpha-weighted mean pixel position; throws on a fully transparent frame.
template <typename Scalar>
Eigen::Vector2d alphaCentroid(const BasicRgbaFrame<Scalar>& frame)
{
    const auto& a = frame.alpha();
    const double mass = static_cast<double>(a.sum());
    if (!(mass > 0.0))
        throw std::domain_error("alpha centroid undefined for a fully transparent frame");
    const Eigen::ArrayXd colSums = a.colwise().sum().transpose().template cast<double>();
    const Eigen::ArrayXd rowSums = a.rowwise().sum().template cast<double>();
    const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(frame.width(), 0, frame.width() - 1);
    const Eigen::ArrayXd ys = Eigen::ArrayXd::LinSpaced(frame.height(), 0, frame.height() - 1);
    return {(colSums * xs).sum() / mass, (rowSums * ys).sum() / mass};
}

// Mean per-frame displacement of the alpha centroid, px/frame.
template <typename Scalar>
double motionMagnitude(const BasicRgbaClip<Scalar>& clip)
{
    if (clip.size() < 2)
        throw std::invalid_argument("motion magnitude needs at least two frames");
    double total = 0.0;
    Eigen::Vector2d prev = alphaCentroid(clip[0]);
    for (std::size_t i = 1; i < clip.size(); ++i)
    {
        const Eigen::Vector2d cur = alphaCentroid(clip[i]);
        total += (cur - prev).norm();
        prev = cur;
    }
    return total / static_cast<double>(clip.size() - 1);
}

} // namespace alphamotion
