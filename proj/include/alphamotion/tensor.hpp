#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace alphamotion
{

// Dense row-major tensor: the last axis varies fastest.
template <typename Scalar, std::size_t Rank>
class DenseTensor
{
public:
    using Shape = std::array<Eigen::Index, Rank>;
    using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    DenseTensor() { shape_.fill(0); }

    explicit DenseTensor(const Shape& shape) : shape_(shape)
    {
        for (auto n : shape_)
            if (n < 1)
                throw std::invalid_argument("tensor axis sizes must be >= 1");
        data_ = Storage::Zero(elementCount(shape_));
    }

    DenseTensor(const Shape& shape, Storage data) : shape_(shape), data_(std::move(data))
    {
        for (auto n : shape_)
            if (n < 1)
                throw std::invalid_argument("tensor axis sizes must be >= 1");
        if (data_.size() != elementCount(shape_))
            throw std::invalid_argument("tensor data has " + std::to_string(data_.size()) + " elements, shape needs " +
                                        std::to_string(elementCount(shape_)));
    }

    static Eigen::Index elementCount(const Shape& shape)
    {
        return std::accumulate(shape.begin(), shape.end(), Eigen::Index(1), std::multiplies<>());
    }

    const Shape& shape() const { return shape_; }
    Eigen::Index dim(std::size_t axis) const { return shape_[axis]; }
    Eigen::Index size() const { return data_.size(); }

    const Storage& data() const { return data_; }
    Storage& data() { return data_; }

    template <typename... Idx>
    Eigen::Index flatIndex(Idx... idx) const
    {
        static_assert(sizeof...(Idx) == Rank);
        const std::array<Eigen::Index, Rank> i{static_cast<Eigen::Index>(idx)...};
        Eigen::Index flat = 0;
        for (std::size_t a = 0; a < Rank; ++a)
            flat = flat * shape_[a] + i[a];
        return flat;
    }

    template <typename... Idx>
    Scalar operator()(Idx... idx) const { return data_[flatIndex(idx...)]; }

    template <typename... Idx>
    Scalar& operator()(Idx... idx) { return data_[flatIndex(idx...)]; }

    bool sameShape(const DenseTensor& other) const { return shape_ == other.shape_; }

    bool operator==(const DenseTensor& other) const
    {
        return shape_ == other.shape_ && data_.size() == other.data_.size() && (data_.array() == other.data_.array()).all();
    }

private:
    Shape shape_;
    Storage data_;
};

// Video features with axes (b, c, f, h, w).
template <typename Scalar>
using FeatureTensor = DenseTensor<Scalar, 5>;

// Axes ((b*f), c, h, w): frames folded into the batch for per-frame 2D layers.
template <typename Scalar>
DenseTensor<Scalar, 4> inflateSpatial(const FeatureTensor<Scalar>& x)
{
    const auto [b, c, f, h, w] = x.shape();
    DenseTensor<Scalar, 4> out({b * f, c, h, w});
    for (Eigen::Index bi = 0; bi < b; ++bi)
        for (Eigen::Index ci = 0; ci < c; ++ci)
            for (Eigen::Index fi = 0; fi < f; ++fi)
                out.data().segment(out.flatIndex(bi * f + fi, ci, 0, 0), h * w) =
                    x.data().segment(x.flatIndex(bi, ci, fi, 0, 0), h * w);
    return out;
}

template <typename Scalar>
FeatureTensor<Scalar> deflateSpatial(const DenseTensor<Scalar, 4>& y, Eigen::Index frames)
{
    const auto [bf, c, h, w] = y.shape();
    if (frames < 1 || bf % frames != 0)
        throw std::invalid_argument("leading axis " + std::to_string(bf) + " is not a multiple of frame count " +
                                    std::to_string(frames));
    const Eigen::Index b = bf / frames;
    FeatureTensor<Scalar> out({b, c, frames, h, w});
    for (Eigen::Index bi = 0; bi < b; ++bi)
        for (Eigen::Index ci = 0; ci < c; ++ci)
            for (Eigen::Index fi = 0; fi < frames; ++fi)
                out.data().segment(out.flatIndex(bi, ci, fi, 0, 0), h * w) =
                    y.data().segment(y.flatIndex(bi * frames + fi, ci, 0, 0), h * w);
    return out;
}

// Axes ((b*h*w), c, f): every spatial site becomes a sequence over frames.
template <typename Scalar>
DenseTensor<Scalar, 3> inflateTemporal(const FeatureTensor<Scalar>& x)
{
    const auto [b, c, f, h, w] = x.shape();
    DenseTensor<Scalar, 3> out({b * h * w, c, f});
    for (Eigen::Index bi = 0; bi < b; ++bi)
        for (Eigen::Index ci = 0; ci < c; ++ci)
            for (Eigen::Index fi = 0; fi < f; ++fi)
                for (Eigen::Index hi = 0; hi < h; ++hi)
                    for (Eigen::Index wi = 0; wi < w; ++wi)
                        out((bi * h + hi) * w + wi, ci, fi) = x(bi, ci, fi, hi, wi);
    return out;
}

template <typename Scalar>
FeatureTensor<Scalar> deflateTemporal(const DenseTensor<Scalar, 3>& y, Eigen::Index height, Eigen::Index width)
{
    const auto [bhw, c, f] = y.shape();
    if (height < 1 || width < 1 || bhw % (height * width) != 0)
        throw std::invalid_argument("leading axis " + std::to_string(bhw) + " is not a multiple of h*w");
    const Eigen::Index b = bhw / (height * width);
    FeatureTensor<Scalar> out({b, c, f, height, width});
    for (Eigen::Index bi = 0; bi < b; ++bi)
        for (Eigen::Index ci = 0; ci < c; ++ci)
            for (Eigen::Index fi = 0; fi < f; ++fi)
                for (Eigen::Index hi = 0; hi < height; ++hi)
                    for (Eigen::Index wi = 0; wi < width; ++wi)
                        out(bi, ci, fi, hi, wi) = y((bi * height + hi) * width + wi, ci, fi);
    return out;
}

} // namespace alphamotion
