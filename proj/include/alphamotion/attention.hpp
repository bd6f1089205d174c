#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace alphamotion
{

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Transformer sinusoidal table, rows = positions, cols = channels:
// P(p, 2i) = sin(p / 10000^(2i/c)), P(p, 2i+1) = cos(p / 10000^(2i/c)).
template <typename Scalar>
MatrixX<Scalar> sinusoidalPositionEncoding(Eigen::Index frames, Eigen::Index channels)
{
    MatrixX<Scalar> table(frames, channels);
    for (Eigen::Index p = 0; p < frames; ++p)
    {
        for (Eigen::Index i = 0; i < channels; ++i)
        {
            const Scalar expo = Scalar(2 * (i / 2)) / Scalar(channels);
            const Scalar angle = Scalar(p) / std::pow(Scalar(10000), expo);
            table(p, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return table;
}

// Single-head projections; each is c x c and acts on column vectors.
template <typename Scalar>
struct AttentionParams
{
    MatrixX<Scalar> query;
    MatrixX<Scalar> key;
    MatrixX<Scalar> value;
    MatrixX<Scalar> positionEncoding;  // f x c

    Eigen::Index channels() const { return query.rows(); }

    void validate() const
    {
        const auto c = query.rows();
        if (c < 1 || query.cols() != c || key.rows() != c || key.cols() != c || value.rows() != c || value.cols() != c)
            throw std::invalid_argument("attention projections must all be square with the same dimension");
        if (positionEncoding.size() != 0 && positionEncoding.cols() != c)
            throw std::invalid_argument("position encoding width must equal the channel count");
    }

    static AttentionParams random(Eigen::Index channels, Eigen::Index maxFrames)
    {
        AttentionParams p;
        p.query = MatrixX<Scalar>::Random(channels, channels);
        p.key = MatrixX<Scalar>::Random(channels, channels);
        p.value = MatrixX<Scalar>::Random(channels, channels);
        p.positionEncoding = sinusoidalPositionEncoding<Scalar>(maxFrames, channels);
        return p;
    }
};

template <typename Scalar>
struct AttentionResult
{
    MatrixX<Scalar> output;   // c x f, column j is the output for frame j
    MatrixX<Scalar> weights;  // f x f, row i is frame i's distribution over frames
};

// Row-wise softmax with max subtraction.
template <typename Derived>
MatrixX<typename Derived::Scalar> softmaxRows(const Eigen::MatrixBase<Derived>& logits)
{
    using Scalar = typename Derived::Scalar;
    MatrixX<Scalar> out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i)
    {
        const Scalar m = logits.row(i).maxCoeff();
        out.row(i) = (logits.row(i).array() - m).exp().matrix();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

// Self-attention across frames. `frames` is c x f with one frame per column:
// out = V * softmax(Q^T K / sqrt(c))^T, i.e. z_out_i = sum_j A_ij v_j.
template <typename Derived>
AttentionResult<typename Derived::Scalar> temporalAttention(const Eigen::MatrixBase<Derived>& frames,
                                                            const AttentionParams<typename Derived::Scalar>& p,
                                                            bool usePositionEncoding)
{
    using Scalar = typename Derived::Scalar;
    p.validate();
    const Eigen::Index c = p.channels();
    const Eigen::Index f = frames.cols();
    if (f < 1)
        throw std::invalid_argument("temporal attention needs at least one frame");
    if (frames.rows() != c)
        throw std::invalid_argument("frame vectors have dimension " + std::to_string(frames.rows()) +
                                    ", projections expect " + std::to_string(c));

    MatrixX<Scalar> z = frames;
    if (usePositionEncoding)
    {
        if (p.positionEncoding.rows() < f)
            throw std::invalid_argument("position encoding table shorter than the frame count");
        z += p.positionEncoding.topRows(f).transpose();
    }
    const MatrixX<Scalar> q = p.query * z;
    const MatrixX<Scalar> k = p.key * z;
    const MatrixX<Scalar> v = p.value * z;

    AttentionResult<Scalar> r;
    r.weights = softmaxRows((q.transpose() * k) / std::sqrt(Scalar(c)));
    r.output = v * r.weights.transpose();
    return r;
}

} // namespace alphamotion
