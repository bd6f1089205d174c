#pragma once

#include "alphamotion/tensor.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace alphamotion
{

class ScheduleError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Cumulative signal rates alpha_bar[t], t = 0..T, with alpha_bar[0] = 1.
template <typename Scalar>
class NoiseSchedule
{
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit NoiseSchedule(Vector alphaBar) : alphaBar_(std::move(alphaBar)) { validate(alphaBar_); }

    // Throws ScheduleError naming the first violated invariant.
    static void validate(const Vector& a)
    {
        if (a.size() < 2)
            throw ScheduleError("schedule.length: need alpha_bar for t = 0..T with T >= 1");
        if (!(std::abs(a[0] - Scalar(1)) <= Scalar(1e-3)))
            throw ScheduleError("schedule.alpha_bar_0: alpha_bar[0] must be within 1e-3 of 1");
        for (Eigen::Index t = 0; t < a.size(); ++t)
            if (!(a[t] > Scalar(0) && a[t] <= Scalar(1)))
                throw ScheduleError("schedule.range: alpha_bar[" + std::to_string(t) + "] outside (0,1]");
        for (Eigen::Index t = 1; t < a.size(); ++t)
            if (!(a[t] < a[t - 1]))
                throw ScheduleError("schedule.decreasing: alpha_bar[" + std::to_string(t) +
                                    "] is not below alpha_bar[" + std::to_string(t - 1) + "]");
    }

    // Linear betas from betaStart to betaEnd over t = 1..T; alpha_bar is their
    // running product of (1 - beta).
    static NoiseSchedule linear(int steps, Scalar betaStart, Scalar betaEnd)
    {
        if (steps < 1)
            throw ScheduleError("schedule needs T >= 1");
        if (!(betaStart > Scalar(0) && betaStart <= betaEnd && betaEnd < Scalar(1)))
            throw ScheduleError("schedule needs 0 < beta_start <= beta_end < 1");
        Vector a(steps + 1);
        a[0] = Scalar(1);
        for (int t = 1; t <= steps; ++t)
        {
            const Scalar beta =
                steps == 1 ? betaStart : betaStart + (betaEnd - betaStart) * Scalar(t - 1) / Scalar(steps - 1);
            a[t] = a[t - 1] * (Scalar(1) - beta);
        }
        return NoiseSchedule(std::move(a));
    }

    static NoiseSchedule standard(int steps = 1000) { return linear(steps, Scalar(1e-4), Scalar(0.02)); }

    int steps() const { return static_cast<int>(alphaBar_.size() - 1); }
    Scalar alphaBar(int t) const { return alphaBar_[t]; }
    const Vector& alphaBars() const { return alphaBar_; }

private:
    Vector alphaBar_;
};

// z_t = sqrt(alpha_bar_t) * z0 + sqrt(1 - alpha_bar_t) * eps
template <typename Scalar, std::size_t Rank>
DenseTensor<Scalar, Rank> forwardNoise(const DenseTensor<Scalar, Rank>& z0, int t,
                                       const DenseTensor<Scalar, Rank>& eps, const NoiseSchedule<Scalar>& schedule)
{
    if (!z0.sameShape(eps))
        throw std::invalid_argument("forward_noise: z0 and eps differ in shape");
    if (t < 1 || t > schedule.steps())
        throw std::out_of_range("forward_noise: t = " + std::to_string(t) + " outside [1, " +
                                std::to_string(schedule.steps()) + "]");
    const Scalar a = schedule.alphaBar(t);
    DenseTensor<Scalar, Rank> out(z0.shape());
    if (a == Scalar(1))
        out.data() = z0.data();
    else
        out.data() = std::sqrt(a) * z0.data() + std::sqrt(Scalar(1) - a) * eps.data();
    return out;
}

// Mean squared elementwise difference.
template <typename Scalar, std::size_t Rank>
Scalar trainingLoss(const DenseTensor<Scalar, Rank>& epsTrue, const DenseTensor<Scalar, Rank>& epsPred)
{
    if (!epsTrue.sameShape(epsPred))
        throw std::invalid_argument("training_loss: shapes differ");
    return (epsTrue.data() - epsPred.data()).squaredNorm() / Scalar(epsTrue.size());
}

// Noise predictor interface. `conditioning` stands in for the text embedding.
template <typename Scalar>
class NoisePredictor
{
public:
    using Conditioning = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    virtual ~NoisePredictor() = default;
    virtual FeatureTensor<Scalar> predict(const FeatureTensor<Scalar>& zt, int t,
                                          const Conditioning& conditioning) const = 0;
};

// Deterministic stand-in: eps_hat = gain * z_t + bias.
template <typename Scalar>
class LinearNoisePredictor final : public NoisePredictor<Scalar>
{
public:
    LinearNoisePredictor(Scalar gain, Scalar bias) : gain_(gain), bias_(bias) {}

    FeatureTensor<Scalar> predict(const FeatureTensor<Scalar>& zt, int,
                                  const typename NoisePredictor<Scalar>::Conditioning&) const override
    {
        FeatureTensor<Scalar> out(zt.shape());
        out.data() = (gain_ * zt.data().array() + bias_).matrix();
        return out;
    }

private:
    Scalar gain_;
    Scalar bias_;
};

// One sample of the denoising objective: noise z0 to step t, predict, score.
template <typename Scalar>
Scalar denoisingObjective(const NoisePredictor<Scalar>& model, const FeatureTensor<Scalar>& z0,
                          const FeatureTensor<Scalar>& eps, int t, const NoiseSchedule<Scalar>& schedule,
                          const typename NoisePredictor<Scalar>::Conditioning& conditioning)
{
    const auto zt = forwardNoise(z0, t, eps, schedule);
    return trainingLoss(eps, model.predict(zt, t, conditioning));
}

} // namespace alphamotion
