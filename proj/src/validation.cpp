#include "alphamotion/validation.hpp"

#include "alphamotion/attention.hpp"
#include "alphamotion/caption.hpp"
#include "alphamotion/control_map.hpp"
#include "alphamotion/dataset.hpp"
#include "alphamotion/motion_spec_io.hpp"
#include "alphamotion/motion_synth.hpp"
#include "alphamotion/random.hpp"
#include "alphamotion/tensor.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace alphamotion
{

namespace
{

using Check = std::function<std::string()>;  // empty string: pass

CheckResult run(const std::string& suite, const std::string& name, const Check& check)
{
    CheckResult r{suite, name, false, {}};
    try
    {
        r.detail = check();
        r.passed = r.detail.empty();
    }
    catch (const std::exception& e)
    {
        r.detail = e.what();
    }
    return r;
}

FeatureTensor<double> normalTensor(const FeatureTensor<double>::Shape& shape, std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    FeatureTensor<double> t(shape);
    for (Eigen::Index i = 0; i < t.size(); ++i)
        t.data()[i] = n(rng);
    return t;
}

double sampleVariance(const Eigen::VectorXd& v)
{
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

std::vector<CheckResult> mathSuite(const ValidationOptions& opts)
{
    std::vector<CheckResult> out;
    std::mt19937_64 rng(opts.seed);

    std::optional<NoiseSchedule<double>> schedule;
    out.push_back(run("math", "schedule.invariants", [&]() -> std::string {
        schedule = opts.scheduleOverride ? NoiseSchedule<double>(*opts.scheduleOverride)
                                         : NoiseSchedule<double>::standard(1000);
        return {};
    }));

    out.push_back(run("math", "forward_noise.unit_variance", [&]() -> std::string {
        if (!schedule)
            return "no valid schedule";
        const auto z0 = normalTensor({1, 4, 16, 128, 128}, rng);
        const auto eps = normalTensor(z0.shape(), rng);
        for (int t : {1, schedule->steps() / 4, schedule->steps() / 2, schedule->steps()})
        {
            const double var = sampleVariance(forwardNoise(z0, std::max(t, 1), eps, *schedule).data());
            if (std::abs(var - 1.0) > 0.01)
                return "variance " + std::to_string(var) + " at t=" + std::to_string(t);
        }
        return {};
    }));

    out.push_back(run("math", "inflation.round_trip", [&]() -> std::string {
        for (int s = 0; s < 243; ++s)
        {
            const FeatureTensor<double>::Shape shape{1 + s % 3, 1 + (s / 3) % 3, 1 + (s / 9) % 3, 1 + (s / 27) % 3,
                                                     1 + (s / 81) % 3};
            const auto x = normalTensor(shape, rng);
            if (!(deflateSpatial(inflateSpatial(x), shape[2]) == x))
                return "spatial round trip differs for shape index " + std::to_string(s);
            if (!(deflateTemporal(inflateTemporal(x), shape[3], shape[4]) == x))
                return "temporal round trip differs for shape index " + std::to_string(s);
        }
        return {};
    }));

    out.push_back(run("math", "attention.naive_oracle", [&]() -> std::string {
        std::uniform_int_distribution<int> fd(1, 8), cd(1, 16);
        std::normal_distribution<double> n(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial)
        {
            const int f = fd(rng);
            const int c = cd(rng);
            auto p = AttentionParams<double>::random(c, f);
            Eigen::MatrixXd z(c, f);
            for (Eigen::Index i = 0; i < z.size(); ++i)
                z.data()[i] = n(rng);
            const auto r = temporalAttention(z, p, trial % 2 == 0);
            Eigen::MatrixXd zp = z;
            if (trial % 2 == 0)
                zp += p.positionEncoding.topRows(f).transpose();
            for (int i = 0; i < f; ++i)
            {
                std::vector<double> logits(f);
                double mx = -1e300;
                for (int j = 0; j < f; ++j)
                {
                    double s = 0.0;
                    for (int a = 0; a < c; ++a)
                    {
                        double qa = 0.0, ka = 0.0;
                        for (int b = 0; b < c; ++b)
                        {
                            qa += p.query(a, b) * zp(b, i);
                            ka += p.key(a, b) * zp(b, j);
                        }
                        s += qa * ka;
                    }
                    logits[j] = s / std::sqrt(double(c));
                    mx = std::max(mx, logits[j]);
                }
                double denom = 0.0;
                for (double& l : logits)
                    denom += (l = std::exp(l - mx));
                if (std::abs(r.weights.row(i).sum() - 1.0) > 1e-6)
                    return "attention row does not sum to 1";
                for (int a = 0; a < c; ++a)
                {
                    double acc = 0.0;
                    for (int j = 0; j < f; ++j)
                    {
                        double va = 0.0;
                        for (int b = 0; b < c; ++b)
                            va += p.value(a, b) * zp(b, j);
                        acc += logits[j] / denom * va;
                    }
                    if (std::abs(acc - r.output(a, i)) > 1e-6)
                        return "output differs from naive evaluation by " + std::to_string(std::abs(acc - r.output(a, i)));
                }
            }
        }
        return {};
    }));

    out.push_back(run("math", "attention.single_frame", [&]() -> std::string {
        auto p = AttentionParams<double>::random(8, 1);
        const Eigen::MatrixXd z = Eigen::MatrixXd::Random(8, 1);
        const auto r = temporalAttention(z, p, false);
        const Eigen::MatrixXd expected = p.value * z;
        return (r.output.array() == expected.array()).all() ? std::string() : "f=1 output is not W_V z";
    }));

    out.push_back(run("math", "attention.permutation_equivariance", [&]() -> std::string {
        auto p = AttentionParams<double>::random(6, 5);
        const Eigen::MatrixXd z = Eigen::MatrixXd::Random(6, 5);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
        perm.indices() << 3, 0, 4, 1, 2;
        const Eigen::MatrixXd zPerm = z * perm;
        const auto plain = temporalAttention(z, p, false);
        const auto plainPerm = temporalAttention(zPerm, p, false);
        if ((plain.output * perm - plainPerm.output).cwiseAbs().maxCoeff() > 1e-9)
            return "outputs do not permute with inputs";
        const auto enc = temporalAttention(z, p, true);
        const auto encPerm = temporalAttention(zPerm, p, true);
        if ((enc.output * perm - encPerm.output).cwiseAbs().maxCoeff() < 1e-9)
            return "position encodings did not break equivariance";
        return {};
    }));

    out.push_back(run("math", "training_loss.zero_iff_equal", [&]() -> std::string {
        const auto a = normalTensor({2, 3, 4, 5, 6}, rng);
        auto b = a;
        if (trainingLoss(a, b) != 0.0)
            return "loss of identical tensors is nonzero";
        b.data()[7] += 1e-3;
        if (!(trainingLoss(a, b) > 0.0))
            return "loss of different tensors is not positive";
        return {};
    }));
    return out;
}

std::vector<CheckResult> roundTripSuite(const ValidationOptions& opts)
{
    std::vector<CheckResult> out;
    const Extent canvas{256, 256};

    out.push_back(run("roundtrip", "control.exhaustive_grid", [&]() -> std::string {
        for (Direction d : kAllDirections)
            for (ScaleMode m : kAllScaleModes)
            {
                MotionSpec s;
                s.direction = d;
                s.velocity = 4.0;
                s.scaleMode = m;
                s.scaleRate = m == ScaleMode::Grow ? 1.05 : m == ScaleMode::Shrink ? 0.95 : 1.0;
                const auto dec = decodeControl(renderControl(s, canvas));
                if (dec.direction != d || dec.scaleMode != m || std::abs(dec.velocity - 4.0) > 1.0)
                    return "mismatch for " + std::string(toString(d)) + "/" + std::string(toString(m));
            }
        return {};
    }));

    out.push_back(run("roundtrip", "control.random_specs", [&]() -> std::string {
        SplitMix64 rng(opts.seed);
        const double vmax = ControlGeometry::maxEncodableVelocity(canvas);
        for (int i = 0; i < 200; ++i)
        {
            MotionSpec s;
            s.direction = static_cast<Direction>(rng.below(8));
            s.velocity = rng.uniform(0.5, vmax);
            s.scaleMode = kAllScaleModes[rng.below(3)];
            s.scaleRate = s.scaleMode == ScaleMode::Grow ? 1.02 : s.scaleMode == ScaleMode::Shrink ? 0.98 : 1.0;
            const auto dec = decodeControl(renderControl(s, canvas));
            if (dec.direction != s.direction || dec.scaleMode != s.scaleMode || std::abs(dec.velocity - s.velocity) > 1.0)
                return "round trip failed for " + serializeMotionSpec(s);
        }
        return {};
    }));

    out.push_back(run("roundtrip", "warp.identity_and_shift", [&]() -> std::string {
        SplitMix64 rng(opts.seed + 1);
        RgbaFrame f(40, 30);
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 40; ++x)
                f.setPixel(x, y, {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
        if (!(warp(f, AffineTransform<double>::identity()) == f))
            return "identity warp is not a copy";
        Eigen::Matrix<double, 2, 3> m;
        m << 1, 0, -5, 0, 1, 2;
        const RgbaFrame shifted = warp(f, AffineTransform<double>(m));
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 40; ++x)
            {
                const int sx = x - 5, sy = y + 2;
                const Pixel<double> expect = (sx >= 0 && sy >= 0 && sx < 40 && sy < 30) ? f.pixel(sx, sy)
                                                                                        : Pixel<double>::Zero();
                if ((shifted.pixel(x, y) != expect).any())
                    return "integer shift differs at (" + std::to_string(x) + "," + std::to_string(y) + ")";
            }
        return {};
    }));

    out.push_back(run("roundtrip", "manifest.serialize", [&]() -> std::string {
        DatasetManifest m;
        DatasetEntry e;
        e.id = "syn_000000";
        e.source = Source::Synthetic;
        e.clipPath = "syn_000000";
        e.controlPath = "syn_000000/control.png";
        e.caption = composeCaption("fire", MotionSpec{}, Source::Synthetic);
        e.edgeScore = 0.875;
        e.motionScore = 2.5;
        m.add(e);
        m.setMotionThreshold(1.0);
        return parseManifest(serializeManifest(m)) == m ? std::string() : "manifest changed across round trip";
    }));

    out.push_back(run("roundtrip", "caption.triggers", [&]() -> std::string {
        for (Source s : kAllSources)
        {
            const auto q = sourceQuality(s);
            const auto c = composeCaption("x", MotionSpec{}, s);
            const bool edge = countOccurrences(c.fullText, kEdgeTrigger) == 1;
            const bool motion = countOccurrences(c.fullText, kMotionTrigger) == 1;
            if (edge != q.edge || motion != q.motion)
                return "trigger mismatch for " + std::string(toString(s));
        }
        const std::string p = inferencePrompt("a spark");
        if (inferencePrompt(p) != p)
            return "inference prompt is not idempotent";
        return {};
    }));
    return out;
}

} // namespace

std::vector<CheckResult> runValidation(const ValidationOptions& opts)
{
    if (opts.suites.empty())
        throw std::invalid_argument("no validation suite selected");
    for (const auto& s : opts.suites)
        if (!kValidationSuites.count(s))
            throw std::invalid_argument("unknown validation suite '" + s + "'");
    std::vector<CheckResult> results;
    if (opts.suites.count("math"))
    {
        auto r = mathSuite(opts);
        results.insert(results.end(), r.begin(), r.end());
    }
    if (opts.suites.count("roundtrip"))
    {
        auto r = roundTripSuite(opts);
        results.insert(results.end(), r.begin(), r.end());
    }
    return results;
}

Eigen::VectorXd readScheduleFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read schedule file " + path);
    nlohmann::json j;
    try
    {
        in >> j;
        const auto values = j.at("alpha_bar").get<std::vector<double>>();
        return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
    catch (const nlohmann::json::exception& e)
    {
        throw FormatError(std::string("schedule file: ") + e.what());
    }
}

} // namespace alphamotion
