#include "doctest_setup.hpp"
#include "test_support.hpp"

#include "alphamotion/attention.hpp"
#include "alphamotion/diffusion.hpp"
#include "alphamotion/tensor.hpp"

#include <random>
#include <set>

using namespace alphamotion;
using namespace testsupport;

namespace
{

template <std::size_t R>
DenseTensor<double, R> gaussianTensor(const typename DenseTensor<double, R>::Shape& shape, std::mt19937_64& gen)
{
    std::normal_distribution<double> n;
    DenseTensor<double, R> t(shape);
    for (Eigen::Index i = 0; i < t.size(); ++i)
        t.data()[i] = n(gen);
    return t;
}

std::vector<double> rowMajor(const MatrixX<double>& m)
{
    std::vector<double> v;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            v.push_back(m(r, c));
    return v;
}

std::vector<std::vector<double>> columns(const MatrixX<double>& m)
{
    std::vector<std::vector<double>> v(m.cols(), std::vector<double>(m.rows()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            v[j][i] = m(i, j);
    return v;
}

double maxDiff(const MatrixX<double>& out, const std::vector<std::vector<double>>& cols)
{
    double d = 0.0;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            d = std::max(d, std::abs(out(i, j) - cols[j][i]));
    return d;
}

} // namespace

TEST_CASE("schedule: single step")
{
    const auto s = NoiseSchedule<double>::linear(1, 0.1, 0.1);
    CHECK(s.steps() == 1);
    CHECK(s.alphaBar(0) == 1.0);
    CHECK(s.alphaBar(1) == doctest::Approx(0.9));
}

TEST_CASE("schedule: standard linear beta product")
{
    const auto s = NoiseSchedule<double>::standard();
    CHECK(s.steps() == 1000);
    double prod = 1.0;
    for (int t = 1; t <= 1000; ++t)
    {
        prod *= 1.0 - (1e-4 + (0.02 - 1e-4) * (t - 1) / 999.0);
        CHECK(s.alphaBar(t) == doctest::Approx(prod).epsilon(1e-12));
        CHECK(s.alphaBar(t) < s.alphaBar(t - 1));
    }
    CHECK(s.alphaBar(1000) < 0.01);
}

TEST_CASE("schedule: invalid inputs name the violated invariant")
{
    CHECK_THROWS_AS(NoiseSchedule<double>::linear(10, 0.02, 0.01), ScheduleError);
    CHECK_THROWS_AS(NoiseSchedule<double>::linear(0, 0.01, 0.02), ScheduleError);
    CHECK_THROWS_AS(NoiseSchedule<double>::linear(10, 0.0, 0.02), ScheduleError);
    auto message = [](Eigen::VectorXd a) {
        try
        {
            NoiseSchedule<double> s(a);
        }
        catch (const ScheduleError& e)
        {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(Eigen::VectorXd::Ones(1)).rfind("schedule.length", 0) == 0);
    CHECK(message(Eigen::Vector3d(0.9, 0.8, 0.7)).rfind("schedule.alpha_bar_0", 0) == 0);
    CHECK(message(Eigen::Vector3d(1.0, 0.8, 0.85)).rfind("schedule.decreasing", 0) == 0);
    CHECK(message(Eigen::Vector3d(1.0, 0.8, -0.1)).rfind("schedule.range", 0) == 0);
    CHECK(message(Eigen::Vector3d(1.0, 0.8, 0.1)).empty());
}

TEST_CASE("forward noise limits")
{
    std::mt19937_64 gen(1);
    const auto z0 = gaussianTensor<5>({2, 3, 4, 2, 2}, gen);
    const auto eps = gaussianTensor<5>({2, 3, 4, 2, 2}, gen);

    Eigen::VectorXd a(4);
    a << 1.0, 1.0 - 1e-15, 0.5, 1e-300;
    const NoiseSchedule<double> s(a);

    // noiseless limit: alpha_bar one ulp-ish below 1 leaves z0 up to ~3e-8 of noise
    const auto clean = forwardNoise(z0, 1, eps, s);
    CHECK((clean.data() - z0.data()).cwiseAbs().maxCoeff() < 1e-6);

    const auto half = forwardNoise(z0, 2, eps, s);
    for (Eigen::Index i = 0; i < z0.size(); ++i)
        CHECK(half.data()[i] == doctest::Approx(std::sqrt(0.5) * (z0.data()[i] + eps.data()[i])));

    const auto pure = forwardNoise(z0, 3, eps, s);
    CHECK((pure.data() - eps.data()).cwiseAbs().maxCoeff() < 1e-140);

    CHECK_THROWS_AS(forwardNoise(z0, 0, eps, s), std::out_of_range);
    CHECK_THROWS_AS(forwardNoise(z0, 4, eps, s), std::out_of_range);
    const auto other = gaussianTensor<5>({2, 3, 4, 2, 1}, gen);
    CHECK_THROWS(forwardNoise(z0, 1, other, s));
}

TEST_CASE("forward noise keeps unit variance")
{
    const auto s = NoiseSchedule<double>::standard();
    std::mt19937_64 gen(3);
    const auto z0 = gaussianTensor<1>({200000}, gen);
    const auto eps = gaussianTensor<1>({200000}, gen);
    for (int t : {1, 10, 500, 1000})
    {
        const auto zt = forwardNoise(z0, t, eps, s);
        const double mean = zt.data().mean();
        const double var = (zt.data().array() - mean).square().sum() / double(zt.size() - 1);
        CHECK(std::abs(var - 1.0) < 0.02);
    }
}

TEST_CASE("tensor indexing is row-major")
{
    DenseTensor<double, 3> t({2, 3, 4});
    CHECK(t.flatIndex(1, 2, 3) == 23);
    CHECK(t.flatIndex(1, 0, 0) == 12);
    t(1, 2, 3) = 5.0;
    CHECK(t.data()[23] == 5.0);
    CHECK_THROWS(DenseTensor<double, 2>({0, 3}));
    CHECK_THROWS(DenseTensor<double, 2>({2, 3}, Eigen::VectorXd::Zero(5)));
}

TEST_CASE("inflate spatial: index arithmetic")
{
    FeatureTensor<double> x({2, 2, 3, 2, 2});
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x.data()[i] = double(i);
    const auto y = inflateSpatial(x);
    CHECK(y.shape() == std::array<Eigen::Index, 4>{6, 2, 2, 2});
    // frame (b=1, f=2) becomes leading index 1*3+2 = 5
    for (int c = 0; c < 2; ++c)
        for (int h = 0; h < 2; ++h)
            for (int w = 0; w < 2; ++w)
                CHECK(y(5, c, h, w) == x(1, c, 2, h, w));
    CHECK(deflateSpatial(y, 3) == x);
    CHECK_THROWS(deflateSpatial(y, 4));
}

TEST_CASE("inflate spatial with one frame keeps contents")
{
    std::mt19937_64 gen(4);
    const auto x = gaussianTensor<5>({3, 2, 1, 2, 3}, gen);
    const auto y = inflateSpatial(x);
    CHECK(y.dim(0) == 3);
    CHECK(y.data() == x.data());
}

TEST_CASE("inflate temporal: index arithmetic and degenerate case")
{
    FeatureTensor<double> x({2, 3, 4, 2, 3});
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x.data()[i] = double(i);
    const auto y = inflateTemporal(x);
    CHECK(y.shape() == std::array<Eigen::Index, 3>{12, 3, 4});
    for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 3; ++c)
            for (int f = 0; f < 4; ++f)
                for (int h = 0; h < 2; ++h)
                    for (int w = 0; w < 3; ++w)
                        CHECK(y.data()[((b * 6 + h * 3 + w) * 3 + c) * 4 + f] == x(b, c, f, h, w));
    CHECK(deflateTemporal(y, 2, 3) == x);

    std::mt19937_64 gen(5);
    const auto z = gaussianTensor<5>({2, 3, 4, 1, 1}, gen);
    const auto zy = inflateTemporal(z);
    CHECK(zy.shape() == std::array<Eigen::Index, 3>{2, 3, 4});
    CHECK(zy.data() == z.data());
    CHECK_THROWS(deflateTemporal(y, 5, 1));
}

TEST_CASE("inflation round trips on every small shape")
{
    std::mt19937_64 gen(6);
    int shapes = 0;
    for (Eigen::Index b = 1; b <= 3; ++b)
        for (Eigen::Index c = 1; c <= 3; ++c)
            for (Eigen::Index f = 1; f <= 3; ++f)
                for (Eigen::Index h = 1; h <= 3; ++h)
                    for (Eigen::Index w = 1; w <= 3; ++w)
                    {
                        const auto x = gaussianTensor<5>({b, c, f, h, w}, gen);
                        CHECK(deflateSpatial(inflateSpatial(x), f) == x);
                        CHECK(deflateTemporal(inflateTemporal(x), h, w) == x);
                        ++shapes;
                    }
    CHECK(shapes == 243);
}

TEST_CASE("position encoding matches the sinusoidal definition")
{
    const auto p = sinusoidalPositionEncoding<double>(8, 6);
    for (int pos = 0; pos < 8; ++pos)
        for (int i = 0; i < 6; ++i)
            CHECK(p(pos, i) == doctest::Approx(positionEncodingOracle(pos, i, 6)).epsilon(1e-14));
    CHECK(p(0, 0) == 0.0);
    CHECK(p(0, 1) == 1.0);
}

TEST_CASE("temporal attention matches the naive oracle")
{
    std::srand(7);
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 30; ++trial)
    {
        const int c = 1 + int(gen() % 16);
        const int f = 1 + int(gen() % 8);
        const auto p = AttentionParams<double>::random(c, 8);
        const MatrixX<double> z = MatrixX<double>::Random(c, f);
        for (bool usePos : {false, true})
        {
            const auto r = temporalAttention(z, p, usePos);
            const auto posRows = columns(p.positionEncoding.topRows(f).transpose());
            const auto naive = naiveAttention(columns(z), rowMajor(p.query), rowMajor(p.key), rowMajor(p.value),
                                              usePos ? &posRows : nullptr);
            CHECK(maxDiff(r.output, naive.out) < 1e-9);
            for (int i = 0; i < f; ++i)
            {
                CHECK(std::abs(r.weights.row(i).sum() - 1.0) < 1e-12);
                for (int j = 0; j < f; ++j)
                    CHECK(std::abs(r.weights(i, j) - naive.weights[i][j]) < 1e-12);
            }
        }
    }
}

TEST_CASE("temporal attention: single frame returns the value projection")
{
    const auto p = AttentionParams<double>::random(5, 4);
    const MatrixX<double> z = MatrixX<double>::Random(5, 1);
    const auto r = temporalAttention(z, p, false);
    CHECK(r.weights(0, 0) == 1.0);
    const MatrixX<double> vz = p.value * z;
    CHECK((r.output.array() == vz.array()).all());
}

TEST_CASE("temporal attention: zero query and key average the values")
{
    auto p = AttentionParams<double>::random(4, 6);
    p.query.setZero();
    p.key.setZero();
    const MatrixX<double> z = MatrixX<double>::Random(4, 6);
    const auto r = temporalAttention(z, p, false);
    const Eigen::VectorXd mean = (p.value * z).rowwise().mean();
    for (int j = 0; j < 6; ++j)
        CHECK((r.output.col(j) - mean).norm() < 1e-12);
}

TEST_CASE("temporal attention: permutation equivariance without positions only")
{
    const auto p = AttentionParams<double>::random(6, 5);
    const MatrixX<double> z = MatrixX<double>::Random(6, 5);
    const std::vector<int> perm = {3, 0, 4, 1, 2};
    MatrixX<double> zp(6, 5);
    for (int j = 0; j < 5; ++j)
        zp.col(j) = z.col(perm[j]);
    const auto a = temporalAttention(z, p, false);
    const auto b = temporalAttention(zp, p, false);
    for (int j = 0; j < 5; ++j)
        CHECK((b.output.col(j) - a.output.col(perm[j])).norm() < 1e-12);

    const auto ap = temporalAttention(z, p, true);
    const auto bp = temporalAttention(zp, p, true);
    double gap = 0.0;
    for (int j = 0; j < 5; ++j)
        gap = std::max(gap, (bp.output.col(j) - ap.output.col(perm[j])).norm());
    CHECK(gap > 1e-6);
}

TEST_CASE("temporal attention rejects mismatched dimensions")
{
    const auto p = AttentionParams<double>::random(4, 2);
    CHECK_THROWS(temporalAttention(MatrixX<double>::Random(3, 2), p, false));
    CHECK_THROWS(temporalAttention(MatrixX<double>::Random(4, 3), p, true));  // table too short
    CHECK_NOTHROW(temporalAttention(MatrixX<double>::Random(4, 3), p, false));
    auto bad = p;
    bad.key = MatrixX<double>::Random(4, 3);
    CHECK_THROWS(temporalAttention(MatrixX<double>::Random(4, 2), bad, false));
}

TEST_CASE("training loss")
{
    std::mt19937_64 gen(8);
    const auto a = gaussianTensor<5>({2, 2, 3, 2, 2}, gen);
    CHECK(trainingLoss(a, a) == 0.0);
    auto shifted = a;
    shifted.data().array() += 1.0;
    CHECK(trainingLoss(a, shifted) == doctest::Approx(1.0).epsilon(1e-12));
    const auto b = gaussianTensor<5>({2, 2, 3, 2, 2}, gen);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        acc += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    CHECK(std::abs(trainingLoss(a, b) - acc / a.size()) < 1e-9);
    CHECK(trainingLoss(a, b) > 0.0);
    CHECK_THROWS(trainingLoss(a, gaussianTensor<5>({2, 2, 3, 2, 1}, gen)));
}

TEST_CASE("denoising objective with the linear stub")
{
    std::mt19937_64 gen(9);
    const auto z0 = gaussianTensor<5>({1, 2, 4, 3, 3}, gen);
    const auto eps = gaussianTensor<5>({1, 2, 4, 3, 3}, gen);
    const auto s = NoiseSchedule<double>::standard();
    const Eigen::VectorXd cond = Eigen::VectorXd::Zero(4);
    // gain 1/sqrt(1 - a) with z0 = 0 predicts eps exactly
    FeatureTensor<double> zero(z0.shape());
    const int t = 600;
    const LinearNoisePredictor<double> exact(1.0 / std::sqrt(1.0 - s.alphaBar(t)), 0.0);
    CHECK(denoisingObjective(exact, zero, eps, t, s, cond) < 1e-20);
    const LinearNoisePredictor<double> off(0.0, 1.0);
    const auto ones = [&] {
        auto o = eps;
        o.data().setOnes();
        return o;
    }();
    CHECK(denoisingObjective(off, z0, eps, t, s, cond) == doctest::Approx(trainingLoss(eps, ones)));
}
