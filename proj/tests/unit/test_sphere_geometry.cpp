#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "srdreg/grid.hpp"
#include "srdreg/error.hpp"
#include "srdreg/sphere_geometry.hpp"

using namespace srdreg;

namespace {

TangentVector random_tangent(const SquareRootDensity& h, Rng& rng, double length) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(static_cast<Eigen::Index>(h.size()));
    // Smooth random direction: a few low-frequency cosines.
    v.setZero();
    for (int k = 1; k <= 4; ++k) {
        const double a = normal(rng);
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v(i) += a * std::cos(k * std::numbers::pi * grid_point(static_cast<std::size_t>(i), h.size()));
    }
    v -= trapezoid_inner(v, h.values()) * h.values();
    v *= length / std::sqrt(trapezoid_inner(v, v));
    return {h.values(), v};
}

}  // namespace

TEST(ToSrd, UniformIsConstantOne) {
    const auto h = to_srd(fixtures::from_function([](double) { return 1.0; }));
    EXPECT_LT((h.values().array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(ToSrd, LinearDensityClosedForm) {
    const auto h = to_srd(fixtures::from_function([](double x) { return 2 * x; }));
    Eigen::VectorXd expected(static_cast<Eigen::Index>(fixtures::m));
    for (std::size_t i = 0; i < fixtures::m; ++i)
        expected(static_cast<Eigen::Index>(i)) = std::sqrt(std::max(2 * grid_point(i, fixtures::m), 1e-10));
    expected /= std::sqrt(trapezoid_inner(expected, expected));
    EXPECT_LT((h.values() - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ToSrd, UnitNormAndPositive) {
    auto rng = make_rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto h = fixtures::random_srd(rng);
        EXPECT_NEAR(trapezoid_inner(h.values(), h.values()), 1.0, 1e-8);
        EXPECT_GT(h.values().minCoeff(), 0.0);
    }
}

TEST(GeodesicDistance, UniformVersusLinear) {
    const auto h1 = to_srd(fixtures::from_function([](double) { return 1.0; }));
    const auto h2 = to_srd(fixtures::from_function([](double x) { return 2 * x; }));
    EXPECT_NEAR(geodesic_distance(h1, h2), std::acos(2 * std::sqrt(2.0) / 3), 1e-4);
    EXPECT_NEAR(geodesic_distance(h1, h2), 0.33984, 1e-4);
}

TEST(GeodesicDistance, SelfSymmetryAndRange) {
    auto rng = make_rng(2);
    for (int i = 0; i < 100; ++i) {
        const auto a = fixtures::random_srd(rng);
        const auto b = fixtures::random_srd(rng);
        EXPECT_EQ(geodesic_distance(a, a), 0.0);
        EXPECT_EQ(geodesic_distance(a, b), geodesic_distance(b, a));
        EXPECT_LE(geodesic_distance(a, b), std::numbers::pi / 2);
    }
}

TEST(GeodesicDistance, GridMismatchRejected) {
    const auto a = to_srd(fixtures::from_function([](double) { return 1.0; }, 64));
    const auto b = to_srd(fixtures::from_function([](double) { return 1.0; }, 128));
    EXPECT_ANY_THROW(geodesic_distance(a, b));
}

TEST(GeodesicDistance, TriangleInequality) {
    auto rng = make_rng(4);
    for (int i = 0; i < 200; ++i) {
        const auto a = fixtures::random_srd(rng);
        const auto b = fixtures::random_srd(rng);
        const auto c = fixtures::random_srd(rng);
        EXPECT_LE(geodesic_distance(a, c), geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-9);
    }
}

TEST(ExpMap, ZeroVectorIsIdentity) {
    auto rng = make_rng(5);
    const auto h = fixtures::random_srd(rng);
    const TangentVector zero{h.values(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h.size()))};
    EXPECT_EQ(exp_map(h, zero).values(), h.values());
}

TEST(ExpMap, UnitNormAndArcLength) {
    auto rng = make_rng(6);
    std::uniform_real_distribution<double> length(0.01, 1.0);
    for (int i = 0; i < 100; ++i) {
        const auto h = to_srd(fixtures::from_function([](double) { return 1.0; }));
        // From the uniform SRD every tangent of norm <= 1 with smooth shape stays positive.
        const auto v = random_tangent(h, rng, length(rng) * 0.3);
        const auto out = exp_map(h, v);
        EXPECT_NEAR(trapezoid_inner(out.values(), out.values()), 1.0, 1e-8);
        EXPECT_NEAR(geodesic_distance(h, out), v.norm(), 1e-6);
    }
}

TEST(InvExpMap, SelfIsZero) {
    auto rng = make_rng(7);
    const auto h = fixtures::random_srd(rng);
    EXPECT_EQ(inv_exp_map(h, h).values.norm(), 0.0);
}

TEST(InvExpMap, RoundTripTangencyAndNorm) {
    auto rng = make_rng(8);
    for (int i = 0; i < 100; ++i) {
        const auto a = fixtures::random_srd(rng);
        const auto b = fixtures::random_srd(rng);
        const auto v = inv_exp_map(a, b);
        EXPECT_LT(std::abs(trapezoid_inner(v.values, a.values())), 1e-6);
        EXPECT_NEAR(v.norm(), geodesic_distance(a, b), 1e-8);
        EXPECT_LT(fixtures::l2_error(exp_map(a, v).values(), b.values()), 1e-8);
    }
}

TEST(KarcherMean, SinglePoint) {
    auto rng = make_rng(9);
    const std::vector<SquareRootDensity> one{fixtures::random_srd(rng)};
    EXPECT_LT(fixtures::l2_error(karcher_mean(one).mean.values(), one[0].values()), 1e-12);
}

TEST(KarcherMean, TwoPointMidpointMatchesGridSearch) {
    auto rng = make_rng(10);
    for (int rep = 0; rep < 5; ++rep) {
        const std::vector<SquareRootDensity> pair{fixtures::random_srd(rng), fixtures::random_srd(rng)};
        const auto v = inv_exp_map(pair[0], pair[1]);
        // Minimize the variance functional along the connecting geodesic by
        // golden-section search over the fraction t.
        auto along = [&](double t) { return exp_map(pair[0], {v.base, t * v.values}); };
        auto cost = [&](double t) { return variance_functional(along(t), pair); };
        double lo = 0.0, hi = 1.0;
        const double g = (std::sqrt(5.0) - 1) / 2;
        for (int it = 0; it < 200; ++it) {
            const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            if (cost(x1) < cost(x2))
                hi = x2;
            else
                lo = x1;
        }
        const auto oracle = along(0.5 * (lo + hi));
        const auto mean = karcher_mean(pair, {1e-10, 0.5, 200}).mean;
        EXPECT_LT(fixtures::l2_error(mean.values(), oracle.values()), 1e-6);
        EXPECT_LT(fixtures::l2_error(mean.values(), along(0.5).values()), 1e-6);
    }
}

TEST(KarcherMean, PermutationInvariant) {
    auto rng = make_rng(11);
    std::vector<SquareRootDensity> sample;
    for (int i = 0; i < 15; ++i) sample.push_back(fixtures::random_srd(rng));
    const auto a = karcher_mean(sample).mean;
    std::shuffle(sample.begin(), sample.end(), rng);
    const auto b = karcher_mean(sample).mean;
    EXPECT_LT(fixtures::l2_error(a.values(), b.values()), 1e-10);
}

TEST(KarcherMean, FirstOrderConditionAndLocalMinimum) {
    auto rng = make_rng(12);
    std::vector<SquareRootDensity> sample;
    for (int i = 0; i < 61; ++i) sample.push_back(fixtures::random_srd(rng));
    const auto result = karcher_mean(sample);
    EXPECT_LT(result.gradient_norm, 1e-6);

    Eigen::VectorXd mean_tangent = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fixtures::m));
    for (const auto& h : sample) mean_tangent += inv_exp_map(result.mean, h).values;
    mean_tangent /= static_cast<double>(sample.size());
    EXPECT_LT(std::sqrt(trapezoid_inner(mean_tangent, mean_tangent)), 1e-6);

    const double at_mean = variance_functional(result.mean, sample);
    for (const auto& h : sample) EXPECT_LE(at_mean, variance_functional(h, sample));
    for (int i = 0; i < 20; ++i) {
        const auto moved = exp_map(result.mean, random_tangent(result.mean, rng, 0.01));
        EXPECT_LE(at_mean, variance_functional(moved, sample));
    }
}

TEST(KarcherMean, NonConvergenceCarriesGradientNorm) {
    auto rng = make_rng(14);
    std::vector<SquareRootDensity> sample;
    for (int i = 0; i < 10; ++i) sample.push_back(fixtures::random_srd(rng));
    try {
        karcher_mean(sample, {1e-300, 0.5, 1});
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_GE(e.last_gradient_norm(), 0.0);
    }
}
