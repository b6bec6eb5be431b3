#include "stablelab/attracted.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace stablelab;

namespace {

using boost::math::quadrature::gauss_kronrod;

// int of f(z) p(z) over the real line: Gauss-Kronrod between 0, +-z0 and the given kinks,
// exp-sinh beyond the outermost break on each side.
template <class F>
double integrate_against(const AttractedLaw& law, F f, std::vector<double> kinks = {}) {
    const double z0 = law.z0();
    auto g = [&](double z) { return f(z) * law.density(z); };
    kinks.insert(kinks.end(), {-z0, 0.0, z0});
    std::sort(kinks.begin(), kinks.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < kinks.size(); ++i) {
        s += gauss_kronrod<double, 61>::integrate(g, kinks[i], kinks[i + 1], 15, 1e-13);
    }
    boost::math::quadrature::exp_sinh<double> es;
    const double lo = kinks.front();
    const double hi = kinks.back();
    s += es.integrate([&](double u) { return g(hi + u); }, 1e-14);
    s += es.integrate([&](double u) { return g(lo - u); }, 1e-14);
    return s;
}

}  // namespace

TEST(AttractedLaw, UnitMassAndZeroMean) {
    for (KernelPair k : {KernelPair{1.0, 1.0}, KernelPair{0.7, 1.2}, KernelPair{1.2, 0.7}}) {
        for (double a : {1.25, 1.5, 1.75}) {
            const auto law = build_law(k, a, 1.0, a < 1.3 ? 4.0 : 2.0);
            EXPECT_NEAR(law.total_mass(), 1.0, 1e-12);
            EXPECT_NEAR(law.mean(), 0.0, 1e-12);
            EXPECT_NEAR(integrate_against(law, [](double) { return 1.0; }), 1.0, 1e-9);
            EXPECT_NEAR(integrate_against(law, [](double z) { return z; }), 0.0, 1e-8);
        }
    }
}

TEST(AttractedLaw, SymmetricPairHasNoTiltAndKnownTails) {
    const auto law = build_law({1.0, 1.0}, 1.5, 1.0, 2.0);
    EXPECT_EQ(law.tilt(), 0.0);
    // b^alpha (k- + k+) / (alpha z0^alpha)
    EXPECT_NEAR(law.left_tail_mass() + law.right_tail_mass(), 2.0 / (1.5 * std::pow(2.0, 1.5)), 1e-15);
    EXPECT_NEAR(law.left_tail_mass() + law.right_tail_mass(), 0.4714045207910317, 1e-14);
    for (double z : {0.3, 1.1, 1.9, 5.0}) EXPECT_NEAR(law.density(z), law.density(-z), 1e-15);
}

TEST(AttractedLaw, SkewedPairNeedsRoomForTheMean) {
    // at z0 = 2 the interior cannot carry the first moment that cancels the (2,1) tails
    try {
        (void)build_law({2.0, 1.0}, 1.5, 1.0, 2.0);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.module(), "attracted_laws");
        EXPECT_EQ(e.field(), "z0");
    }
    const auto law = build_law({2.0, 1.0}, 1.5, 1.0, 3.0);
    EXPECT_LT(std::abs(integrate_against(law, [](double z) { return z; })), 1e-10);
    EXPECT_NEAR(integrate_against(law, [](double) { return 1.0; }), 1.0, 1e-10);
}

TEST(AttractedLaw, JunctionsAreC1) {
    for (KernelPair k : {KernelPair{1.0, 1.0}, KernelPair{0.7, 1.2}}) {
        const auto law = build_law(k, 1.5, 1.3, 2.5);
        const double z0 = law.z0();
        for (double s : {-1.0, 1.0}) {
            const double tail = law.density(s * z0);
            const double tail_d = law.density_derivative(s * z0);
            EXPECT_NEAR(law.interior_density(s * z0) / tail, 1.0, 1e-12);
            EXPECT_NEAR(law.interior_derivative(s * z0) / tail_d, 1.0, 1e-11);
        }
    }
}

TEST(AttractedLaw, RejectsInvalidParameters) {
    EXPECT_THROW((void)build_law({1.0, 1.0}, 2.0, 1.0, 2.0), ValidationError);
    EXPECT_THROW((void)build_law({1.0, 1.0}, 1.5, -1.0, 2.0), ValidationError);
    EXPECT_THROW((void)build_law({0.0, 1.0}, 1.5, 1.0, 2.0), ValidationError);
    // tails alone exceed unit mass
    EXPECT_THROW((void)build_law({1.0, 1.0}, 1.5, 1.0, 0.5), ValidationError);
}

TEST(BetaFunctions, VanishBeyondJunctionAndMatchLimits) {
    const auto law = build_law({0.7, 1.2}, 1.5, 1.0, 2.0);
    EXPECT_EQ(beta_functions(law, -2.0).first, 0.0);
    EXPECT_EQ(beta_functions(law, -7.5).first, 0.0);
    EXPECT_EQ(beta_functions(law, 2.0).second, 0.0);
    EXPECT_EQ(beta_functions(law, 11.0).second, 0.0);
    EXPECT_TRUE(std::isnan(beta_functions(law, 1.0).first));
    EXPECT_TRUE(std::isnan(beta_functions(law, -1.0).second));
    // |z|^alpha F(z) -> 0 as z -> 0-
    EXPECT_NEAR(beta_functions(law, -1e-9).first, -law.tail_weight(false) / 1.5, 1e-12);
    EXPECT_NEAR(beta_functions(law, 1e-9).second, -law.tail_weight(true) / 1.5, 1e-12);
    EXPECT_THROW((void)beta_functions(law, 0.0), DomainError);

    // at z0/2 against an independent cdf
    const double z = -1.0;
    const double F = integrate_against(law, [z](double s) { return s <= z ? 1.0 : 0.0; }, {z});
    EXPECT_NEAR(beta_functions(law, z).first, F * 1.0 - law.tail_weight(false) / 1.5, 1e-7);
}

TEST(BetaFunctions, DerivativeAndKernelIdentity) {
    const auto law = build_law({1.2, 0.7}, 1.5, 1.0, 2.0);
    const double h = 1e-5;
    for (double z : {-1.7, -0.6, -0.05, 0.05, 0.8, 1.9}) {
        auto beta = [&](double s) {
            const auto b = beta_functions(law, s);
            return s < 0.0 ? b.first : b.second;
        };
        const double fd = (beta(z + h) - beta(z - h)) / (2.0 * h);
        EXPECT_NEAR(beta_derivative(law, z), fd, 1e-7) << z;
        const double lhs = z > 0.0 ? -fd * z + 1.5 * beta(z) : fd * std::abs(z) + 1.5 * beta(z);
        EXPECT_NEAR(beta_kernel(law, z), lhs, 1e-7) << z;
    }
    EXPECT_EQ(beta_derivative(law, 3.0), 0.0);
    EXPECT_EQ(beta_kernel(law, -3.0), 0.0);
}

TEST(AttractedLaw, CdfTailIdentity) {
    const auto law = build_law({0.7, 1.2}, 1.75, 1.2, 2.0);
    for (double z : {2.0, 3.0, 17.0}) {
        EXPECT_NEAR(law.cdf(-z), law.tail_weight(false) * std::pow(z, -1.75) / 1.75, 1e-15);
        EXPECT_NEAR(law.survival(z), law.tail_weight(true) * std::pow(z, -1.75) / 1.75, 1e-15);
    }
    EXPECT_NEAR(law.cdf(0.4) + law.survival(0.4), 1.0, 1e-12);
    double prev = 0.0;
    for (double z = -10.0; z <= 10.0; z += 0.25) {
        EXPECT_GE(law.cdf(z), prev);
        prev = law.cdf(z);
    }
}

TEST(LawExpectation, MatchesSplitOracle) {
    const auto law = build_law({0.7, 1.2}, 1.5, 1.0, 2.0);
    EXPECT_NEAR(law_expectation([](double) { return 1.0; }, law), 1.0, 1e-12);
    EXPECT_NEAR(law_expectation(Integrand{[](double z) { return z; }, 1.0, true}, law), 0.0, 1e-12);
    EXPECT_NEAR(law_expectation(Integrand{[](double z) { return std::abs(z); }, 1.0, true}, law),
                integrate_against(law, [](double z) { return std::abs(z); }), 1e-9);
    auto bump = [](double z) { return std::exp(-z * z / 2.0); };
    EXPECT_NEAR(law_expectation(bump, law), integrate_against(law, bump), 1e-10);
    auto clip = [](double z) { return std::clamp(z, -1.0, 3.0); };
    EXPECT_NEAR(law_expectation(clip, law), integrate_against(law, clip, {-1.0, 3.0}), 1e-10);
    // closed form of the tails: -P(W <= -z0) + int_z0^3 z dF + 3 P(W > 3)
    const double wr = law.tail_weight(true);
    const double exact = law.integrate_interior(clip) - law.left_tail_mass() +
                         wr * (std::pow(2.0, -0.5) - std::pow(3.0, -0.5)) / 0.5 + 3.0 * wr * std::pow(3.0, -1.5) / 1.5;
    EXPECT_NEAR(integrate_against(law, clip, {-1.0, 3.0}), exact, 1e-6);
    EXPECT_THROW((void)law_expectation(Integrand{[](double z) { return z * z; }, 2.0, false}, law),
                 DomainError);
}

TEST(AttractedLaw, UniformityQuantitiesFinite) {
    const auto law = build_law({0.7, 1.2}, 1.5, 1.0, 2.0);
    const auto q = uniformity_quantities(law);
    for (double v : q.values) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, 0.0);
    }
    const auto r16 = rate_quantities(law, 16.0);
    const auto r256 = rate_quantities(law, 256.0);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_TRUE(std::isfinite(r16[i]));
        EXPECT_LE(r256[i], r16[i] + 1e-14) << i;
    }
}

TEST(AttractedLaw, JsonRoundTripIsBitExact) {
    const auto law = build_law({0.7, 1.2}, 1.5, 1.0, 2.0);
    const auto back = law_from_json(nlohmann::json::parse(to_json(law).dump()));
    EXPECT_EQ(back.cubic(), law.cubic());
    EXPECT_EQ(back.bump(), law.bump());
    EXPECT_EQ(back.tilt(), law.tilt());
    for (double z : {-5.0, -1.0, 0.0, 0.7, 3.0}) EXPECT_EQ(back.density(z), law.density(z));
    EXPECT_THROW((void)law_from_json(nlohmann::json{{"alpha", 1.5}}), ValidationError);
}
