#include "stablelab/kernel.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace stablelab;

namespace {

double brute_half_line(double c, double alpha, double power, double lo, double hi) {
    // int_lo^hi c z^power z^(-alpha-1) dz by double-exponential quadrature
    auto f = [=](double z) { return c * std::pow(z, power - alpha - 1.0); };
    if (std::isinf(hi)) {
        boost::math::quadrature::exp_sinh<double> rule;
        return rule.integrate([&](double s) { return f(lo + s); }, 1e-13);
    }
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(f, lo, hi, 1e-13);
}

}  // namespace

TEST(LevyDensity, PowerLawValues) {
    EXPECT_DOUBLE_EQ(levy_density({1.0, 1.0}, 1.5, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(levy_density({2.0, 1.0}, 1.5, -1.0), 2.0);
    EXPECT_DOUBLE_EQ(levy_density({1.0, 1.0}, 1.5, 4.0), 0.03125);
}

TEST(LevyDensity, OriginIsRejected) {
    EXPECT_THROW(levy_density({1.0, 1.0}, 1.5, 0.0), DomainError);
    EXPECT_THROW(levy_density({1.0, 1.0}, 2.0, 1.0), ValidationError);
    EXPECT_THROW(levy_density({1.0, 1.0}, 1.0, 1.0), ValidationError);
}

TEST(DriftB, ClosedForms) {
    EXPECT_DOUBLE_EQ(drift_b({1.0, 1.0}, 1.3), 0.0);
    EXPECT_DOUBLE_EQ(drift_b({2.0, 1.0}, 1.5), 2.0);
    EXPECT_NEAR(drift_b({1.0, 3.0}, 1.75), -8.0 / 3.0, 1e-15);
}

TEST(DriftB, MatchesQuadratureOfDefinition) {
    for (double alpha : {1.1, 1.5, 1.9}) {
        const KernelPair k{2.5, 0.7};
        // int_1^inf z^-alpha dz
        const double direct = (k.k_minus - k.k_plus) * brute_half_line(1.0, alpha, 1.0, 1.0, INFINITY);
        EXPECT_NEAR(drift_b(k, alpha) / direct, 1.0, 1e-6) << alpha;
    }
}

TEST(SmallJumpSecondMoment, ClosedForms) {
    EXPECT_DOUBLE_EQ(small_jump_second_moment({1.0, 1.0}, 1.5, 1.0), 4.0);
    EXPECT_LT(small_jump_second_moment({1.0, 1.0}, 1.5, 1e-12), 1e-5);
    EXPECT_THROW(small_jump_second_moment({1.0, 1.0}, 1.5, 0.0), DomainError);
    EXPECT_THROW(small_jump_second_moment({1.0, 1.0}, 1.5, -1.0), DomainError);
}

TEST(SmallJumpSecondMoment, MatchesQuadratureOracle) {
    // (2,3), alpha = 1.25, r = 0.5: both half-lines of z^2 F(dz)
    const double oracle = brute_half_line(2.0, 1.25, 2.0, 0.0, 0.5) + brute_half_line(3.0, 1.25, 2.0, 0.0, 0.5);
    const double value = small_jump_second_moment({2.0, 3.0}, 1.25, 0.5);
    EXPECT_NEAR(value / oracle, 1.0, 1e-6);
    EXPECT_NEAR(value, 3.96402, 1e-5);
}

TEST(TailMoments, MatchQuadratureOracle) {
    for (double alpha : {1.2, 1.5, 1.8}) {
        for (double r : {0.3, 1.0, 2.0}) {
            EXPECT_NEAR(tail_mass(1.7, alpha, r) / brute_half_line(1.7, alpha, 0.0, r, INFINITY), 1.0, 1e-6);
            EXPECT_NEAR(tail_first_moment(1.7, alpha, r) / brute_half_line(1.7, alpha, 1.0, r, INFINITY), 1.0,
                        1e-6);
        }
    }
    EXPECT_THROW(tail_mass(1.0, 1.5, 0.0), DomainError);
    EXPECT_THROW(tail_first_moment(1.0, 1.5, -2.0), DomainError);
}

TEST(UncertaintySet, RejectsBadBounds) {
    EXPECT_THROW(UncertaintySet(1.5, {}, 0.5, 3.0), ValidationError);
    EXPECT_THROW(UncertaintySet(1.5, {{1.0, 1.0}}, 2.0, 1.0), ValidationError);
    EXPECT_THROW(UncertaintySet(1.5, {{0.4, 1.0}}, 0.5, 3.0), ValidationError);
    EXPECT_THROW(UncertaintySet(1.5, {{1.0, 3.0}}, 0.5, 3.0), ValidationError);
    EXPECT_THROW(UncertaintySet(2.5, {{1.0, 1.0}}, 0.5, 3.0), ValidationError);
    try {
        UncertaintySet(1.5, {{1.0, 9.0}}, 0.5, 3.0);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.module(), "stable_kernel");
        EXPECT_EQ(e.field(), "pairs");
    }
}

TEST(UncertaintySet, SingletonBracketsPair) {
    const auto s = UncertaintySet::singleton(1.5, {2.0, 1.0});
    EXPECT_TRUE(s.is_singleton());
    EXPECT_EQ(s.pairs().size(), 1u);
    EXPECT_DOUBLE_EQ(s.max_total(), 3.0);
}
