#include "stablelab/sublinear.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace stablelab;

namespace {

using boost::math::quadrature::gauss_kronrod;

UncertaintySet singleton(double k_minus, double k_plus) { return UncertaintySet(1.5, {{k_minus, k_plus}}, 0.5, 3.0); }
UncertaintySet corners() { return UncertaintySet(1.5, {{0.7, 0.7}, {0.7, 1.2}, {1.2, 0.7}, {1.2, 1.2}}, 0.5, 3.0); }

Grid dp_grid(std::size_t nx = 4001, double half_width = 20.0) {
    return Grid::make(-half_width, half_width, nx, 1.0, 1);
}

// phi_W(w) = E exp(i w W): Gauss-Kronrod on the interior, Ooura transforms on the tails.
class LawCharFunction {
public:
    explicit LawCharFunction(const AttractedLaw& law) : law_(law) {}

    std::complex<double> operator()(double w) const {
        const double z0 = law_.z0();
        const double a = law_.alpha();
        auto re = [&](double z) { return std::cos(w * z) * law_.density(z); };
        auto im = [&](double z) { return std::sin(w * z) * law_.density(z); };
        std::complex<double> acc{gauss_kronrod<double, 61>::integrate(re, -z0, z0, 15, 1e-13),
                                 gauss_kronrod<double, 61>::integrate(im, -z0, z0, 15, 1e-13)};
        // int_0^inf e^{+-i w (z0 + s)} (z0 + s)^(-a-1) ds
        auto g = [&](double s) { return std::pow(z0 + s, -a - 1.0); };
        const double c = cos_.integrate(g, w).first;
        const double s = sin_.integrate(g, w).first;
        const std::complex<double> right = std::polar(1.0, w * z0) * std::complex<double>(c, s);
        const std::complex<double> left = std::polar(1.0, -w * z0) * std::complex<double>(c, -s);
        return acc + law_.tail_weight(true) * right + law_.tail_weight(false) * left;
    }

private:
    const AttractedLaw& law_;
    mutable boost::math::quadrature::ooura_fourier_cos<double> cos_{};
    mutable boost::math::quadrature::ooura_fourier_sin<double> sin_{};
};

std::vector<double> random_row(std::mt19937& gen, std::size_t m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(m);
    for (auto& v : c) v = u(gen);
    return c;
}

// Bounded Lipschitz test function: a sum of shifted bumps with random weights.
std::function<double(double)> random_psi(std::mt19937& gen) {
    const auto w = random_row(gen, 4);
    const auto s = random_row(gen, 4);
    return [w, s](double x) {
        double v = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) v += w[i] * std::exp(-(x - 3.0 * s[i]) * (x - 3.0 * s[i]));
        return v;
    };
}

}  // namespace

TEST(NormalizedSumSpec, ScalingIdentity) {
    double prev = 2.0;
    for (std::size_t n : {1u, 2u, 8u, 64u, 1000u}) {
        const NormalizedSumSpec spec{n, 1.3};
        const double bn = spec.B_n(1.5);
        EXPECT_LT(bn, prev);
        EXPECT_NEAR(bn * std::pow(static_cast<double>(n), 1.0 / 1.5) * 1.3, 1.0, 1e-14);
        prev = bn;
    }
}

TEST(LawFamily, ValidatesMembers) {
    const auto set = corners();
    const auto fam = LawFamily::build(set, 1.0, 2.0);
    EXPECT_EQ(fam.laws().size(), 4u);
    std::vector<AttractedLaw> mixed{build_law({1.0, 1.0}, 1.5, 1.0, 2.0), build_law({1.0, 1.0}, 1.5, 1.0, 3.0)};
    EXPECT_THROW(LawFamily(mixed, UncertaintySet(1.5, {{1.0, 1.0}, {1.0, 1.0}}, 0.5, 3.0)), ValidationError);
    EXPECT_THROW(LawFamily({}, singleton(1.0, 1.0)), ValidationError);
    std::vector<AttractedLaw> one{build_law({1.0, 1.0}, 1.5, 1.0, 2.0)};
    EXPECT_THROW(LawFamily(one, singleton(1.2, 1.2)), ValidationError);
}

TEST(SupExpectation, MeanZeroAndPositivePart) {
    const auto fam = LawFamily::build(UncertaintySet(1.5, {{0.7, 0.7}, {1.2, 1.2}}, 0.5, 3.0), 1.0, 2.0);
    EXPECT_NEAR(sup_expectation(Integrand{[](double z) { return z; }, 1.0, true}, fam), 0.0, 1e-12);
    EXPECT_NEAR(sup_expectation(Integrand{[](double z) { return -z; }, 1.0, true}, fam), 0.0, 1e-12);

    auto pos = [](double z) { return std::max(z, 0.0); };
    double best = 0.0;
    for (const auto& law : fam.laws()) {
        auto g = [&](double z) { return z * law.density(z); };
        const double inner = gauss_kronrod<double, 61>::integrate(g, 0.0, law.z0(), 15, 1e-13);
        best = std::max(best, inner + law.tail_abs_first_moment(true));
    }
    EXPECT_NEAR(sup_expectation(Integrand{pos, 1.0, true}, fam), best, 1e-10);
    EXPECT_NEAR(sup_expectation(Integrand{pos, 1.0, true}, LawFamily::build(singleton(0.7, 0.7), 1.0, 2.0)),
                law_expectation(Integrand{pos, 1.0, true}, fam.laws().front()), 1e-15);
}

TEST(NestedSum, OneStepUnrollsTheDefinition) {
    const auto fam = LawFamily::build(singleton(0.7, 1.2), 1.0, 2.0);
    const Grid g = dp_grid(161);
    auto psi = [](double x) { return std::sin(x) / (1.0 + 0.1 * x * x); };
    const auto samples = sample(psi, g);
    // the engine integrates the piecewise-linear interpolant of the samples
    auto interp = [&](double x) { return interpolate_row(samples, g, std::clamp(x, g.x_min, g.x_max)); };
    const NestedOptions no_reach{1e-4, false};
    const double dp = nested_sum_expectation(psi, fam, {1, 1.0}, g, no_reach);
    EXPECT_NEAR(dp, law_expectation(interp, fam.laws().front()), 1e-9);
}

TEST(NestedSum, ConstantsAreFixedPoints) {
    const auto fam = LawFamily::build(corners(), 1.0, 2.0);
    for (std::size_t n : {1u, 3u, 8u}) {
        EXPECT_EQ(nested_sum_expectation([](double) { return 0.37; }, fam, {n, 1.0}, dp_grid(801)), 0.37);
    }
}

TEST(NestedSum, FourFoldConvolutionOracle) {
    const auto fam = LawFamily::build(singleton(1.0, 1.0), 1.0, 2.0);
    const auto& law = fam.laws().front();
    const LawCharFunction phi(law);
    // 1 - phi(w) ~ -(k- + k+) Gamma(-a) cos(pi a / 2) |w|^a near the origin, phi real by symmetry
    const double c_unit = std::tgamma(-1.5) * std::cos(0.75 * std::numbers::pi);
    EXPECT_NEAR((1.0 - phi(1e-4).real()) / (-2.0 * c_unit * std::pow(1e-4, 1.5)), 1.0, 1e-2);
    EXPECT_NEAR(phi(0.7).imag(), 0.0, 1e-12);

    // E psi(B_4 S_4) = (1/pi) int_0^inf Re[ psi^(w) phi(B_4 w)^4 ] dw for psi(x) = exp(-x^2)
    const double b4 = NormalizedSumSpec{4, 1.0}.B_n(1.5);
    auto integrand = [&](double w) {
        if (w == 0.0) return std::sqrt(std::numbers::pi);
        return (std::sqrt(std::numbers::pi) * std::exp(-w * w / 4.0) * std::pow(phi(b4 * w), 4)).real();
    };
    const double oracle = gauss_kronrod<double, 31>::integrate(integrand, 0.0, 14.0, 6, 1e-10) / std::numbers::pi;
    const double dp = nested_sum_expectation([](double x) { return std::exp(-x * x); }, fam, {4, 1.0}, dp_grid());
    EXPECT_NEAR(dp, oracle, 1e-3);
}

TEST(NestedSum, SingletonIsLinear) {
    const auto fam = LawFamily::build(singleton(0.7, 1.2), 1.0, 2.0);
    auto psi = [](double x) { return std::tanh(x - 0.5); };
    const double a = nested_sum_expectation(psi, fam, {4, 1.0}, dp_grid(1601));
    const double b = nested_sum_expectation([&](double x) { return -psi(x); }, fam, {4, 1.0}, dp_grid(1601));
    EXPECT_NEAR(a, -b, 1e-12);
}

TEST(NestedSum, SymmetricLawOddPsiGivesZero) {
    const auto fam = LawFamily::build(singleton(1.2, 1.2), 1.0, 2.0);
    EXPECT_NEAR(nested_sum_expectation([](double x) { return std::tanh(x); }, fam, {6, 1.0}, dp_grid(1601)), 0.0,
                1e-12);
}

TEST(NestedSum, SublinearAxiomsOnRandomTriples) {
    const auto fam = LawFamily::build(corners(), 1.0, 2.0);
    const Grid g = dp_grid(1601);
    const NormalizedSumSpec spec{8, 1.0};
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> scale(0.0, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p1 = random_psi(gen);
        const auto p2 = random_psi(gen);
        const double c = scale(gen);
        const double e1 = nested_sum_expectation(p1, fam, spec, g);
        const double e2 = nested_sum_expectation(p2, fam, spec, g);
        const double sum = nested_sum_expectation([&](double x) { return p1(x) + p2(x); }, fam, spec, g);
        EXPECT_LE(sum, e1 + e2 + 1e-6 * 8);
        const double scaled = nested_sum_expectation([&](double x) { return c * p1(x); }, fam, spec, g);
        EXPECT_NEAR(scaled, c * e1, 1e-13 * (1.0 + std::abs(c * e1)));
        // monotonicity: p1 + |p2| dominates p1
        const double dom = nested_sum_expectation([&](double x) { return p1(x) + std::abs(p2(x)); }, fam, spec, g);
        EXPECT_GE(dom, e1 - 1e-14);
        const double shifted = nested_sum_expectation([&](double x) { return p1(x) + c; }, fam, spec, g);
        EXPECT_NEAR(shifted, e1 + c, 1e-12);
    }
}

TEST(NestedSum, NarrowGridIsReported) {
    const auto fam = LawFamily::build(singleton(1.0, 1.0), 1.0, 2.0);
    auto psi = [](double x) { return std::clamp(x, -5.0, 5.0); };
    try {
        (void)nested_sum_expectation(psi, fam, {8, 1.0}, dp_grid(81, 2.0));
        FAIL() << "expected GridTooNarrowError";
    } catch (const GridTooNarrowError& e) {
        EXPECT_GT(e.estimate(), 1e-4);
        EXPECT_GT(e.suggested_half_width(), 2.0);
    }
    EXPECT_THROW((void)nested_sum_expectation(psi, fam, {8, 1.0}, Grid::make(0.0, 4.0, 81, 1.0, 1)), ValidationError);
}

TEST(CltError, ConstantsAndDecreasingErrors) {
    const auto set = singleton(1.0, 1.0);
    const auto fam = LawFamily::build(set, 1.0, 2.0);
    const Grid pide = Grid::make(-20, 20, 401, 1.0, 1);
    const Grid pide_g = pide.with_time(1.0, stable_step_count(pide, set, 1.0, 0.5));
    EXPECT_NEAR(clt_error([](double) { return 2.0; }, fam, set, {4, 1.0}, dp_grid(801), pide_g), 0.0, 1e-12);

    const std::vector<std::size_t> ns{4, 16, 64};
    const auto table =
        convergence_table([](double x) { return std::exp(-x * x); }, fam, set, ns, dp_grid(), pide_g);
    ASSERT_EQ(table.rows.size(), 3u);
    EXPECT_GT(table.rows[0].abs_error, table.rows[1].abs_error);
    EXPECT_GT(table.rows[1].abs_error, table.rows[2].abs_error);
    EXPECT_LT(table.fitted_rate, 0.0);
    EXPECT_THROW((void)clt_error([](double) { return 1.0; }, fam, singleton(1.2, 1.2), {4, 1.0}, dp_grid(801), pide_g),
                 ValidationError);
}

TEST(LogLogSlope, ExactOnPowerLaws) {
    const std::vector<double> x{1, 2, 4, 8, 16};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -0.75));
    EXPECT_NEAR(loglog_slope(x, y), -0.75, 1e-14);
    y[2] = 0.0;  // non-positive entries are skipped
    EXPECT_NEAR(loglog_slope(x, y), -0.75, 1e-14);
    EXPECT_TRUE(std::isnan(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0})));
}
