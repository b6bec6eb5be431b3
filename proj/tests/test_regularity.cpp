#include "stablelab/regularity.hpp"
#include "stablelab/psi.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace stablelab;

namespace {

template <class F>
Surface synthetic(F f, double t0, double span, std::size_t nt, std::size_t nx = 201) {
    Surface s(Grid::make(-5.0, 5.0, nx, span, nt), t0);
    const Grid& g = s.grid();
    for (std::size_t i = 0; i < s.rows(); ++i) {
        auto row = s.row(i);
        for (std::size_t j = 0; j < g.nx; ++j) row[j] = f(s.time(i), g.x(j));
    }
    return s;
}

bool mentions(const std::vector<std::string>& failures, const std::string& field) {
    for (const auto& f : failures) {
        if (f.rfind(field + ":", 0) == 0) return true;
    }
    return false;
}

}  // namespace

TEST(HolderHalf, SquareRootProfileHasUnitConstant) {
    const auto s = synthetic([](double t, double) { return std::sqrt(t); }, 0.0, 1.0, 256);
    EXPECT_NEAR(holder_half_constant(s, 0.0, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(holder_half_constant(s, 0.5, 1.0), std::sqrt(2.0) - 1.0, 1e-12);  // lag 1/2 from t = 1/2
    const auto flat = synthetic([](double, double x) { return std::cos(x); }, 0.0, 1.0, 64);
    EXPECT_EQ(holder_half_constant(flat, 0.0, 1.0), 0.0);
}

TEST(Probe, SmoothSyntheticSurface) {
    // u = sin(x) exp(-t): every bound is attained at x = +-pi/2 or x = 0 on the first row of [h, h+1]
    const auto u = synthetic([](double t, double x) { return std::sin(x) * std::exp(-t); }, 0.0, 1.25, 500, 401);
    const auto rep = probe(u, TerminalProblem{}, 0.25, true);
    const double e = std::exp(-0.25);
    EXPECT_NEAR(rep.lip_x, 1.0, 1e-3);
    EXPECT_NEAR(rep.dx_u_bound, e, 1e-3);
    EXPECT_NEAR(rep.dt_u_bound, e, 5e-3);
    ASSERT_TRUE(rep.dxx_bound_singleton.has_value());
    EXPECT_NEAR(*rep.dxx_bound_singleton, e, 1e-3);
    EXPECT_NEAR(rep.holder_gamma_fit, 1.0, 0.05);
    EXPECT_EQ(rep.lip_by_row.size(), u.rows());
    for (std::size_t i = 1; i < rep.lip_by_row.size(); ++i) EXPECT_LE(rep.lip_by_row[i], rep.lip_by_row[i - 1]);

    EXPECT_FALSE(probe(u, TerminalProblem{}, 0.25, false).dxx_bound_singleton.has_value());
    EXPECT_THROW((void)probe(u, TerminalProblem{}, 0.5, true), ValidationError);
    EXPECT_THROW((void)probe(u, TerminalProblem{}, 1.0, true), ValidationError);
}

TEST(RegularitySuite, ConstantDataIsFlat) {
    const UncertaintySet set(1.5, {{1.0, 1.0}}, 0.5, 3.0);
    RegularityOptions opt;
    opt.nx = 201;
    const auto chk = regularity_suite(TerminalProblem::forward(psi::constant(2.0), 1.25), set, opt);
    EXPECT_TRUE(chk.passed());
    EXPECT_EQ(chk.base.lip_x, 0.0);
    EXPECT_EQ(chk.base.holder_t_half, 0.0);
    EXPECT_EQ(chk.base.dt_u_bound, 0.0);
    EXPECT_EQ(chk.base.dx_u_bound, 0.0);
}

TEST(RegularitySuite, LinearClipIsContractive) {
    const UncertaintySet set(1.5, {{1.0, 1.0}}, 0.5, 3.0);
    const auto chk = regularity_suite(TerminalProblem::forward(psi::linear_clip(2.0), 1.25), set);
    for (const auto& f : chk.failures) ADD_FAILURE() << f;
    EXPECT_LE(chk.base.lip_x, 1.05);
    EXPECT_GT(chk.base.lip_x, 0.9);
    EXPECT_GT(chk.holder_early, 0.0);
    EXPECT_LE(chk.holder_late, 1.5 * chk.holder_early);
    EXPECT_TRUE(std::isfinite(*chk.base.dxx_bound_singleton));
}

TEST(RegularitySuite, FailuresNameTheirField) {
    const UncertaintySet set(1.5, {{0.7, 0.7}, {1.2, 1.2}}, 0.5, 3.0);
    RegularityOptions opt;
    opt.nx = 201;
    opt.lip_tol = -0.5;        // demands Lip(u) <= Lip(psi) / 2
    opt.stability_tol = 0.0;   // demands bitwise agreement across resolutions
    const auto chk = regularity_suite(TerminalProblem::forward(psi::gaussian_bump(), 1.25), set, opt);
    EXPECT_FALSE(chk.passed());
    EXPECT_TRUE(mentions(chk.failures, "lip_x"));
    EXPECT_TRUE(mentions(chk.failures, "holder_t_half"));
    EXPECT_TRUE(mentions(chk.failures, "dt_u_bound"));
    EXPECT_TRUE(mentions(chk.failures, "dx_u_bound"));
    EXPECT_FALSE(mentions(chk.failures, "dxx_bound_singleton"));
    opt.nx = 4;
    EXPECT_THROW((void)regularity_suite(TerminalProblem::forward(psi::gaussian_bump(), 1.25), set, opt),
                 ValidationError);
}

TEST(RegularityReport, TextRecordListsEveryField) {
    RegularityReport r;
    r.lip_x = 0.5;
    r.holder_gamma_fit = 1.0 / 3.0;
    const std::string text = to_text(r);
    for (const char* key : {"lip_x = 0.5\n", "holder_t_half = 0\n", "dt_u_bound = 0\n", "dx_u_bound = 0\n",
                            "holder_gamma_fit = 0.33333333333333331\n", "dxx_bound_singleton = n/a\n"}) {
        EXPECT_NE(text.find(key), std::string::npos) << key;
    }
    r.dxx_bound_singleton = 2.0;
    EXPECT_NE(to_text(r).find("dxx_bound_singleton = 2\n"), std::string::npos);
}
