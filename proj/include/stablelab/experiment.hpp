#pragma once

// Experiment drivers behind the command-line tool. Each run validates the config, calls
// the library, writes CSV tables plus a summary.txt into the output directory, and
// reports whether the configured thresholds were met.

#include "stablelab/classical.hpp"
#include "stablelab/config.hpp"
#include "stablelab/csv.hpp"
#include "stablelab/hypothesis.hpp"
#include "stablelab/pide.hpp"
#include "stablelab/regularity.hpp"
#include "stablelab/sublinear.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace stablelab {

struct ExperimentOutcome {
    std::vector<std::string> failures;
    std::vector<std::filesystem::path> files;
    std::string summary;
    [[nodiscard]] bool passed() const noexcept { return failures.empty(); }
};

namespace detail {

class Summary {
public:
    void add(const std::string& key, double v) { text_ += key + " = " + io::format_double(v) + "\n"; }
    void add(const std::string& key, const std::string& v) { text_ += key + " = " + v + "\n"; }
    [[nodiscard]] const std::string& str() const noexcept { return text_; }

private:
    std::string text_;
};

inline Grid pide_grid(const ExperimentConfig& c, const UncertaintySet& set, double horizon) {
    return default_grid(set, horizon, c.grid.nx, c.grid.half_width, c.grid.safety);
}

// At most ~100 stored rows per surface CSV; the first and last rows are always included.
inline void write_surface(const Surface& s, const std::filesystem::path& path) {
    const Grid& g = s.grid();
    const std::size_t stride = std::max<std::size_t>(1, g.nt / 100);
    io::CsvTable t({"t", "x", "value"});
    for (std::size_t i = 0; i <= g.nt; ++i) {
        if (i % stride != 0 && i != g.nt) continue;
        auto row = s.row(i);
        for (std::size_t j = 0; j < g.nx; ++j) t.row() << s.time(i) << g.x(j) << row[j];
    }
    t.write(path);
}

inline void finish(ExperimentOutcome& out, Summary& sum, const std::filesystem::path& dir) {
    sum.add("status", out.passed() ? std::string("pass") : std::string("fail"));
    for (const auto& f : out.failures) sum.add("failure", f);
    out.summary = sum.str();
    const auto path = dir / "summary.txt";
    io::write_atomic(path, out.summary);
    out.files.push_back(path);
}

inline bool all_zero(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::abs(x) <= 1e-14; });
}

inline io::CsvTable residual_csv(const ResidualTable& r) {
    io::CsvTable t({"n", "residual", "rate_fit", "term1", "term2", "term3", "term4"});
    for (std::size_t i = 0; i < r.n_values.size(); ++i) {
        const auto& d = r.term_diagnostics[i];
        t.row() << r.n_values[i] << r.residuals[i] << r.fitted_rate << d[0] << d[1] << d[2] << d[3];
    }
    return t;
}

inline io::CsvTable floor_csv(const ResidualTable& r) {
    io::CsvTable t({"n", "residual", "floor", "used_in_fit"});
    for (std::size_t i = 0; i < r.n_values.size(); ++i) {
        t.row() << r.n_values[i] << r.residuals[i] << r.floors[i] << std::size_t{r.used[i] ? 1u : 0u};
    }
    return t;
}

}  // namespace detail

/// Forward and backward surfaces, max-principle and Lipschitz checks, and for singleton
/// sets the comparison of u(horizon, 0) with the Fourier oracle.
inline ExperimentOutcome run_solve(const ExperimentConfig& c, const std::filesystem::path& dir) {
    validate(c);
    const UncertaintySet set = c.uncertainty_set();
    const TestFunction f = c.test_function();
    ExperimentOutcome out;
    detail::Summary sum;

    const Grid g = detail::pide_grid(c, set, c.horizon);
    const Surface u = solve_forward(TerminalProblem::forward(f, c.horizon), g, set);
    const auto bw_prob = TerminalProblem::backward(f, c.h);
    const Surface v = solve_backward(bw_prob, detail::pide_grid(c, set, bw_prob.horizon), set);
    detail::write_surface(u, dir / "surface_forward.csv");
    detail::write_surface(v, dir / "surface_backward.csv");
    out.files.push_back(dir / "surface_forward.csv");
    out.files.push_back(dir / "surface_backward.csv");

    // max principle: every value stays inside [min psi, max psi] of the sampled data
    auto row0 = u.row(0);
    const auto [lo, hi] = std::minmax_element(row0.begin(), row0.end());
    double mp = 0.0;
    for (double x : u.values()) mp = std::max({mp, x - *hi, *lo - x});
    double lip = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) lip = std::max(lip, detail::row_lipschitz(u.row(i), g));

    sum.add("experiment", std::string("solve"));
    sum.add("psi", f.name);
    sum.add("nx", static_cast<double>(g.nx));
    sum.add("nt", static_cast<double>(g.nt));
    sum.add("dt", g.dt);
    sum.add("u_at_horizon_origin", evaluate(u, c.horizon, 0.0));
    sum.add("max_principle_residual", mp);
    sum.add("lip_x", lip);
    sum.add("lip_psi", f.lip);
    if (mp > 1e-12) out.failures.push_back("max principle residual " + io::format_double(mp));
    if (lip > f.lip * (1.0 + c.checks.lip_tol) + 1e-12) {
        out.failures.push_back("lip_x " + io::format_double(lip) + " exceeds Lip(psi) bound");
    }
    if (set.is_singleton()) {
        const CharExponent ce(set.pairs().front(), set.alpha());
        const double oracle = classical_expectation(f.f, ce, c.horizon, 0.0);
        const double diff = std::abs(evaluate(u, c.horizon, 0.0) - oracle);
        sum.add("oracle_value", oracle);
        sum.add("oracle_abs_difference", diff);
        if (diff > c.checks.oracle_tol) {
            out.failures.push_back("oracle difference " + io::format_double(diff) + " above tolerance");
        }
    }
    detail::finish(out, sum, dir);
    return out;
}

/// Convergence of E'[psi(B_n S_n)] to u(1, 0) over the configured n values.
inline ExperimentOutcome run_clt(const ExperimentConfig& c, const std::filesystem::path& dir) {
    validate(c);
    const UncertaintySet set = c.uncertainty_set();
    const TestFunction f = c.test_function();
    const LawFamily family = LawFamily::build(set, c.b_scale, c.z0);
    const Grid dp = Grid::make(-c.grid.dp_half_width, c.grid.dp_half_width, c.grid.dp_nx, 1.0, 1);
    const ConvergenceTable table =
        convergence_table(f.f, family, set, c.n_values, dp, detail::pide_grid(c, set, 1.0));

    ExperimentOutcome out;
    io::CsvTable csv({"n", "B_n", "nested_value", "pide_value", "abs_error"});
    std::vector<double> errors;
    for (const auto& r : table.rows) {
        csv.row() << r.n << r.B_n << r.nested_value << r.pide_value << r.abs_error;
        errors.push_back(r.abs_error);
    }
    csv.write(dir / "convergence.csv");
    out.files.push_back(dir / "convergence.csv");

    detail::Summary sum;
    sum.add("experiment", std::string("clt"));
    sum.add("psi", f.name);
    sum.add("fitted_rate", table.fitted_rate);
    const double first = errors.front();
    const double last = errors.back();
    sum.add("error_first", first);
    sum.add("error_last", last);
    if (!detail::all_zero(errors)) {
        if (last > c.checks.clt_max_error) {
            out.failures.push_back("error at n = " + std::to_string(c.n_values.back()) + " is " +
                                   io::format_double(last));
        }
        if (errors.size() > 1 && last * c.checks.clt_min_drop > first) {
            out.failures.push_back("error drop " + io::format_double(first / last) + " below " +
                                   io::format_double(c.checks.clt_min_drop));
        }
    }
    detail::finish(out, sum, dir);
    return out;
}

/// Increment-condition residual table and the self-attraction check.
inline ExperimentOutcome run_hypothesis(const ExperimentConfig& c, const std::filesystem::path& dir) {
    validate(c);
    const UncertaintySet set = c.uncertainty_set();
    const TestFunction f = c.test_function();
    const LawFamily family = LawFamily::build(set, c.b_scale, c.z0);
    const Grid spatial = Grid::make(-c.grid.half_width, c.grid.half_width, c.grid.nx, 1.0, 1);
    const Surface v = backward_surface(f.f, c.h, spatial, set, c.grid.safety);
    const ResidualTable cond = check_condition_iii(family, set, v, c.n_values);
    const ResidualTable ex41 = example_41_check(v, c.n_values);

    ExperimentOutcome out;
    detail::residual_csv(cond).write(dir / "condition_iii.csv");
    detail::floor_csv(cond).write(dir / "condition_iii_floor.csv");
    detail::residual_csv(ex41).write(dir / "self_attraction.csv");
    for (const char* name : {"condition_iii.csv", "condition_iii_floor.csv", "self_attraction.csv"}) {
        out.files.push_back(dir / name);
    }

    const double target = 1.0 - 2.0 / set.alpha();
    detail::Summary sum;
    sum.add("experiment", std::string("hypothesis"));
    sum.add("psi", f.name);
    sum.add("condition_iii_rate", cond.fitted_rate);
    sum.add("condition_iii_rate_target", target);
    sum.add("self_attraction_rate", ex41.fitted_rate);
    sum.add("self_attraction_t_restricted", ex41.t_range_restricted ? std::string("yes") : std::string("no"));

    if (!detail::all_zero(cond.residuals)) {
        if (!(std::abs(cond.fitted_rate - target) <= c.checks.rate_tol)) {
            out.failures.push_back("increment residual rate " + io::format_double(cond.fitted_rate) +
                                   " outside tolerance of " + io::format_double(target));
        }
        const double drop = cond.residuals.front() / cond.residuals.back();
        sum.add("condition_iii_drop", drop);
        if (!(drop >= c.checks.residual_min_drop)) {
            out.failures.push_back("increment residual drop " + io::format_double(drop) + " below " +
                                   io::format_double(c.checks.residual_min_drop));
        }
    }
    if (!detail::all_zero(ex41.residuals)) {
        if (!(ex41.fitted_rate < 0.0)) out.failures.push_back("self-attraction rate not negative");
        for (std::size_t i = 1; i < ex41.residuals.size(); ++i) {
            if (!(ex41.residuals[i] < ex41.residuals[i - 1])) {
                out.failures.push_back("self-attraction residual not decreasing at n = " +
                                       std::to_string(ex41.n_values[i]));
                break;
            }
        }
    }
    detail::finish(out, sum, dir);
    return out;
}

/// Regularity suite on the forward surface over [0, 1+h].
inline ExperimentOutcome run_regularity(const ExperimentConfig& c, const std::filesystem::path& dir) {
    validate(c);
    const UncertaintySet set = c.uncertainty_set();
    const TestFunction f = c.test_function();
    RegularityOptions opt;
    opt.h = c.h;
    opt.nx = c.grid.nx;
    opt.half_width = c.grid.half_width;
    opt.safety = c.grid.safety;
    opt.stability_tol = c.checks.stability_tol;
    opt.lip_tol = c.checks.lip_tol;
    const RegularityCheck chk = regularity_suite(TerminalProblem::forward(f, 1.0 + c.h), set, opt);

    ExperimentOutcome out;
    std::string text = "[base]\n" + to_text(chk.base) + "[fine_time]\n" + to_text(chk.fine_time) +
                       "[fine_space]\n" + to_text(chk.fine_space);
    io::write_atomic(dir / "regularity.txt", text);
    out.files.push_back(dir / "regularity.txt");

    io::CsvTable rows({"row", "lip_x"});
    for (std::size_t i = 0; i < chk.base.lip_by_row.size(); ++i) rows.row() << i << chk.base.lip_by_row[i];
    rows.write(dir / "lip_by_row.csv");
    out.files.push_back(dir / "lip_by_row.csv");

    detail::Summary sum;
    sum.add("experiment", std::string("regularity"));
    sum.add("psi", f.name);
    sum.add("holder_t_half_early", chk.holder_early);
    sum.add("holder_t_half_late", chk.holder_late);
    out.failures = chk.failures;
    detail::finish(out, sum, dir);
    return out;
}

}  // namespace stablelab
