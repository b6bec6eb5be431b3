#pragma once

// Sublinear expectation E'[phi] = max over a finite family of classical laws, and the
// nested dynamic program for E'[psi(B_n S_n)] under sublinear i.i.d. structure:
//
//   w_0 = psi,   w_{m+1}(x) = max_law int w_m(x + B_n y) dF_law(y),   result w_n(0).
//
// w_m lives on a uniform grid and is extended linearly between nodes and by constants
// outside. The integral against the law of B_n Y is then exact: each node picks up the
// integral of its hat function against that law, and the two edge nodes additionally
// collect the mass that leaves the grid. Updates are written in difference form so that
// constants are fixed points up to the last bit.

#include "stablelab/attracted.hpp"
#include "stablelab/errors.hpp"
#include "stablelab/generator.hpp"
#include "stablelab/grid.hpp"
#include "stablelab/kernel.hpp"
#include "stablelab/pide.hpp"
#include "stablelab/quadrature.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace stablelab {

class LawFamily {
public:
    LawFamily(std::vector<AttractedLaw> laws, UncertaintySet source)
        : laws_(std::move(laws)), source_(std::move(source)) {
        if (laws_.empty()) throw ValidationError("sublinear_engine", "laws", "family is empty");
        if (laws_.size() != source_.pairs().size()) {
            throw ValidationError("sublinear_engine", "laws", "need exactly one law per kernel pair");
        }
        const auto& first = laws_.front();
        for (std::size_t i = 0; i < laws_.size(); ++i) {
            const auto& law = laws_[i];
            if (law.alpha() != source_.alpha() || law.b_scale() != first.b_scale() ||
                law.z0() != first.z0()) {
                throw ValidationError("sublinear_engine", "laws", "laws must share alpha, b and z0");
            }
            if (!(law.pair() == source_.pairs()[i])) {
                throw ValidationError("sublinear_engine", "laws", "law order must follow the set's pairs");
            }
        }
    }

    /// One law per pair of the set.
    static LawFamily build(const UncertaintySet& set, double b_scale, double z0) {
        std::vector<AttractedLaw> laws;
        laws.reserve(set.pairs().size());
        for (const auto& k : set.pairs()) laws.push_back(build_law(k, set.alpha(), b_scale, z0));
        return LawFamily(std::move(laws), set);
    }

    [[nodiscard]] const std::vector<AttractedLaw>& laws() const noexcept { return laws_; }
    [[nodiscard]] const UncertaintySet& source() const noexcept { return source_; }
    [[nodiscard]] double alpha() const noexcept { return source_.alpha(); }
    [[nodiscard]] double b_scale() const noexcept { return laws_.front().b_scale(); }
    [[nodiscard]] double z0() const noexcept { return laws_.front().z0(); }

private:
    std::vector<AttractedLaw> laws_;
    UncertaintySet source_;
};

struct NormalizedSumSpec {
    std::size_t n = 1;
    double b_scale = 1.0;

    /// B_n = 1 / (b n^(1/alpha)).
    [[nodiscard]] double B_n(double alpha) const {
        if (n < 1) throw ValidationError("sublinear_engine", "n", "need n >= 1");
        if (!(b_scale > 0.0)) throw ValidationError("sublinear_engine", "b_scale", "must be positive");
        return 1.0 / (b_scale * std::pow(static_cast<double>(n), 1.0 / alpha));
    }
};

inline double sup_expectation(const Integrand& phi, const LawFamily& family) {
    double best = law_expectation(phi, family.laws().front());
    for (std::size_t i = 1; i < family.laws().size(); ++i) {
        best = std::max(best, law_expectation(phi, family.laws()[i]));
    }
    return best;
}

inline double sup_expectation(const std::function<double(double)>& phi, const LawFamily& family) {
    return sup_expectation(Integrand{phi, 0.0, false}, family);
}

/// Hat-function weights of the law of B_n Y on a lattice of spacing dx.
/// rise[m], fall[m]: integrals of the rising and falling halves of the hat at offset m
/// (m >= 1) against the law on the positive side; *_left the mirror images.
/// beyond[m] = P(B_n Y > m dx), beyond_left[m] = P(B_n Y < -m dx).
struct JumpWeights {
    std::vector<double> rise, fall, beyond;
    std::vector<double> rise_left, fall_left, beyond_left;
};

namespace detail {

// int_{lo}^{hi} (c0 + c1 y) p(y) dy on one half-line, lo >= 0, with side selecting y or -y.
inline double linear_against_law(const AttractedLaw& law, bool right, double c0, double c1, double lo,
                                 double hi) {
    if (hi <= lo) return 0.0;
    const double z0 = law.z0();
    const double sg = right ? 1.0 : -1.0;
    double acc = 0.0;
    // interior part on [lo, min(hi, z0)]
    const double ih = std::min(hi, z0);
    if (ih > lo) {
        acc += quad::gauss<20>([&](double s) { return (c0 + c1 * s) * law.interior_density(sg * s); },
                               lo, ih);
    }
    // tail part on [max(lo, z0), hi]
    const double tl = std::max(lo, z0);
    if (hi > tl) {
        const long double w = law.tail_weight(right);
        if (std::isinf(hi)) {
            if (c1 != 0.0) throw DomainError("linear_against_law: unbounded first moment request");
            acc += static_cast<double>(w * std::pow(static_cast<long double>(tl), -static_cast<long double>(law.alpha())) /
                                       law.alpha());
        } else {
            acc += static_cast<double>(w * linear_power_integral(c0, c1, tl, hi, law.alpha()));
        }
    }
    return acc;
}

}  // namespace detail

inline JumpWeights jump_weights(const AttractedLaw& law, double B_n, double dx, std::size_t count) {
    JumpWeights jw;
    const double h = dx / B_n;  // lattice spacing in units of y
    auto fill = [&](bool right, std::vector<double>& rise, std::vector<double>& fall,
                    std::vector<double>& beyond) {
        rise.assign(count + 1, 0.0);
        fall.assign(count + 1, 0.0);
        beyond.assign(count + 1, 0.0);
        for (std::size_t m = 1; m <= count; ++m) {
            const double md = static_cast<double>(m);
            // rising half: hat = y/h - (m-1) on [(m-1)h, m h]
            rise[m] = detail::linear_against_law(law, right, -(md - 1.0), 1.0 / h, (md - 1.0) * h, md * h);
            // falling half: hat = (m+1) - y/h on [m h, (m+1) h]
            fall[m] = detail::linear_against_law(law, right, md + 1.0, -1.0 / h, md * h, (md + 1.0) * h);
            beyond[m] = right ? law.survival(md * h) : law.cdf(-md * h);
        }
    };
    fill(true, jw.rise, jw.fall, jw.beyond);
    fill(false, jw.rise_left, jw.fall_left, jw.beyond_left);
    return jw;
}

/// One law's contribution  int w(x_j + B_n y) dF(y) - w(x_j)  at node j.
class NestedStep {
public:
    NestedStep(const AttractedLaw& law, double B_n, const Grid& grid)
        : n_(grid.nx), w_(jump_weights(law, B_n, grid.dx, grid.nx)) {
        hat_.assign(n_ + 1, 0.0);
        hat_left_.assign(n_ + 1, 0.0);
        for (std::size_t m = 1; m <= n_; ++m) {
            hat_[m] = w_.rise[m] + w_.fall[m];
            hat_left_[m] = w_.rise_left[m] + w_.fall_left[m];
        }
    }

    [[nodiscard]] double increment(std::span<const double> u, std::size_t j) const {
        const double uj = u[j];
        double acc = 0.0;
        const std::size_t q = n_ - 1 - j;  // nodes to the right
        if (q > 0) {
            const double* up = u.data() + j;
            const double* h = hat_.data();
            double s = 0.0;
#pragma omp simd reduction(+ : s)
            for (std::size_t m = 1; m < q; ++m) s += h[m] * (up[m] - uj);
            acc += s + (w_.rise[q] + w_.beyond[q]) * (u[n_ - 1] - uj);
        }
        if (j > 0) {
            const double* up = u.data() + j;
            const double* h = hat_left_.data();
            double s = 0.0;
#pragma omp simd reduction(+ : s)
            for (std::size_t m = 1; m < j; ++m) s += h[m] * (*(up - m) - uj);
            acc += s + (w_.rise_left[j] + w_.beyond_left[j]) * (u[0] - uj);
        }
        return acc;
    }

    /// Probability that a jump from node j leaves [x_min, x_max].
    [[nodiscard]] double escape(std::size_t j) const {
        const std::size_t q = n_ - 1 - j;
        double e = 0.0;
        if (q > 0) e += w_.beyond[q];
        if (j > 0) e += w_.beyond_left[j];
        return e;
    }

    [[nodiscard]] const JumpWeights& weights() const noexcept { return w_; }

private:
    std::size_t n_;
    JumpWeights w_;
    std::vector<double> hat_;
    std::vector<double> hat_left_;
};

namespace detail {
/// sup |psi(x) - psi(edge)| over x beyond either edge, sampled out to 1e6 times the width.
inline double far_oscillation(const std::function<double(double)>& psi, const Grid& g) {
    double osc = 0.0;
    const double lo = psi(g.x_min);
    const double hi = psi(g.x_max);
    for (int k = 0; k <= 80; ++k) {
        const double d = g.width() * (std::pow(2.0, 0.25 * k) - 1.0);
        osc = std::max(osc, std::abs(psi(g.x_max + d) - hi));
        osc = std::max(osc, std::abs(psi(g.x_min - d) - lo));
    }
    return osc;
}
}  // namespace detail

struct NestedResult {
    double value = 0.0;
    /// Accumulated escaping mass at middle-half nodes times the far-field oscillation of psi.
    double boundary_influence = 0.0;
    std::vector<double> final_row;
};

struct NestedOptions {
    double reach_threshold = 1e-4;
    bool check_reach = true;
};

/// Full result of the nested recursion; value = w_n(0).
inline NestedResult nested_sum(const std::function<double(double)>& psi, const LawFamily& family,
                               const NormalizedSumSpec& spec, const Grid& grid,
                               const NestedOptions& opts = {}) {
    grid.validate();
    if (!(grid.x_min < 0.0 && grid.x_max > 0.0)) {
        throw ValidationError("sublinear_engine", "grid", "grid must contain x = 0");
    }
    const double bn = spec.B_n(family.alpha());
    if (spec.b_scale != family.b_scale()) {
        throw ValidationError("sublinear_engine", "b_scale", "spec and family disagree on b");
    }
    std::vector<NestedStep> steps;
    steps.reserve(family.laws().size());
    for (const auto& law : family.laws()) steps.emplace_back(law, bn, grid);

    std::vector<double> w = sample(psi, grid);
    std::vector<double> next(grid.nx);
    const std::size_t L = steps.size();

    const auto [mid_lo, mid_hi] = grid.middle_half();
    double escape = 0.0;
    for (std::size_t j = mid_lo; j <= mid_hi; ++j) {
        for (const auto& s : steps) escape = std::max(escape, s.escape(j));
    }
    const double osc = detail::far_oscillation(psi, grid);
    const double influence = static_cast<double>(spec.n) * escape * osc;
    if (opts.check_reach && influence > opts.reach_threshold) {
        throw GridTooNarrowError("nested_sum_expectation: boundary influence " + std::to_string(influence) +
                                     " on the middle half exceeds " + std::to_string(opts.reach_threshold) +
                                     "; widen the grid to half-width " + std::to_string(grid.width()),
                                 influence, grid.width());
    }

    for (std::size_t m = 0; m < spec.n; ++m) {
        for (std::size_t j = 0; j < grid.nx; ++j) {
            double best = steps[0].increment(w, j);
            for (std::size_t l = 1; l < L; ++l) best = std::max(best, steps[l].increment(w, j));
            next[j] = w[j] + best;
        }
        w.swap(next);
    }
    NestedResult out;
    out.value = interpolate_row(w, grid, 0.0);
    out.boundary_influence = influence;
    out.final_row = std::move(w);
    return out;
}

inline double nested_sum_expectation(const std::function<double(double)>& psi, const LawFamily& family,
                                     const NormalizedSumSpec& spec, const Grid& grid,
                                     const NestedOptions& opts = {}) {
    return nested_sum(psi, family, spec, grid, opts).value;
}

namespace detail {
inline void require_matching(const LawFamily& family, const UncertaintySet& set) {
    if (family.alpha() != set.alpha()) {
        throw ValidationError("sublinear_engine", "alpha", "family and set disagree on alpha");
    }
    if (family.source().pairs() != set.pairs()) {
        throw ValidationError("sublinear_engine", "pairs", "family and set must use the same pairs");
    }
}
}  // namespace detail

/// |E'[psi(B_n S_n)] - u(1, 0)|.
inline double clt_error(const std::function<double(double)>& psi, const LawFamily& family,
                        const UncertaintySet& set, const NormalizedSumSpec& spec, const Grid& dp_grid,
                        const Grid& pide_grid) {
    detail::require_matching(family, set);
    const Surface u = solve_forward(TerminalProblem{psi, 0.0, 0.0, 1.0, Direction::forward, 0.0},
                                    pide_grid, set);
    return std::abs(nested_sum_expectation(psi, family, spec, dp_grid) - evaluate(u, 1.0, 0.0));
}

struct ConvergenceRow {
    std::size_t n = 0;
    double B_n = 0.0;
    double nested_value = 0.0;
    double pide_value = 0.0;
    double abs_error = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double fitted_rate = 0.0;  // least-squares slope of log abs_error against log n
};

/// Least-squares slope of log y against log x over the points with y > 0.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++k;
    }
    if (k < 2) return std::nan("");
    const double kk = static_cast<double>(k);
    const double den = kk * sxx - sx * sx;
    return den == 0.0 ? std::nan("") : (kk * sxy - sx * sy) / den;
}

inline ConvergenceTable convergence_table(const std::function<double(double)>& psi, const LawFamily& family,
                                          const UncertaintySet& set, std::span<const std::size_t> n_values,
                                          const Grid& dp_grid, const Grid& pide_grid) {
    detail::require_matching(family, set);
    const Surface u = solve_forward(TerminalProblem{psi, 0.0, 0.0, 1.0, Direction::forward, 0.0},
                                    pide_grid, set);
    const double target = evaluate(u, 1.0, 0.0);
    ConvergenceTable table;
    std::vector<double> xs, ys;
    for (std::size_t n : n_values) {
        NormalizedSumSpec spec{n, family.b_scale()};
        ConvergenceRow row;
        row.n = n;
        row.B_n = spec.B_n(family.alpha());
        row.nested_value = nested_sum_expectation(psi, family, spec, dp_grid);
        row.pide_value = target;
        row.abs_error = std::abs(row.nested_value - target);
        table.rows.push_back(row);
        xs.push_back(static_cast<double>(n));
        ys.push_back(row.abs_error);
    }
    table.fitted_rate = loglog_slope(xs, ys);
    return table;
}

}  // namespace stablelab
