#pragma once

// Diagnostics for the increment condition of the generalized CLT:
//
//   r_n = sup_{t in [0,1], x} n | E'[delta_{B_n Y} v(t,x)] - (1/n) sup_k int delta_z v F_k(dz) |
//
// with v the backward solution. Every law of the family has exactly the tails of its
// kernel beyond B_n z0 after rescaling, so for each law
//
//   n E[delta_{B_n Y} v] = L_k v + sum_{m>=2} v^(m)/m! ( n B_n^m mu_m - c_m R^(m-alpha)/(m-alpha) )
//
// where R = B_n z0, mu_m are the interior moments of the law and c_m = k+ + (-1)^m k-.
// The series is truncated after m = 4 and the derivatives come from centered differences.

#include "stablelab/attracted.hpp"
#include "stablelab/differences.hpp"
#include "stablelab/errors.hpp"
#include "stablelab/generator.hpp"
#include "stablelab/grid.hpp"
#include "stablelab/pide.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/sublinear.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace stablelab {

struct ResidualTable {
    std::vector<std::size_t> n_values;
    std::vector<double> residuals;
    /// Discretization floor per n (resolution study); 0 where not computed.
    std::vector<double> floors;
    /// Whether the point entered the rate fit (residual above 3x the floor).
    std::vector<bool> used;
    double fitted_rate = 0.0;
    /// The four classical bound groups per n (maximum over the laws of the family).
    std::vector<std::array<double, 4>> term_diagnostics;
    /// Self-attraction check only: the time window had to be shortened to stay on the surface.
    bool t_range_restricted = false;
};

namespace detail {
inline double clamped_value(const Surface& v, double t, double x) {
    const Grid& g = v.grid();
    return evaluate(v, t, std::clamp(x, g.x_min, g.x_max));
}

inline void fit_rate(ResidualTable& table) {
    std::vector<double> xs, ys;
    table.used.assign(table.n_values.size(), false);
    for (std::size_t i = 0; i < table.n_values.size(); ++i) {
        const bool keep = table.residuals[i] > 3.0 * table.floors[i] && table.residuals[i] > 0.0;
        table.used[i] = keep;
        if (keep) {
            xs.push_back(static_cast<double>(table.n_values[i]));
            ys.push_back(table.residuals[i]);
        }
    }
    table.fitted_rate = loglog_slope(xs, ys);
}

inline void require_increasing(std::span<const std::size_t> n_values) {
    if (n_values.empty()) throw ValidationError("hypothesis_checker", "n_values", "empty list");
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] < 1) throw ValidationError("hypothesis_checker", "n_values", "need n >= 1");
        if (i > 0 && n_values[i] <= n_values[i - 1]) {
            throw ValidationError("hypothesis_checker", "n_values", "must be strictly increasing");
        }
    }
}
}  // namespace detail

/// v(t, x+y) - v(t, x) - v_x(t, x) y with v_x by a centered difference of width 2 dx;
/// constant extension beyond the spatial grid.
inline double delta_increment(const Surface& v, double t, double x, double y) {
    if (y == 0.0) return 0.0;
    const double dx = v.grid().dx;
    const double vx = (detail::clamped_value(v, t, x + dx) - detail::clamped_value(v, t, x - dx)) / (2.0 * dx);
    return detail::clamped_value(v, t, x + y) - detail::clamped_value(v, t, x) - vx * y;
}

/// Backward solution on [-h, 1+h] with terminal data psi at 1+h.
inline Surface backward_surface(const std::function<double(double)>& psi, double h, const Grid& spatial,
                                const UncertaintySet& set, double safety = 0.5) {
    if (!(h > 0.0 && h < 1.0)) throw ValidationError("hypothesis_checker", "h", "need 0 < h < 1");
    const double span = 1.0 + 2.0 * h;
    const Grid g = spatial.with_time(span, stable_step_count(spatial, set, span, safety));
    TerminalProblem prob{psi, 0.0, 0.0, 1.0 + h, Direction::backward, h};
    return solve_backward(prob, g, set);
}

namespace detail {

// Per-node data shared by every n: generator components and derivatives 2..4.
struct NodeSample {
    GeneratorComponents c;
    std::array<double, 3> dk{};  // v'', v''', v''''
};

inline std::vector<NodeSample> sample_nodes(const Surface& v, const JumpStencil& stencil, std::size_t r0,
                                            std::size_t r1, std::size_t stride) {
    const Grid& g = v.grid();
    const auto [j0, j1] = g.middle_half();
    std::vector<NodeSample> out;
    std::vector<double> row;
    for (std::size_t i = r0; i <= r1; ++i) {
        auto full = v.row(i);
        if (stride == 1) {
            row.assign(full.begin(), full.end());
        } else {
            row.clear();
            for (std::size_t j = 0; j < full.size(); j += stride) row.push_back(full[j]);
        }
        const double dx = stencil.grid().dx;
        const std::size_t lo = (j0 + stride - 1) / stride;
        const std::size_t hi = j1 / stride;
        for (std::size_t j = lo; j <= hi; ++j) {
            NodeSample s;
            s.c = stencil.components(row, j);
            s.dk = {fd::d2(row, j, dx), fd::d3(row, j, dx), fd::d4(row, j, dx)};
            out.push_back(s);
        }
    }
    return out;
}

// Coefficients of v'', v''', v'''' in n E[delta] - L_k v for one law.
inline std::array<double, 3> moment_coefficients(const AttractedLaw& law, double n, double bn) {
    const double a = law.alpha();
    const double R = bn * law.z0();
    const KernelPair k = law.pair();
    std::array<double, 3> out{};
    double fact = 1.0;
    for (int m = 2; m <= 4; ++m) {
        fact *= m;
        const double cm = k.k_plus + ((m % 2 == 0) ? k.k_minus : -k.k_minus);
        const double law_part = n * std::pow(bn, m) * law.interior_moment(m);
        const double kernel_part = cm * std::pow(R, m - a) / (m - a);
        out[static_cast<std::size_t>(m - 2)] = (law_part - kernel_part) / fact;
    }
    return out;
}

inline double residual_sup(const std::vector<NodeSample>& nodes, const LawFamily& family,
                           const JumpStencil& stencil, double n) {
    const double bn = NormalizedSumSpec{static_cast<std::size_t>(n), family.b_scale()}.B_n(family.alpha());
    std::vector<std::array<double, 3>> coef;
    for (const auto& law : family.laws()) coef.push_back(moment_coefficients(law, n, bn));
    const auto& pairs = family.source().pairs();
    double worst = 0.0;
    for (const auto& s : nodes) {
        double best_law = -std::numeric_limits<double>::infinity();
        double best_kernel = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < pairs.size(); ++l) {
            const double lk = stencil.combine(s.c, pairs[l]);
            const double d = coef[l][0] * s.dk[0] + coef[l][1] * s.dk[1] + coef[l][2] * s.dk[2];
            best_law = std::max(best_law, lk + d);
            best_kernel = std::max(best_kernel, lk);
        }
        worst = std::max(worst, std::abs(best_law - best_kernel));
    }
    return worst;
}

}  // namespace detail

/// The four bound groups for one law, both half-lines, scaled by 1/b^alpha so that they
/// bound pieces of the residual r_n itself. M1 bounds |v|, |v_x|, |v_xx| on [0,1] x middle half.
struct TermBounds {
    std::array<double, 4> groups{};
    double M1 = 0.0;
};

inline TermBounds classical_term_bounds(const AttractedLaw& law, const Surface& v, std::size_t n) {
    const double a = law.alpha();
    const double b = law.b_scale();
    const double bn = NormalizedSumSpec{n, b}.B_n(a);
    if (bn > 1.0) {
        throw ValidationError("hypothesis_checker", "n", "bounds assume B_n <= 1; increase n or b");
    }
    TermBounds out;
    out.M1 = fd::sup_bounds(v, 0.0, 1.0).max();
    const double M1 = out.M1;
    const auto rq = rate_quantities(law, static_cast<double>(n));
    const auto uq = uniformity_quantities(law);
    const double scale = 1.0 / (std::pow(b, 2.0 - a) * std::pow(static_cast<double>(n), 2.0 / a - 1.0));
    const double ba = std::pow(b, a);
    for (int side = 0; side < 2; ++side) {
        const double at_inv = rq[3 * side + 0];
        const double far = rq[3 * side + 1];
        const double near = rq[3 * side + 2];
        const auto beta_one = beta_functions(law, side == 1 ? 1.0 : -1.0);
        const double beta_at_one = std::abs(side == 1 ? beta_one.second : beta_one.first);
        out.groups[0] += 3.0 * M1 * at_inv + 2.0 * M1 * far;
        out.groups[1] += M1 * scale * uq.values[3 * side + 2];
        out.groups[2] += M1 * a * near;
        out.groups[3] += 3.0 * M1 * at_inv + M1 * beta_at_one * scale + 2.0 * a * M1 * near;
    }
    for (double& gval : out.groups) gval /= ba;
    return out;
}

/// Direct quadrature of the four split pieces of the residual at (t, x):
/// |int_region delta_z v K(z) dz| / b^alpha summed over both half-lines, where the regions
/// are z >= 1, z <= B_n, and B_n <= z <= 1 split into the beta and beta' kernels.
inline std::array<double, 4> classical_term_pieces(const AttractedLaw& law, const Surface& v, std::size_t n,
                                                   double t, double x) {
    const double a = law.alpha();
    const double b = law.b_scale();
    const double bn = NormalizedSumSpec{n, b}.B_n(a);
    const Grid& g = v.grid();
    const double dx = g.dx;
    // derivatives at (t, x) for the small-jump Taylor form
    auto val = [&](double xx) { return detail::clamped_value(v, t, xx); };
    const double vxx = (val(x + dx) - 2.0 * val(x) + val(x - dx)) / (dx * dx);
    const double vxxx = (val(x + 2 * dx) - 2.0 * val(x + dx) + 2.0 * val(x - dx) - val(x - 2 * dx)) /
                        (2.0 * dx * dx * dx);
    auto delta = [&](double z) {
        if (std::abs(z) < 4.0 * dx) return 0.5 * vxx * z * z + vxxx * z * z * z / 6.0;
        return delta_increment(v, t, x, z);
    };
    const double edge = bn * law.z0();  // kernel vanishes beyond B_n z0
    std::array<double, 4> out{};
    for (int side = 0; side < 2; ++side) {
        const double sg = side == 1 ? 1.0 : -1.0;
        auto full = [&](double s) {
            const double y = s / bn;
            return delta(sg * s) * beta_kernel(law, sg * y) / std::pow(s, a + 1.0);
        };
        auto beta_part = [&](double s) {
            const double y = s / bn;
            if (y >= law.z0()) return 0.0;
            auto bb = beta_functions(law, sg * y);
            const double beta = side == 1 ? bb.second : bb.first;
            return delta(sg * s) * a * beta / std::pow(s, a + 1.0);
        };
        auto deriv_part = [&](double s) { return full(s) - beta_part(s); };
        auto integrate = [&](auto&& f, double lo, double hi) {
            hi = std::min(hi, edge);
            if (hi <= lo) return 0.0;
            double acc = 0.0;
            // split at the small-jump switch and at the grid-scale kinks of the interpolant
            double cur = lo;
            const double sw = 4.0 * dx;
            if (cur < sw && sw < hi) {
                acc += quad::tanh_sinh(f, cur, sw, 1e-10).value;
                cur = sw;
            }
            acc += quad::adaptive(f, cur, hi, 1e-10, 15).value;
            return acc;
        };
        out[0] += std::abs(integrate(full, 1.0, std::numeric_limits<double>::infinity()));
        out[1] += std::abs(integrate(full, 0.0, bn));
        out[2] += std::abs(integrate(beta_part, bn, 1.0));
        out[3] += std::abs(integrate(deriv_part, bn, 1.0));
    }
    const double ba = std::pow(b, a);
    for (double& p : out) p /= ba;
    return out;
}

struct ConditionOptions {
    /// Compute the discretization floor on the grid coarsened by two.
    bool with_floor = true;
    bool with_terms = true;
};

/// Increment-condition residuals from a given backward surface covering [0, 1].
inline ResidualTable check_condition_iii(const LawFamily& family, const UncertaintySet& set, const Surface& v,
                                         std::span<const std::size_t> n_values,
                                         const ConditionOptions& opts = {}) {
    detail::require_increasing(n_values);
    detail::require_matching(family, set);
    if (v.t0() > 1e-12 || v.t_end() < 1.0 - 1e-12) {
        throw ValidationError("hypothesis_checker", "v", "surface does not cover [0, 1]");
    }
    const auto [r0, r1] = fd::rows_in(v, 0.0, 1.0);
    const Grid& g = v.grid();
    const JumpStencil fine(g, set.alpha());
    const auto nodes = detail::sample_nodes(v, fine, r0, r1, 1);
    std::vector<detail::NodeSample> coarse_nodes;
    std::optional<JumpStencil> coarse;
    if (opts.with_floor) {
        const Grid cg = Grid::make(g.x_min, g.x_max, (g.nx - 1) / 2 + 1, g.t_max, g.nt, 2.0 * g.dx, g.z_max);
        coarse.emplace(cg, set.alpha());
        coarse_nodes = detail::sample_nodes(v, *coarse, r0, r1, 2);
    }

    ResidualTable table;
    table.n_values.assign(n_values.begin(), n_values.end());
    for (std::size_t n : n_values) {
        const double nn = static_cast<double>(n);
        const double r = detail::residual_sup(nodes, family, fine, nn);
        double floor = 0.0;
        if (opts.with_floor) floor = std::abs(r - detail::residual_sup(coarse_nodes, family, *coarse, nn));
        table.residuals.push_back(r);
        table.floors.push_back(floor);
        std::array<double, 4> terms{};
        if (opts.with_terms) {
            for (const auto& law : family.laws()) {
                const auto tb = classical_term_bounds(law, v, n);
                for (std::size_t q = 0; q < 4; ++q) terms[q] = std::max(terms[q], tb.groups[q]);
            }
        }
        table.term_diagnostics.push_back(terms);
    }
    detail::fit_rate(table);
    return table;
}

/// Solves the backward equation on [-h, 1+h] and checks the increment condition on it.
inline ResidualTable check_condition_iii(const LawFamily& family, const UncertaintySet& set,
                                         const std::function<double(double)>& psi, double h,
                                         std::span<const std::size_t> n_values, const Grid& spatial,
                                         const ConditionOptions& opts = {}) {
    const Surface v = backward_surface(psi, h, spatial, set);
    return check_condition_iii(family, set, v, n_values, opts);
}

/// Self-attraction of the limit: n |v(t - 1/n, x) - v(t, x) + v_t(t, x)/n| over t in [0, 1] and the middle half,
/// with v_t the forward one-sided difference of the stored rows. The floor is the
/// one-sided differencing error itself, max |v(t+dt) - 2v(t) + v(t-dt)| / (2 dt).
inline ResidualTable example_41_check(const Surface& v, std::span<const std::size_t> n_values) {
    detail::require_increasing(n_values);
    const Grid& g = v.grid();
    if (v.t0() > 1e-12 || v.t_end() < 1.0 + g.dt - 1e-12) {
        throw ValidationError("hypothesis_checker", "v", "surface does not cover [0, 1] plus one step");
    }
    const auto [j0, j1] = g.middle_half();
    ResidualTable table;
    table.n_values.assign(n_values.begin(), n_values.end());
    for (std::size_t n : n_values) {
        const double s = 1.0 / static_cast<double>(n);
        double t_lo = 0.0;
        if (t_lo - s < v.t0() - 1e-12) {
            t_lo = v.t0() + s;
            table.t_range_restricted = true;
        }
        const double t_hi = std::min(1.0, v.t_end() - g.dt);
        const auto [r0, r1] = fd::rows_in(v, t_lo, t_hi);
        double worst = 0.0;
        double floor = 0.0;
        std::vector<double> back(g.nx);
        for (std::size_t i = std::max<std::size_t>(r0, 1); i <= r1; ++i) {
            const double t = v.time(i);
            back = row_at(v, t - s);
            auto now = v.row(i);
            auto ahead = v.row(i + 1);
            auto behind = v.row(i - 1);
            for (std::size_t j = j0; j <= j1; ++j) {
                const double vt = (ahead[j] - now[j]) / g.dt;
                worst = std::max(worst, std::abs((back[j] - now[j]) / s + vt));
                floor = std::max(floor, std::abs(ahead[j] - 2.0 * now[j] + behind[j]) / (2.0 * g.dt));
            }
        }
        table.residuals.push_back(worst);
        table.floors.push_back(floor);
        table.term_diagnostics.push_back({});
    }
    detail::fit_rate(table);
    return table;
}

inline ResidualTable example_41_check(const UncertaintySet& set, const std::function<double(double)>& psi,
                                      double h, std::span<const std::size_t> n_values, const Grid& spatial) {
    const Surface v = backward_surface(psi, h, spatial, set);
    return example_41_check(v, n_values);
}

}  // namespace stablelab
