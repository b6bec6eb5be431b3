#pragma once

// Finite-difference measurements of the regularity of u on solver output: the spatial
// Lipschitz constant, the 1/2-Hoelder constant in time, bounds on du/dt, du/dx and
// (singleton sets) d2u/dx2 on [h, h+1], and a fitted Hoelder exponent of du/dt in x.
// Every scan runs over the middle half of the spatial grid.

#include "stablelab/differences.hpp"
#include "stablelab/errors.hpp"
#include "stablelab/grid.hpp"
#include "stablelab/kernel.hpp"
#include "stablelab/pide.hpp"
#include "stablelab/sublinear.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace stablelab {

struct RegularityReport {
    double lip_x = 0.0;
    double holder_t_half = 0.0;
    double dt_u_bound = 0.0;
    double dx_u_bound = 0.0;
    double holder_gamma_fit = 0.0;
    /// Only measured for singleton uncertainty sets.
    std::optional<double> dxx_bound_singleton;
    /// Spatial Lipschitz constant per stored row; used for the monotonicity check.
    std::vector<double> lip_by_row;
};

namespace detail {

inline double row_lipschitz(std::span<const double> row, const Grid& g) {
    const auto [j0, j1] = g.middle_half();
    double m = 0.0;
    for (std::size_t j = j0; j < j1; ++j) m = std::max(m, std::abs(row[j + 1] - row[j]) / g.dx);
    return m;
}

// Time lags (in rows) at dyadic physical scales 2^-m, m = 1, 2, ..., no finer than one step.
inline std::vector<std::size_t> dyadic_lags(double dt, double window) {
    std::vector<std::size_t> lags;
    for (double tau = 0.5; tau >= dt * 0.999; tau *= 0.5) {
        if (tau > window) continue;
        const auto k = static_cast<std::size_t>(std::llround(tau / dt));
        if (k >= 1 && (lags.empty() || lags.back() != k)) lags.push_back(k);
    }
    return lags;
}

}  // namespace detail

/// max over dyadic lags tau and rows t, t + tau in [t_lo, t_hi] of |u(t+tau) - u(t)| / sqrt(tau).
inline double holder_half_constant(const Surface& s, double t_lo, double t_hi) {
    const Grid& g = s.grid();
    const auto [r0, r1] = fd::rows_in(s, t_lo, t_hi);
    const auto [j0, j1] = g.middle_half();
    double best = 0.0;
    for (std::size_t k : detail::dyadic_lags(g.dt, t_hi - t_lo)) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(k) * g.dt);
        for (std::size_t i = r0; i + k <= r1; ++i) {
            auto a = s.row(i);
            auto b = s.row(i + k);
            for (std::size_t j = j0; j <= j1; ++j) best = std::max(best, std::abs(b[j] - a[j]) * scale);
        }
    }
    return best;
}

/// Probe a forward surface u that covers [h, h+1].
inline RegularityReport probe(const Surface& u, const TerminalProblem& /*prob*/, double h, bool singleton) {
    if (!(h > 0.0 && h < 1.0)) throw ValidationError("regularity_probe", "h", "need 0 < h < 1");
    if (u.t0() > h + 1e-12 || u.t_end() < h + 1.0 - 1e-12) {
        throw ValidationError("regularity_probe", "surface", "does not cover [h, h+1]");
    }
    const Grid& g = u.grid();
    const auto [j0, j1] = g.middle_half();
    RegularityReport rep;

    rep.lip_by_row.reserve(u.rows());
    for (std::size_t i = 0; i < u.rows(); ++i) {
        rep.lip_by_row.push_back(detail::row_lipschitz(u.row(i), g));
        rep.lip_x = std::max(rep.lip_x, rep.lip_by_row.back());
    }
    rep.holder_t_half = holder_half_constant(u, h, h + 1.0);

    const auto [r0, r1] = fd::rows_in(u, h, h + 1.0);
    const std::size_t last = std::min(r1, u.rows() - 2);  // forward difference needs row i+1
    const auto bounds = fd::sup_bounds(u, h, h + 1.0);
    rep.dx_u_bound = bounds.vx;
    if (singleton) rep.dxx_bound_singleton = bounds.vxx;

    // du/dt by forward differences; its spatial oscillation at dyadic scales gives the exponent
    std::vector<std::size_t> shifts;
    for (std::size_t m = 1; m <= (j1 - j0) / 8; m *= 2) shifts.push_back(m);
    std::vector<double> osc(shifts.size(), 0.0);
    std::vector<double> ut(g.nx);
    for (std::size_t i = r0; i <= last; ++i) {
        auto a = u.row(i);
        auto b = u.row(i + 1);
        for (std::size_t j = j0; j <= j1; ++j) {
            ut[j] = (b[j] - a[j]) / g.dt;
            rep.dt_u_bound = std::max(rep.dt_u_bound, std::abs(ut[j]));
        }
        for (std::size_t q = 0; q < shifts.size(); ++q) {
            for (std::size_t j = j0; j + shifts[q] <= j1; ++j) {
                osc[q] = std::max(osc[q], std::abs(ut[j + shifts[q]] - ut[j]));
            }
        }
    }
    std::vector<double> xs, ys;
    for (std::size_t q = 0; q < shifts.size(); ++q) {
        if (osc[q] > 0.0) {
            xs.push_back(static_cast<double>(shifts[q]) * g.dx);
            ys.push_back(osc[q]);
        }
    }
    rep.holder_gamma_fit = xs.size() >= 2 ? std::clamp(loglog_slope(xs, ys), 0.0, 1.0) : 0.0;
    return rep;
}

struct RegularityOptions {
    double h = 0.25;
    std::size_t nx = 801;
    double half_width = 20.0;
    double safety = 0.5;
    double stability_tol = 0.20;
    double lip_tol = 0.05;
    /// Values below this are treated as zero in the relative comparisons.
    double zero_floor = 1e-12;
};

struct RegularityCheck {
    RegularityReport base;
    RegularityReport fine_time;   // half the time step
    RegularityReport fine_space;  // half the spatial step
    /// 1/2-Hoelder constant on [1, 1+h] and on [h, 1] at base resolution.
    double holder_late = 0.0;
    double holder_early = 0.0;
    std::vector<std::string> failures;
    [[nodiscard]] bool passed() const noexcept { return failures.empty(); }
};

namespace detail {
inline bool within(double a, double b, double tol, double floor) {
    if (std::abs(a) <= floor && std::abs(b) <= floor) return true;
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline Surface regularity_surface(const TerminalProblem& prob, const UncertaintySet& set, double h,
                                  std::size_t nx, double half_width, double safety) {
    const double horizon = h + 1.0;
    const Grid spatial = Grid::make(-half_width, half_width, nx, horizon, 1);
    const Grid g = spatial.with_time(horizon, stable_step_count(spatial, set, horizon, safety));
    TerminalProblem fwd = prob;
    fwd.direction = Direction::forward;
    fwd.horizon = horizon;
    return solve_forward(fwd, g, set);
}
}  // namespace detail

/// Probe at base resolution, at half the time step and at half the spatial step, then apply
/// the pass criteria. Each failure names the offending field.
inline RegularityCheck regularity_suite(const TerminalProblem& prob, const UncertaintySet& set,
                                        const RegularityOptions& opt = {}) {
    if (opt.nx < 9) throw ValidationError("regularity_probe", "nx", "need at least 9 nodes");
    const bool single = set.is_singleton();
    RegularityCheck out;
    const Surface u = detail::regularity_surface(prob, set, opt.h, opt.nx, opt.half_width, opt.safety);
    out.base = probe(u, prob, opt.h, single);
    out.holder_early = holder_half_constant(u, opt.h, 1.0);
    out.holder_late = holder_half_constant(u, 1.0, 1.0 + opt.h);
    out.fine_time = probe(detail::regularity_surface(prob, set, opt.h, opt.nx, opt.half_width, opt.safety / 2),
                          prob, opt.h, single);
    out.fine_space = probe(detail::regularity_surface(prob, set, opt.h, 2 * opt.nx - 1, opt.half_width,
                                                      opt.safety),
                           prob, opt.h, single);

    auto fail = [&](const std::string& field, const std::string& what) { out.failures.push_back(field + ": " + what); };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    const RegularityReport& b = out.base;
    for (const auto* r : {&out.base, &out.fine_time, &out.fine_space}) {
        for (double v : {r->lip_x, r->holder_t_half, r->dt_u_bound, r->dx_u_bound, r->holder_gamma_fit}) {
            if (!std::isfinite(v) || v < 0.0) {
                fail("report", "non-finite or negative field");
                break;
            }
        }
    }
    if (b.lip_x > prob.lip_psi * (1.0 + opt.lip_tol) + opt.zero_floor) {
        fail("lip_x", fmt(b.lip_x) + " exceeds Lip(psi) (1 + tol) = " + fmt(prob.lip_psi * (1.0 + opt.lip_tol)));
    }
    for (std::size_t i = 1; i < b.lip_by_row.size(); ++i) {
        if (b.lip_by_row[i] > b.lip_by_row[i - 1] * (1.0 + opt.lip_tol) + opt.zero_floor) {
            fail("lip_x", "increases between rows " + std::to_string(i - 1) + " and " + std::to_string(i));
            break;
        }
    }
    if (out.holder_late > 1.5 * out.holder_early + opt.zero_floor) {
        fail("holder_t_half", "constant on [1, 1+h] " + fmt(out.holder_late) + " exceeds 1.5x the value on [h, 1] " +
                                  fmt(out.holder_early));
    }
    if (!detail::within(b.holder_t_half, out.fine_time.holder_t_half, opt.stability_tol, opt.zero_floor)) {
        fail("holder_t_half", "unstable across time resolutions: " + fmt(b.holder_t_half) + " vs " +
                                  fmt(out.fine_time.holder_t_half));
    }
    if (!detail::within(b.dt_u_bound, out.fine_space.dt_u_bound, opt.stability_tol, opt.zero_floor)) {
        fail("dt_u_bound", "unstable across grid resolutions: " + fmt(b.dt_u_bound) + " vs " +
                               fmt(out.fine_space.dt_u_bound));
    }
    if (!detail::within(b.dx_u_bound, out.fine_space.dx_u_bound, opt.stability_tol, opt.zero_floor)) {
        fail("dx_u_bound", "unstable across grid resolutions: " + fmt(b.dx_u_bound) + " vs " +
                               fmt(out.fine_space.dx_u_bound));
    }
    if (single) {
        const double c = *b.dxx_bound_singleton;
        const double f = *out.fine_space.dxx_bound_singleton;
        if (!std::isfinite(c) || !std::isfinite(f)) {
            fail("dxx_bound_singleton", "not finite");
        } else if (!detail::within(c, f, opt.stability_tol, opt.zero_floor)) {
            fail("dxx_bound_singleton", "unstable across grid resolutions: " + fmt(c) + " vs " + fmt(f));
        }
    }
    return out;
}

/// Structured text record, one `field = value` line per report field.
inline std::string to_text(const RegularityReport& r) {
    std::string out;
    char buf[96];
    auto line = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
        out += buf;
    };
    line("lip_x", r.lip_x);
    line("holder_t_half", r.holder_t_half);
    line("dt_u_bound", r.dt_u_bound);
    line("dx_u_bound", r.dx_u_bound);
    line("holder_gamma_fit", r.holder_gamma_fit);
    if (r.dxx_bound_singleton) {
        line("dxx_bound_singleton", *r.dxx_bound_singleton);
    } else {
        out += "dxx_bound_singleton = n/a\n";
    }
    return out;
}

}  // namespace stablelab
