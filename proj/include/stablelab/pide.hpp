#pragma once

// Explicit monotone time marching for
//   forward:   d_t u = sup_k int delta_z u F_k(dz),   u(0, .) = psi
//   backward:  d_t v + sup_k int delta_z v F_k(dz) = 0,  v(T, .) = psi
// Boundary nodes stay pinned to psi (constant far field).

#include "stablelab/generator.hpp"
#include "stablelab/grid.hpp"
#include "stablelab/kernel.hpp"
#include "stablelab/psi.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace stablelab {

enum class Direction { forward, backward };

struct TerminalProblem {
    std::function<double(double)> psi;
    double lip_psi = 0.0;
    double sup_psi = 0.0;
    /// Forward: final time. Backward: terminal time T = 1 + h of v(T, .) = psi.
    double horizon = 1.0;
    Direction direction = Direction::forward;
    double h_pad = 0.25;

    static TerminalProblem forward(const TestFunction& f, double horizon) {
        return {f.f, f.lip, f.sup, horizon, Direction::forward, 0.0};
    }
    static TerminalProblem backward(const TestFunction& f, double h) {
        if (!(h > 0.0 && h < 1.0)) throw ValidationError("pide_solver", "h_pad", "need 0 < h < 1");
        return {f.f, f.lip, f.sup, 1.0 + h, Direction::backward, h};
    }
};

/// Time-step count giving dt = safety * (largest monotone step) over the horizon.
inline std::size_t stable_step_count(const Grid& spatial, const UncertaintySet& set, double horizon,
                                     double safety = 0.5) {
    JumpStencil stencil(spatial, set.alpha());
    const double dt_max = safety * stencil.max_stable_dt(set);
    return static_cast<std::size_t>(std::ceil(horizon / dt_max - 1e-12));
}

/// Default lattice: x in [-half_width, half_width] with nx nodes, CFL step with the safety factor.
inline Grid default_grid(const UncertaintySet& set, double horizon, std::size_t nx = 801,
                         double half_width = 20.0, double safety = 0.5) {
    Grid spatial = Grid::make(-half_width, half_width, nx, horizon, 1);
    return spatial.with_time(horizon, stable_step_count(spatial, set, horizon, safety));
}

/// Marches the forward equation from an initial row. Row 0 of the result is `initial`.
inline Surface march(std::span<const double> initial, const Grid& grid, const UncertaintySet& set,
                     double t0 = 0.0) {
    if (initial.size() != grid.nx) {
        throw ValidationError("pide_solver", "initial", "row length != nx");
    }
    JumpStencil stencil(grid, set.alpha());
    const double dt_max = stencil.max_stable_dt(set);
    if (grid.dt > dt_max * (1.0 + 1e-12)) throw CflError(dt_max, grid.dt);

    Surface s(grid, t0);
    std::copy(initial.begin(), initial.end(), s.row(0).begin());
    const std::size_t n = grid.nx;
    for (std::size_t i = 0; i < grid.nt; ++i) {
        std::span<const double> u = s.row(i);
        std::span<double> next = s.row(i + 1);
        next[0] = u[0];
        next[n - 1] = u[n - 1];
        for (std::size_t j = 1; j + 1 < n; ++j) {
            next[j] = u[j] + grid.dt * stencil.combine_sup(stencil.components(u, j), set);
        }
    }
    return s;
}

inline std::vector<double> sample(const std::function<double(double)>& f, const Grid& grid) {
    std::vector<double> out(grid.nx);
    for (std::size_t j = 0; j < grid.nx; ++j) out[j] = f(grid.x(j));
    return out;
}

namespace detail {
inline void check_max_principle(const Surface& s) {
    double sup0 = 0.0;
    for (double v : s.row(0)) sup0 = std::max(sup0, std::abs(v));
    const double tol = 1e-10 * std::max(1.0, sup0);
    for (double v : s.values()) {
        if (!std::isfinite(v)) throw NumericalError("solver produced a non-finite value");
        if (std::abs(v) > sup0 + tol) {
            throw NumericalError("maximum principle violated", std::abs(v) - sup0);
        }
    }
}
}  // namespace detail

inline Surface solve_forward(const TerminalProblem& prob, const Grid& grid, const UncertaintySet& set) {
    if (grid.t_max + 1e-12 < prob.horizon) {
        throw ValidationError("pide_solver", "t_max", "grid horizon shorter than the problem horizon");
    }
    auto initial = sample(prob.psi, grid);
    Surface s = march(initial, grid, set, 0.0);
    detail::check_max_principle(s);
    return s;
}

/// v(t, x) = u(T - t, x) for t in [T - grid.t_max, T], marched in decreasing t.
inline Surface solve_backward(const TerminalProblem& prob, const Grid& grid, const UncertaintySet& set) {
    auto terminal = sample(prob.psi, grid);
    Surface u = march(terminal, grid, set, 0.0);
    detail::check_max_principle(u);
    Surface v(grid, prob.horizon - grid.t_max);
    for (std::size_t i = 0; i <= grid.nt; ++i) {
        auto src = u.row(grid.nt - i);
        std::copy(src.begin(), src.end(), v.row(i).begin());
    }
    return v;
}

/// Row of a surface at time t, linearly interpolated between stored rows.
inline std::vector<double> row_at(const Surface& s, double t) {
    const Grid& g = s.grid();
    std::vector<double> out(g.nx);
    const std::size_t exact = s.row_index(t);
    if (exact != Surface::npos) {
        auto r = s.row(exact);
        std::copy(r.begin(), r.end(), out.begin());
        return out;
    }
    for (std::size_t j = 0; j < g.nx; ++j) out[j] = evaluate(s, t, g.x(j));
    return out;
}

/// |u_psi(beta t, 0) - u_{psi(beta^{1/alpha} .)}(t, 0)|.
inline double scaling_check(const std::function<double(double)>& psi, double beta, double t,
                            const Grid& grid, const UncertaintySet& set) {
    if (!(beta > 0.0)) throw ValidationError("pide_solver", "beta", "must be positive");
    if (std::max(beta * t, t) > grid.t_max + 1e-12) {
        throw ValidationError("pide_solver", "t", "beta t and t must lie within the horizon");
    }
    const double c = std::pow(beta, 1.0 / set.alpha());
    Surface a = march(sample(psi, grid), grid, set);
    Surface b = march(sample([&](double x) { return psi(c * x); }, grid), grid, set);
    return std::abs(evaluate(a, beta * t, 0.0) - evaluate(b, t, 0.0));
}

/// max_x |u(t, x) - w(s, x)| where w solves the forward equation started from u(t - s, .).
inline double dpp_check(const std::function<double(double)>& psi, double s, double t,
                        const Grid& grid, const UncertaintySet& set) {
    if (!(s > 0.0 && s <= t && t <= grid.t_max + 1e-12)) {
        throw ValidationError("pide_solver", "s", "need 0 < s <= t <= horizon");
    }
    Surface u = march(sample(psi, grid), grid, set);
    auto start = row_at(u, t - s);
    const auto steps = static_cast<std::size_t>(std::ceil(s / grid.dt - 1e-9));
    Surface w = march(start, grid.with_time(s, std::max<std::size_t>(steps, 1)), set);
    auto target = row_at(u, t);
    auto end = w.row(w.rows() - 1);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.nx; ++j) worst = std::max(worst, std::abs(target[j] - end[j]));
    return worst;
}

}  // namespace stablelab
