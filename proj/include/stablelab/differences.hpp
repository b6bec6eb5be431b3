#pragma once

// Centered finite differences on sampled rows and simple sup-norm scans of surfaces.

#include "stablelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>

namespace stablelab::fd {

// All stencils take a stride s (in nodes) so the same row can be probed at spacing s*dx.

inline double d1(std::span<const double> u, std::size_t j, double dx, std::size_t s = 1) {
    return (u[j + s] - u[j - s]) / (2.0 * s * dx);
}

inline double d2(std::span<const double> u, std::size_t j, double dx, std::size_t s = 1) {
    const double h = s * dx;
    return (u[j + s] - 2.0 * u[j] + u[j - s]) / (h * h);
}

inline double d3(std::span<const double> u, std::size_t j, double dx, std::size_t s = 1) {
    const double h = s * dx;
    return (u[j + 2 * s] - 2.0 * u[j + s] + 2.0 * u[j - s] - u[j - 2 * s]) / (2.0 * h * h * h);
}

inline double d4(std::span<const double> u, std::size_t j, double dx, std::size_t s = 1) {
    const double h = s * dx;
    return (u[j + 2 * s] - 4.0 * u[j + s] + 6.0 * u[j] - 4.0 * u[j - s] + u[j - 2 * s]) / (h * h * h * h);
}

/// Row indices of a surface whose times lie in [t_lo, t_hi].
inline std::pair<std::size_t, std::size_t> rows_in(const Surface& s, double t_lo, double t_hi) {
    const double dt = s.grid().dt;
    const double eps = 1e-9 * dt;
    const double a = std::ceil((t_lo - s.t0() - eps) / dt);
    const double b = std::floor((t_hi - s.t0() + eps) / dt);
    const double last = static_cast<double>(s.grid().nt);
    if (b < 0.0 || a > last || a > b) throw DomainError("rows_in: surface does not cover the time window");
    return {static_cast<std::size_t>(std::max(a, 0.0)), static_cast<std::size_t>(std::min(b, last))};
}

struct SupBounds {
    double v = 0.0;
    double vx = 0.0;
    double vxx = 0.0;
    [[nodiscard]] double max() const { return std::max({v, vx, vxx}); }
};

/// sup |v|, |v_x|, |v_xx| over rows in [t_lo, t_hi] and the middle half in x.
inline SupBounds sup_bounds(const Surface& s, double t_lo, double t_hi) {
    const Grid& g = s.grid();
    const auto [r0, r1] = rows_in(s, t_lo, t_hi);
    const auto [j0, j1] = g.middle_half();
    SupBounds b;
    for (std::size_t i = r0; i <= r1; ++i) {
        auto row = s.row(i);
        for (std::size_t j = j0; j <= j1; ++j) {
            b.v = std::max(b.v, std::abs(row[j]));
            b.vx = std::max(b.vx, std::abs(d1(row, j, g.dx)));
            b.vxx = std::max(b.vxx, std::abs(d2(row, j, g.dx)));
        }
    }
    return b;
}

}  // namespace stablelab::fd
