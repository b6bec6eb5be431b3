#pragma once

// Uniform space-time lattice and solution surfaces stored on it.

#include "stablelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stablelab {

struct Grid {
    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t nx = 801;
    double dx = 0.05;
    double t_max = 1.0;
    std::size_t nt = 1;
    double dt = 1.0;
    double r_cut = 0.05;  // small-jump radius
    double z_max = 160.0; // far-field truncation radius

    /// Builds a grid and fills the derived fields. r_cut <= 0 selects dx,
    /// z_max <= 0 selects 4 (x_max - x_min).
    static Grid make(double x_min, double x_max, std::size_t nx, double t_max, std::size_t nt,
                     double r_cut = 0.0, double z_max = 0.0) {
        Grid g;
        g.x_min = x_min;
        g.x_max = x_max;
        g.nx = nx;
        g.t_max = t_max;
        g.nt = nt;
        if (nx < 3) throw ValidationError("grid", "nx", "need at least 3 nodes");
        if (!(x_max > x_min)) throw ValidationError("grid", "x_max", "need x_max > x_min");
        if (nt < 1) throw ValidationError("grid", "nt", "need at least one time step");
        if (!(t_max > 0.0)) throw ValidationError("grid", "t_max", "horizon must be positive");
        g.dx = (x_max - x_min) / static_cast<double>(nx - 1);
        g.dt = t_max / static_cast<double>(nt);
        g.r_cut = r_cut > 0.0 ? r_cut : g.dx;
        g.z_max = z_max > 0.0 ? z_max : 4.0 * (x_max - x_min);
        g.validate();
        return g;
    }

    void validate() const {
        if (!(r_cut > 0.0 && r_cut < 1.0)) {
            throw ValidationError("grid", "r_cut", "need 0 < r_cut < 1");
        }
        if (!(z_max > 1.0)) throw ValidationError("grid", "z_max", "need z_max > 1");
        if (!(dx > 0.0) || !(dt > 0.0)) throw ValidationError("grid", "dx", "non-positive spacing");
    }

    /// Same spatial lattice, different time discretization.
    [[nodiscard]] Grid with_time(double t_max_new, std::size_t nt_new) const {
        return make(x_min, x_max, nx, t_max_new, nt_new, r_cut, z_max);
    }

    [[nodiscard]] double x(std::size_t j) const noexcept {
        return x_min + static_cast<double>(j) * dx;
    }
    [[nodiscard]] double width() const noexcept { return x_max - x_min; }

    /// Node range [lo, hi] covering the middle half of the spatial domain.
    [[nodiscard]] std::pair<std::size_t, std::size_t> middle_half() const noexcept {
        const double a = x_min + 0.25 * width();
        const double b = x_max - 0.25 * width();
        auto lo = static_cast<std::size_t>(std::ceil((a - x_min) / dx - 1e-9));
        auto hi = static_cast<std::size_t>(std::floor((b - x_min) / dx + 1e-9));
        return {lo, std::min(hi, nx - 1)};
    }
};

/// Solution field on a grid. Row i holds time t0 + i*dt.
class Surface {
public:
    Surface(Grid grid, double t0)
        : grid_(grid), t0_(t0), values_((grid.nt + 1) * grid.nx, 0.0) {}

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double t_end() const noexcept { return t0_ + grid_.t_max; }
    [[nodiscard]] std::size_t rows() const noexcept { return grid_.nt + 1; }
    [[nodiscard]] double time(std::size_t i) const noexcept {
        return t0_ + static_cast<double>(i) * grid_.dt;
    }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * grid_.nx, grid_.nx};
    }
    [[nodiscard]] std::span<double> row(std::size_t i) {
        return {values_.data() + i * grid_.nx, grid_.nx};
    }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values_[i * grid_.nx + j]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    /// Index of the row at time t if t sits on a row (within 1e-9 dt), else npos.
    [[nodiscard]] std::size_t row_index(double t) const noexcept {
        const double s = (t - t0_) / grid_.dt;
        const double r = std::round(s);
        if (std::abs(s - r) > 1e-9 || r < 0.0 || r > static_cast<double>(grid_.nt)) return npos;
        return static_cast<std::size_t>(r);
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    Grid grid_;
    double t0_;
    std::vector<double> values_;
};

/// Linear interpolation of a sampled row at x; constant extension outside the grid.
inline double interpolate_row(std::span<const double> row, const Grid& g, double x) {
    if (x <= g.x_min) return row.front();
    if (x >= g.x_max) return row.back();
    const double s = (x - g.x_min) / g.dx;
    auto j = static_cast<std::size_t>(s);
    if (j >= g.nx - 1) return row.back();
    const double w = s - static_cast<double>(j);
    if (w == 0.0) return row[j];
    return (1.0 - w) * row[j] + w * row[j + 1];
}

/// Bilinear interpolation; exact at nodes. Throws outside the surface rectangle.
inline double evaluate(const Surface& s, double t, double x) {
    const Grid& g = s.grid();
    const double eps_t = 1e-12 * std::max(1.0, std::abs(s.t_end()));
    const double eps_x = 1e-12 * std::max(1.0, std::max(std::abs(g.x_min), std::abs(g.x_max)));
    if (t < s.t0() - eps_t || t > s.t_end() + eps_t || x < g.x_min - eps_x || x > g.x_max + eps_x) {
        throw DomainError("evaluate: point (" + std::to_string(t) + ", " + std::to_string(x) +
                          ") outside the surface rectangle");
    }
    double ti = std::clamp((t - s.t0()) / g.dt, 0.0, static_cast<double>(g.nt));
    auto i = static_cast<std::size_t>(ti);
    if (i >= g.nt) i = g.nt - 1;
    const double wt = ti - static_cast<double>(i);
    const double xc = std::clamp(x, g.x_min, g.x_max);
    const double lo = interpolate_row(s.row(i), g, xc);
    if (wt == 0.0) return lo;
    const double hi = interpolate_row(s.row(i + 1), g, xc);
    if (wt == 1.0) return hi;
    return (1.0 - wt) * lo + wt * hi;
}

}  // namespace stablelab
