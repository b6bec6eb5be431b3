#pragma once

// Discrete nonlocal generator  L_k u(x) = int delta_z u(x) F_k(dz)  on a uniform grid.
//
// The integral is split at r_cut and z_max:
//   |z| <  r_cut          second-order Taylor term, centered second difference
//   r_cut <= |z| <= z_max  exact integration of the piecewise-linear interpolant of u
//                          against |z|^(-alpha-1) (hat-function weights)
//   |z| >  z_max          far-field values u(x_min), u(x_max) times the analytic tail mass
// The compensator -u'(x) z over |z| >= r_cut collapses into a single centered first
// difference. The second-difference coefficient is reduced by the interpolation excess
// on quadratics so that the whole operator integrates quadratics exactly on [r_cut, z_max].
// Every contribution is linear in (k-, k+), so the supremum over an uncertainty set only
// needs the four per-node components below.

#include "stablelab/grid.hpp"
#include "stablelab/kernel.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace stablelab {

struct GeneratorComponents {
    double minus = 0.0;   // unit-intensity left jumps
    double plus = 0.0;    // unit-intensity right jumps
    double second = 0.0;  // centered second difference
    double first = 0.0;   // centered first difference
};

namespace detail {

// int_lo^hi (a + b s) s^(-alpha-1) ds for 0 < lo < hi.
inline long double linear_power_integral(long double a, long double b, long double lo,
                                         long double hi, long double alpha) {
    const long double p0 = (std::pow(lo, -alpha) - std::pow(hi, -alpha)) / alpha;
    const long double p1 = (std::pow(lo, 1.0L - alpha) - std::pow(hi, 1.0L - alpha)) / (alpha - 1.0L);
    return a * p0 + b * p1;
}

// Hat-function weights w_m = int_{[lo_cut, hi_cut]} hat(s - m) s^(-alpha-1) ds for m >= 1,
// in units where the grid spacing is 1. Index 0 is unused.
inline std::vector<long double> hat_weights(long double alpha, long double lo_cut, long double hi_cut,
                                            std::size_t count) {
    std::vector<long double> w(count + 1, 0.0L);
    for (std::size_t m = 1; m <= count; ++m) {
        const auto mm = static_cast<long double>(m);
        long double acc = 0.0L;
        // rising half on [m-1, m]: hat = s - (m-1)
        long double lo = std::max(mm - 1.0L, lo_cut);
        long double hi = std::min(mm, hi_cut);
        if (hi > lo) acc += linear_power_integral(-(mm - 1.0L), 1.0L, lo, hi, alpha);
        // falling half on [m, m+1]: hat = (m+1) - s
        lo = std::max(mm, lo_cut);
        hi = std::min(mm + 1.0L, hi_cut);
        if (hi > lo) acc += linear_power_integral(mm + 1.0L, -1.0L, lo, hi, alpha);
        w[m] = acc;
    }
    return w;
}

}  // namespace detail

/// Precomputed weights of the discrete generator for one spatial grid and exponent.
class JumpStencil {
public:
    JumpStencil(const Grid& grid, double alpha) : grid_(grid), alpha_(alpha) {
        require_alpha(alpha);
        grid.validate();
        const long double a = alpha;
        const long double dx = grid.dx;
        const long double r = grid.r_cut;
        const long double zmax = grid.z_max;
        const long double lo = r / dx;
        const long double hi = zmax / dx;
        count_ = static_cast<std::size_t>(std::ceil(hi)) + 1;
        const long double scale = std::pow(dx, -a);
        auto w = detail::hat_weights(a, lo, hi, count_);

        weights_.assign(count_ + 1, 0.0);
        long double sum = 0.0L;
        long double second = 0.0L;
        for (std::size_t m = 1; m <= count_; ++m) {
            const long double wm = w[m] * scale;
            weights_[m] = static_cast<double>(wm);
            sum += wm;
            const long double zm = static_cast<long double>(m) * dx;
            second += wm * zm * zm;
        }
        far_tail_ = static_cast<double>(std::pow(zmax, -a) / a);

        // suffix[q] = sum_{m>=q} w_m + far tail, for q in [1, count+1]
        suffix_.assign(count_ + 2, 0.0);
        long double acc = far_tail_;
        suffix_[count_ + 1] = static_cast<double>(acc);
        for (std::size_t q = count_; q >= 1; --q) {
            acc += w[q] * scale;
            suffix_[q] = static_cast<double>(acc);
        }
        off_diagonal_total_ = static_cast<double>(sum + far_tail_);

        // interpolation excess of the hat quadrature on z^2 over [r, z_max]
        const long double exact_second = (std::pow(zmax, 2.0L - a) - std::pow(r, 2.0L - a)) / (2.0L - a);
        interp_excess_ = static_cast<double>(second - exact_second);
        second_unit_ = static_cast<double>(0.5L * (std::pow(r, 2.0L - a) / (2.0L - a)) -
                                           0.5L * (second - exact_second));
        drift_unit_ = static_cast<double>(std::pow(r, 1.0L - a) / (a - 1.0L));
    }

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] std::size_t reach() const noexcept { return count_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double far_tail() const noexcept { return far_tail_; }
    /// Per unit k- + k+: coefficient of the second difference before any viscosity.
    [[nodiscard]] double second_unit() const noexcept { return second_unit_; }
    /// Per unit k- - k+: coefficient of the centered first difference.
    [[nodiscard]] double drift_unit() const noexcept { return drift_unit_; }
    [[nodiscard]] double interpolation_excess() const noexcept { return interp_excess_; }

    [[nodiscard]] double second_coefficient(KernelPair k) const noexcept {
        return k.total() * second_unit_ + viscosity(k);
    }
    [[nodiscard]] double drift_coefficient(KernelPair k) const noexcept {
        return (k.k_minus - k.k_plus) * drift_unit_;
    }

    /// Minimal added diffusion keeping both nearest-neighbour coefficients nonnegative.
    [[nodiscard]] double viscosity(KernelPair k) const noexcept {
        const double dx = grid_.dx;
        const double c2 = k.total() * second_unit_ / (dx * dx);
        const double d = (k.k_minus - k.k_plus) * drift_unit_ / (2.0 * dx);
        const double right = k.k_plus * weights_[1] + c2 + d;
        const double left = k.k_minus * weights_[1] + c2 - d;
        const double worst = std::min(right, left);
        return worst < 0.0 ? -worst * dx * dx : 0.0;
    }

    /// Magnitude of the diagonal coefficient of L_k.
    [[nodiscard]] double diagonal(KernelPair k) const noexcept {
        const double dx = grid_.dx;
        return k.total() * off_diagonal_total_ + 2.0 * second_coefficient(k) / (dx * dx);
    }

    /// Largest explicit Euler step keeping the scheme monotone for every pair of the set.
    [[nodiscard]] double max_stable_dt(const UncertaintySet& set) const {
        double a = 0.0;
        for (const auto& k : set.pairs()) a = std::max(a, diagonal(k));
        return 1.0 / a;
    }

    /// Scheme stability constant c with dt * (k- + k+)_max * r_cut^-alpha * c <= 1.
    [[nodiscard]] double scheme_constant(const UncertaintySet& set) const {
        const double scale = set.max_total() * std::pow(grid_.r_cut, -alpha_);
        return 1.0 / (max_stable_dt(set) * scale);
    }

    /// Components at interior node j of a row.
    [[nodiscard]] GeneratorComponents components(std::span<const double> u, std::size_t j) const {
        const std::size_t n = u.size();
        const double uj = u[j];
        const double* w = weights_.data();
        GeneratorComponents c;

        // right jumps
        {
            const std::size_t q = n - 1 - j;
            const std::size_t len = std::min(q - 1, count_);
            const double* up = u.data() + j;
            double acc = 0.0;
#pragma omp simd reduction(+ : acc)
            for (std::size_t m = 1; m <= len; ++m) acc += w[m] * (up[m] - uj);
            c.plus = acc + suffix_[std::min(q, count_ + 1)] * (u[n - 1] - uj);
        }
        // left jumps
        {
            const std::size_t q = j;
            const std::size_t len = std::min(q - 1, count_);
            const double* up = u.data() + j;
            double acc = 0.0;
#pragma omp simd reduction(+ : acc)
            for (std::size_t m = 1; m <= len; ++m) acc += w[m] * (*(up - m) - uj);
            c.minus = acc + suffix_[std::min(q, count_ + 1)] * (u[0] - uj);
        }
        const double dx = grid_.dx;
        c.second = (u[j + 1] - 2.0 * uj + u[j - 1]) / (dx * dx);
        c.first = (u[j + 1] - u[j - 1]) / (2.0 * dx);
        return c;
    }

    [[nodiscard]] double combine(const GeneratorComponents& c, KernelPair k) const noexcept {
        return k.k_minus * c.minus + k.k_plus * c.plus + second_coefficient(k) * c.second +
               drift_coefficient(k) * c.first;
    }

    [[nodiscard]] double combine_sup(const GeneratorComponents& c, const UncertaintySet& set) const {
        const auto& pairs = set.pairs();
        double best = combine(c, pairs.front());
        for (std::size_t p = 1; p < pairs.size(); ++p) best = std::max(best, combine(c, pairs[p]));
        return best;
    }

private:
    Grid grid_;
    double alpha_;
    std::size_t count_ = 0;
    std::vector<double> weights_;
    std::vector<double> suffix_;
    double far_tail_ = 0.0;
    double off_diagonal_total_ = 0.0;
    double interp_excess_ = 0.0;
    double second_unit_ = 0.0;
    double drift_unit_ = 0.0;
};

namespace detail {
inline void check_generator_input(std::span<const double> u, const Grid& g, std::size_t j) {
    if (u.size() != g.nx) throw ValidationError("stable_kernel", "u_row", "row length != nx");
    if (j == 0 || j + 1 >= u.size()) {
        throw DomainError("apply_generator: node " + std::to_string(j) +
                          " is a boundary node; the caller supplies the boundary policy");
    }
    for (double v : u) {
        if (!std::isfinite(v)) throw DomainError("apply_generator: non-finite input value");
    }
}
}  // namespace detail

/// int delta_z u(x_j) F_k(dz) by the discrete scheme above.
inline double apply_generator(std::span<const double> u, const Grid& grid, KernelPair k,
                              double alpha, std::size_t j) {
    detail::check_generator_input(u, grid, j);
    JumpStencil stencil(grid, alpha);
    return stencil.combine(stencil.components(u, j), k);
}

/// sup over the set of apply_generator.
inline double apply_sup_generator(std::span<const double> u, const Grid& grid,
                                  const UncertaintySet& set, std::size_t j) {
    detail::check_generator_input(u, grid, j);
    JumpStencil stencil(grid, set.alpha());
    return stencil.combine_sup(stencil.components(u, j), set);
}

}  // namespace stablelab
