#pragma once

// Classical ground truth for a single kernel pair: the characteristic exponent of X_1,
// the density of X_t by Fourier inversion, and E[psi(x + X_t)].
//
//   log phi(w) = |w|^alpha ( (k- + k+) C + i sign(w) (k+ - k-) S )
//   C = int_0^inf (cos s - 1) s^(-alpha-1) ds,   S = int_0^inf (sin s - s) s^(-alpha-1) ds
//
// C and S are computed once per exponent: a Taylor series on [0, 1], Gauss-Legendre
// panels over whole periods on [1, A], and the asymptotic expansion beyond A.

#include "stablelab/errors.hpp"
#include "stablelab/grid.hpp"
#include "stablelab/kernel.hpp"
#include "stablelab/quadrature.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace stablelab {

class CharExponent {
public:
    CharExponent(KernelPair k, double alpha, double tol = 1e-11) : pair_(k), alpha_(alpha) {
        require_alpha(alpha, "classical_oracle");
        compute_unit_integrals(tol);
    }

    [[nodiscard]] KernelPair pair() const noexcept { return pair_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double cos_integral() const noexcept { return cos_int_; }
    [[nodiscard]] double sin_integral() const noexcept { return sin_int_; }
    [[nodiscard]] double error_estimate() const noexcept { return error_; }

    /// Re log phi(w) = decay() |w|^alpha, decay() < 0.
    [[nodiscard]] double decay() const noexcept { return pair_.total() * cos_int_; }
    /// Im log phi(w) = sign(w) skew() |w|^alpha.
    [[nodiscard]] double skew() const noexcept { return pair_.skew() * sin_int_; }

    [[nodiscard]] std::complex<double> operator()(double w) const noexcept {
        if (w == 0.0) return {0.0, 0.0};
        const double p = std::pow(std::abs(w), alpha_);
        return {decay() * p, (w > 0.0 ? 1.0 : -1.0) * skew() * p};
    }

private:
    void compute_unit_integrals(double tol) {
        const double a = alpha_;
        // [0, 1]: termwise integration of the Taylor series
        double c_near = 0.0;
        double s_near = 0.0;
        double fact_even = 1.0;  // (2k)!
        double fact_odd = 1.0;   // (2k+1)!
        for (int k = 1; k <= 20; ++k) {
            fact_even *= (2.0 * k - 1.0) * (2.0 * k);
            fact_odd *= (2.0 * k) * (2.0 * k + 1.0);
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            c_near += sign / (fact_even * (2.0 * k - a));
            s_near += sign / (fact_odd * (2.0 * k + 1.0 - a));
        }
        // [1, A] with A = 2 pi N, in whole periods after the first panel
        constexpr int periods = 400;
        const double two_pi = 2.0 * std::numbers::pi;
        auto fc = [a](double s) { return std::cos(s) * std::pow(s, -a - 1.0); };
        auto fs = [a](double s) { return std::sin(s) * std::pow(s, -a - 1.0); };
        double c_far = 0.0;
        double s_far = 0.0;
        double err = 0.0;
        auto panel = [&](double lo, double hi) {
            const double c30 = quad::gauss<30>(fc, lo, hi);
            const double s30 = quad::gauss<30>(fs, lo, hi);
            const double c20 = quad::gauss<20>(fc, lo, hi);
            const double s20 = quad::gauss<20>(fs, lo, hi);
            c_far += c30;
            s_far += s30;
            err += std::abs(c30 - c20) + std::abs(s30 - s20);
        };
        panel(1.0, two_pi);
        for (int j = 1; j < periods; ++j) panel(two_pi * j, two_pi * (j + 1));
        // beyond A: asymptotic expansion (sin A = 0, cos A = 1)
        const double A = two_pi * periods;
        const double p = a + 1.0;
        c_far += p * std::pow(A, -p - 1.0) - p * (p + 1.0) * (p + 2.0) * std::pow(A, -p - 3.0);
        s_far += std::pow(A, -p) - p * (p + 1.0) * std::pow(A, -p - 2.0);
        err += p * (p + 1.0) * (p + 2.0) * (p + 3.0) * std::pow(A, -p - 4.0);

        // non-oscillatory parts on [1, inf): -int s^(-a-1) and -int s^(-a)
        cos_int_ = c_near + c_far - 1.0 / a;
        sin_int_ = s_near + s_far - 1.0 / (a - 1.0);
        error_ = err;
        if (!(err <= tol) || !std::isfinite(cos_int_) || !std::isfinite(sin_int_)) {
            throw NumericalError("char_exponent: quadrature did not reach tolerance, error estimate " +
                                     std::to_string(err),
                                 err);
        }
    }

    KernelPair pair_;
    double alpha_;
    double cos_int_ = 0.0;
    double sin_int_ = 0.0;
    double error_ = 0.0;
};

/// log phi_{X_1}(w).
inline std::complex<double> char_exponent(const CharExponent& ce, double w) { return ce(w); }

namespace detail {
/// Frequency beyond which |phi_t| < 1e-13.
inline double frequency_cutoff(const CharExponent& ce, double t) {
    return std::pow(30.0 / (t * std::abs(ce.decay())), 1.0 / ce.alpha());
}

/// int_0^cutoff f over panels no wider than half a period of exp(i w x). The first
/// panel carries the w^(alpha-1) cusp and goes to tanh-sinh; the rest use fixed
/// Gauss-Legendre with a lower-order companion rule as the error estimate.
template <class F>
double paneled_integral(F&& f, double cutoff, double x, const char* what) {
    const double width = std::min(cutoff / 16.0, std::numbers::pi / std::max(std::abs(x), 1e-3));
    const auto panels = static_cast<std::size_t>(std::ceil(cutoff / width));
    const double h = cutoff / static_cast<double>(panels);
    const auto first = quad::tanh_sinh(f, 0.0, h, 1e-13);
    double sum = first.value;
    double err = first.error;
    for (std::size_t p = 1; p < panels; ++p) {
        const double lo = h * static_cast<double>(p);
        const double hi = p + 1 == panels ? cutoff : lo + h;
        const double fine = quad::gauss<20>(f, lo, hi);
        const double coarse = quad::gauss<10>(f, lo, hi);
        sum += fine;
        err += std::abs(fine - coarse);
    }
    if (!std::isfinite(sum) || err > 1e-8) {
        throw NumericalError(std::string(what) + ": quadrature did not reach tolerance, error estimate " +
                                 std::to_string(err),
                             err);
    }
    return sum;
}
}  // namespace detail

/// Density of X_t at a single point by Fourier inversion.
inline double classical_density(const CharExponent& ce, double t, double x) {
    if (!(t > 0.0)) throw DomainError("classical_density: t must be positive");
    const double a = t * ce.decay();
    const double b = t * ce.skew();
    const double alpha = ce.alpha();
    auto f = [=](double w) {
        const double p = std::pow(w, alpha);
        return std::exp(a * p) * std::cos(b * p - w * x);
    };
    const double cutoff = detail::frequency_cutoff(ce, t);
    return detail::paneled_integral(f, cutoff, x, "classical_density") / std::numbers::pi;
}

/// P(X_t <= x) by Gil-Pelaez inversion.
inline double classical_cdf(const CharExponent& ce, double t, double x) {
    if (!(t > 0.0)) throw DomainError("classical_cdf: t must be positive");
    const double a = t * ce.decay();
    const double b = t * ce.skew();
    const double alpha = ce.alpha();
    auto f = [=](double w) {
        if (w == 0.0) return -x;
        const double p = std::pow(w, alpha);
        return std::exp(a * p) * std::sin(b * p - w * x) / w;
    };
    const double cutoff = detail::frequency_cutoff(ce, t);
    return 0.5 - detail::paneled_integral(f, cutoff, x, "classical_cdf") / std::numbers::pi;
}

struct DensitySamples {
    std::vector<double> x;
    std::vector<double> values;
    double left_tail = 0.0;   // P(X_t < x_min)
    double right_tail = 0.0;  // P(X_t > x_max)
    double mass = 0.0;        // trapezoid mass on the grid plus both tails
    double clipped = 0.0;     // most negative ripple removed
};

/// Density samples of X_t on the spatial nodes of `grid`. Negative ripple below
/// `ripple_threshold` in magnitude is clipped; larger negatives or a mass defect above
/// `mass_tol` raise an error asking for a wider grid.
inline DensitySamples density_on_grid(const CharExponent& ce, double t, const Grid& grid,
                                      double mass_tol = 1e-4, double ripple_threshold = 1e-8) {
    if (!(t > 0.0)) throw DomainError("density_on_grid: t must be positive");
    DensitySamples out;
    out.x.resize(grid.nx);
    out.values.resize(grid.nx);
    for (std::size_t j = 0; j < grid.nx; ++j) {
        const double x = grid.x(j);
        double v = classical_density(ce, t, x);
        if (v < 0.0) {
            if (-v > ripple_threshold) {
                throw NumericalError("density_on_grid: negative density " + std::to_string(v) +
                                         "; widen the grid or refine",
                                     v);
            }
            out.clipped = std::min(out.clipped, v);
            v = 0.0;
        }
        out.x[j] = x;
        out.values[j] = v;
    }
    out.left_tail = classical_cdf(ce, t, grid.x_min);
    out.right_tail = 1.0 - classical_cdf(ce, t, grid.x_max);
    double mass = 0.0;
    for (std::size_t j = 0; j < grid.nx; ++j) {
        const double w = (j == 0 || j + 1 == grid.nx) ? 0.5 : 1.0;
        mass += w * out.values[j];
    }
    out.mass = mass * grid.dx + out.left_tail + out.right_tail;
    if (std::abs(out.mass - 1.0) > mass_tol) {
        throw NumericalError("density_on_grid: mass defect " + std::to_string(out.mass - 1.0) +
                                 " exceeds tolerance; use a wider grid",
                             out.mass - 1.0);
    }
    return out;
}

struct OracleOptions {
    double half_width = 40.0;
    std::size_t nodes = 3201;
};

/// E[psi(x + X_t)]: trapezoid quadrature against the inverted density on
/// [-half_width, half_width] plus constant extension of psi over the two tails.
inline double classical_expectation(const std::function<double(double)>& psi, const CharExponent& ce,
                                    double t, double x_shift, const OracleOptions& opts = {}) {
    const Grid g = Grid::make(-opts.half_width, opts.half_width, opts.nodes, 1.0, 1);
    const DensitySamples d = density_on_grid(ce, t, g);
    double acc = 0.0;
    for (std::size_t j = 0; j < g.nx; ++j) {
        const double w = (j == 0 || j + 1 == g.nx) ? 0.5 : 1.0;
        acc += w * psi(x_shift + d.x[j]) * d.values[j];
    }
    acc *= g.dx;
    acc += psi(x_shift + g.x_min) * d.left_tail + psi(x_shift + g.x_max) * d.right_tail;
    return acc;
}

}  // namespace stablelab
