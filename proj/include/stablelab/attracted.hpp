#pragma once

// Mean-zero laws W in the domain of normal attraction of the stable law with kernel k:
//
//   p(z) = b^alpha k+ z^(-alpha-1)      z >= z0
//   p(z) = b^alpha k- |z|^(-alpha-1)    z <= -z0
//   p(z) = exp( H(z) + (z0^2 - z^2)^2 (c + tau z) )    |z| < z0
//
// H is the cubic Hermite interpolant of the tail log-density and its slope at +-z0, so
// p is C^1 at the junctions for every (c, tau) and positive by construction. c fixes the
// total mass and tau (the tilt) the mean; the two conditions are solved together by
// Newton's method, whose Jacobian is a Gram matrix of the interior density.
// Beyond z0 the cdf is exactly the pure power form, so beta_1 and beta_2 vanish there.

#include "stablelab/errors.hpp"
#include "stablelab/kernel.hpp"
#include "stablelab/quadrature.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace stablelab {

class AttractedLaw {
public:
    static constexpr std::size_t panels = 128;

    AttractedLaw(KernelPair pair, double alpha, double b_scale, double z0,
                 std::array<double, 4> cubic, double bump, double tilt)
        : pair_(pair), alpha_(alpha), b_(b_scale), z0_(z0), cubic_(cubic), bump_(bump), tilt_(tilt) {
        require_alpha(alpha, "attracted_laws");
        if (!(b_scale > 0.0 && z0 > 0.0)) {
            throw ValidationError("attracted_laws", "z0", "b and z0 must be positive");
        }
        const double z2 = z0 * z0;
        const double z4 = z2 * z2;
        poly_ = {cubic[0] + bump * z4, cubic[1] + tilt * z4, cubic[2] - 2.0 * bump * z2,
                 cubic[3] - 2.0 * tilt * z2, bump, tilt};
        ba_ = std::pow(b_, alpha_);
        tabulate();
    }

    [[nodiscard]] KernelPair pair() const noexcept { return pair_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double b_scale() const noexcept { return b_; }
    [[nodiscard]] double z0() const noexcept { return z0_; }
    [[nodiscard]] const std::array<double, 4>& cubic() const noexcept { return cubic_; }
    [[nodiscard]] double bump() const noexcept { return bump_; }
    [[nodiscard]] double tilt() const noexcept { return tilt_; }
    /// Interior log-density as a quintic, lowest degree first.
    [[nodiscard]] const std::array<double, 6>& log_density_poly() const noexcept { return poly_; }
    /// b^alpha k for the requested side.
    [[nodiscard]] double tail_weight(bool right) const noexcept {
        return ba_ * (right ? pair_.k_plus : pair_.k_minus);
    }

    /// Interior formula evaluated anywhere (used for one-sided junction checks).
    [[nodiscard]] double interior_density(double z) const noexcept { return std::exp(horner(z)); }
    [[nodiscard]] double interior_derivative(double z) const noexcept {
        double d = 0.0;
        for (int i = 5; i >= 1; --i) d = d * z + i * poly_[i];
        return d * interior_density(z);
    }

    [[nodiscard]] double density(double z) const noexcept {
        if (z >= z0_) return tail_weight(true) * std::pow(z, -alpha_ - 1.0);
        if (z <= -z0_) return tail_weight(false) * std::pow(-z, -alpha_ - 1.0);
        return interior_density(z);
    }

    [[nodiscard]] double density_derivative(double z) const noexcept {
        if (z >= z0_) return -(alpha_ + 1.0) * tail_weight(true) * std::pow(z, -alpha_ - 2.0);
        if (z <= -z0_) return (alpha_ + 1.0) * tail_weight(false) * std::pow(-z, -alpha_ - 2.0);
        return interior_derivative(z);
    }

    [[nodiscard]] double left_tail_mass() const noexcept {
        return tail_weight(false) * std::pow(z0_, -alpha_) / alpha_;
    }
    [[nodiscard]] double right_tail_mass() const noexcept {
        return tail_weight(true) * std::pow(z0_, -alpha_) / alpha_;
    }
    /// int_{z0}^inf z p(z) dz (right) or int_{-inf}^{-z0} |z| p(z) dz (left).
    [[nodiscard]] double tail_abs_first_moment(bool right) const noexcept {
        return tail_weight(right) * std::pow(z0_, 1.0 - alpha_) / (alpha_ - 1.0);
    }

    /// int_{-z0}^{z0} z^k p(z) dz for k in [0, 4].
    [[nodiscard]] double interior_moment(int k) const {
        if (k < 0 || k > 4) throw DomainError("interior_moment: order must lie in [0, 4]");
        return moments_[static_cast<std::size_t>(k)];
    }

    /// int_{-z0}^{z} p for z in [-z0, z0].
    [[nodiscard]] double interior_cdf(double z) const noexcept {
        if (z <= -z0_) return 0.0;
        if (z >= z0_) return cum_.back();
        const double h = 2.0 * z0_ / static_cast<double>(panels);
        auto k = static_cast<std::size_t>((z + z0_) / h);
        if (k >= panels) k = panels - 1;
        const double lo = -z0_ + static_cast<double>(k) * h;
        if (z == lo) return cum_[k];
        return cum_[k] + quad::gauss<20>([this](double s) { return interior_density(s); }, lo, z);
    }

    [[nodiscard]] double cdf(double z) const noexcept {
        if (z <= -z0_) return tail_weight(false) * std::pow(-z, -alpha_) / alpha_;
        if (z >= z0_) return 1.0 - tail_weight(true) * std::pow(z, -alpha_) / alpha_;
        return left_tail_mass() + interior_cdf(z);
    }

    /// P(W > z).
    [[nodiscard]] double survival(double z) const noexcept {
        if (z >= z0_) return tail_weight(true) * std::pow(z, -alpha_) / alpha_;
        if (z <= -z0_) return 1.0 - tail_weight(false) * std::pow(-z, -alpha_) / alpha_;
        return right_tail_mass() + (cum_.back() - interior_cdf(z));
    }

    [[nodiscard]] double total_mass() const noexcept {
        return left_tail_mass() + moments_[0] + right_tail_mass();
    }
    [[nodiscard]] double mean() const noexcept {
        return moments_[1] + tail_abs_first_moment(true) - tail_abs_first_moment(false);
    }

    /// Composite 20-point Gauss-Legendre over the interior panels.
    template <class F>
    [[nodiscard]] double integrate_interior(F&& f) const {
        const double h = 2.0 * z0_ / static_cast<double>(panels);
        double acc = 0.0;
        for (std::size_t k = 0; k < panels; ++k) {
            const double lo = -z0_ + static_cast<double>(k) * h;
            acc += quad::gauss<20>([&](double s) { return f(s) * interior_density(s); }, lo, lo + h);
        }
        return acc;
    }

private:
    [[nodiscard]] double horner(double z) const noexcept {
        double v = 0.0;
        for (int i = 5; i >= 0; --i) v = v * z + poly_[i];
        return v;
    }

    void tabulate() {
        const double h = 2.0 * z0_ / static_cast<double>(panels);
        cum_.assign(panels + 1, 0.0);
        moments_.fill(0.0);
        for (std::size_t k = 0; k < panels; ++k) {
            const double lo = -z0_ + static_cast<double>(k) * h;
            const double hi = lo + h;
            cum_[k + 1] = cum_[k] + quad::gauss<20>([this](double s) { return interior_density(s); }, lo, hi);
            for (std::size_t m = 0; m < moments_.size(); ++m) {
                moments_[m] += quad::gauss<20>(
                    [&](double s) { return std::pow(s, static_cast<double>(m)) * interior_density(s); }, lo,
                    hi);
            }
        }
    }

    KernelPair pair_;
    double alpha_;
    double b_;
    double z0_;
    std::array<double, 4> cubic_;
    double bump_;
    double tilt_;
    std::array<double, 6> poly_{};
    double ba_ = 1.0;
    std::vector<double> cum_;
    std::array<double, 5> moments_{};
};

inline AttractedLaw build_law(KernelPair pair, double alpha, double b_scale, double z0) {
    require_alpha(alpha, "attracted_laws");
    if (!(b_scale > 0.0)) throw ValidationError("attracted_laws", "b_scale", "must be positive");
    if (!(z0 > 0.0)) throw ValidationError("attracted_laws", "z0", "must be positive");
    if (!(pair.k_minus > 0.0 && pair.k_plus > 0.0)) {
        throw ValidationError("attracted_laws", "pair", "intensities must be positive");
    }
    const double ba = std::pow(b_scale, alpha);
    const double tails = ba * pair.total() / (alpha * std::pow(z0, alpha));
    if (!(tails < 1.0)) {
        throw ValidationError("attracted_laws", "z0",
                              "tail mass " + std::to_string(tails) +
                                  " leaves no interior mass; try a larger z0");
    }
    const double mass = 1.0 - tails;
    const double target_mean = -ba * pair.skew() * std::pow(z0, 1.0 - alpha) / (alpha - 1.0);
    if (!(std::abs(target_mean) < mass * z0)) {
        throw ValidationError("attracted_laws", "z0",
                              "mean zero needs interior first moment " + std::to_string(target_mean) +
                                  " from interior mass " + std::to_string(mass) +
                                  " on (-z0, z0), which no density can carry; try a larger z0");
    }

    // Hermite cubic through the tail log-density and its slope at -z0 and z0
    const double lr = std::log(ba * pair.k_plus) - (alpha + 1.0) * std::log(z0);
    const double ll = std::log(ba * pair.k_minus) - (alpha + 1.0) * std::log(z0);
    const double dr = -(alpha + 1.0) / z0;
    const double dl = (alpha + 1.0) / z0;
    const double e = 0.5 * (lr + ll);
    const double o = 0.5 * (lr - ll);
    const double de = 0.5 * (dr - dl);
    const double dO = 0.5 * (dr + dl);
    std::array<double, 4> a{};
    a[2] = de / (2.0 * z0);
    a[0] = e - a[2] * z0 * z0;
    a[3] = (dO - o / z0) / (2.0 * z0 * z0);
    a[1] = o / z0 - a[3] * z0 * z0;

    // Newton on (c, tau) with backtracking on the residual norm
    auto residual = [&](const AttractedLaw& law) {
        return std::array<double, 2>{law.interior_moment(0) - mass, law.interior_moment(1) - target_mean};
    };
    const bool symmetric_pair = pair.k_minus == pair.k_plus;
    auto norm = [symmetric_pair](const std::array<double, 2>& r) {
        return symmetric_pair ? std::abs(r[0]) : std::hypot(r[0], r[1]);
    };
    double c = 0.0;
    double tau = 0.0;
    AttractedLaw law(pair, alpha, b_scale, z0, a, c, tau);
    auto r = residual(law);
    const double z2 = z0 * z0;
    for (int it = 0; it < 200 && norm(r) > 1e-15; ++it) {
        auto bump = [z2](double s) { return (z2 - s * s) * (z2 - s * s); };
        const double j11 = law.integrate_interior(bump);
        const double j12 = law.integrate_interior([&](double s) { return s * bump(s); });
        const double j22 = law.integrate_interior([&](double s) { return s * s * bump(s); });
        const double det = j11 * j22 - j12 * j12;
        if (!(det > 0.0)) break;
        // a symmetric pair keeps tau = 0 exactly; only the mass condition is active
        const bool symmetric = symmetric_pair;
        const double dc = symmetric ? -r[0] / j11 : -(j22 * r[0] - j12 * r[1]) / det;
        const double dtau = symmetric ? 0.0 : -(j11 * r[1] - j12 * r[0]) / det;
        double step = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
            AttractedLaw trial(pair, alpha, b_scale, z0, a, c + step * dc, tau + step * dtau);
            auto rt = residual(trial);
            if (std::isfinite(norm(rt)) && norm(rt) < norm(r)) {
                c += step * dc;
                tau += step * dtau;
                law = trial;
                r = rt;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (!(norm(r) < 1e-12)) {
        throw ValidationError("attracted_laws", "z0",
                              "mass and mean-zero calibration did not converge (residual " +
                                  std::to_string(norm(r)) + "); try a larger z0");
    }
    return law;
}

/// (beta_1(z), beta_2(z)); the entry for the other half-line is NaN.
inline std::pair<double, double> beta_functions(const AttractedLaw& law, double z) {
    if (z == 0.0) throw DomainError("beta_functions: z = 0");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double a = law.alpha();
    if (z < 0.0) {
        if (z <= -law.z0()) return {0.0, nan};
        return {law.cdf(z) * std::pow(-z, a) - law.tail_weight(false) / a, nan};
    }
    if (z >= law.z0()) return {nan, 0.0};
    return {nan, law.survival(z) * std::pow(z, a) - law.tail_weight(true) / a};
}

/// beta_1'(z) for z < 0 or beta_2'(z) for z > 0.
inline double beta_derivative(const AttractedLaw& law, double z) {
    if (z == 0.0) throw DomainError("beta_derivative: z = 0");
    const double a = law.alpha();
    if (std::abs(z) >= law.z0()) return 0.0;
    if (z < 0.0) {
        const double s = -z;
        return law.density(z) * std::pow(s, a) - a * law.cdf(z) * std::pow(s, a - 1.0);
    }
    return -law.density(z) * std::pow(z, a) + a * law.survival(z) * std::pow(z, a - 1.0);
}

/// -beta'(z) z + alpha beta(z) on the right, beta'(z)|z| + alpha beta(z) on the left.
/// Both reduce to p(z)|z|^(alpha+1) - b^alpha k_side.
inline double beta_kernel(const AttractedLaw& law, double z) {
    if (z == 0.0) throw DomainError("beta_kernel: z = 0");
    if (std::abs(z) >= law.z0()) return 0.0;
    return law.density(z) * std::pow(std::abs(z), law.alpha() + 1.0) - law.tail_weight(z > 0.0);
}

/// Description of an integrand for law_expectation.
struct Integrand {
    std::function<double(double)> f;
    /// |f(z)| = O(|z|^growth) as |z| -> inf; must stay below alpha.
    double growth = 0.0;
    /// f is affine on each tail, so the tails are integrated in closed form.
    bool affine_tails = false;
};

namespace detail {
// int_{z0}^inf f(side z) w z^(-alpha-1) dz in the log variable z = z0 e^s.
inline double tail_integral(const std::function<double(double)>& f, const AttractedLaw& law,
                            bool right, double growth) {
    const double a = law.alpha();
    const double z0 = law.z0();
    const double w = law.tail_weight(right);
    const double side = right ? 1.0 : -1.0;
    const double decay = a - std::max(growth, 0.0);
    // e^(-decay s) < 1e-17 beyond s_max
    const double s_max = 40.0 / decay;
    const auto panels = static_cast<int>(std::ceil(s_max));
    auto g = [&](double s) {
        const double z = z0 * std::exp(s);
        return f(side * z) * std::exp(-a * s);
    };
    // adaptive per panel so that kinks of f in the tails are resolved
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) acc += quad::adaptive(g, p, p + 1.0, 1e-13, 12).value;
    return w * std::pow(z0, -a) * acc;
}
}  // namespace detail

/// int phi dF_W.
inline double law_expectation(const Integrand& phi, const AttractedLaw& law) {
    if (!(phi.growth < law.alpha())) {
        throw DomainError("law_expectation: growth exponent " + std::to_string(phi.growth) +
                          " is not integrable against tails of index " + std::to_string(law.alpha()));
    }
    const double z0 = law.z0();
    auto inner = [&](double z) { return phi.f(z) * law.interior_density(z); };
    // adaptive per interior panel, so kinks of phi are resolved locally
    double interior = 0.0;
    double err = 0.0;
    const double h = 2.0 * z0 / static_cast<double>(AttractedLaw::panels);
    for (std::size_t k = 0; k < AttractedLaw::panels; ++k) {
        const double lo = -z0 + static_cast<double>(k) * h;
        const auto r = quad::adaptive(inner, lo, k + 1 == AttractedLaw::panels ? z0 : lo + h, 1e-12, 12);
        interior += r.value;
        err += r.error;
    }
    if (!std::isfinite(interior) || err > 1e-8) {
        throw NumericalError("law_expectation: interior quadrature error estimate " + std::to_string(err) + " value "  + std::to_string(interior),
                             err);
    }
    double tails = 0.0;
    if (phi.affine_tails) {
        for (bool right : {false, true}) {
            const double side = right ? 1.0 : -1.0;
            const double f0 = phi.f(side * z0);
            const double slope = (phi.f(side * 2.0 * z0) - f0) / z0;  // per unit |z|
            const double mass = right ? law.right_tail_mass() : law.left_tail_mass();
            const double m1 = law.tail_abs_first_moment(right);
            tails += f0 * mass + slope * (m1 - z0 * mass);
        }
    } else {
        tails = detail::tail_integral(phi.f, law, false, phi.growth) +
                detail::tail_integral(phi.f, law, true, phi.growth);
    }
    return interior + tails;
}

inline double law_expectation(const std::function<double(double)>& phi, const AttractedLaw& law) {
    return law_expectation(Integrand{phi, 0.0, false}, law);
}

/// The six integrals of the uniform-bound condition, left half-line first:
///   |int_{-inf}^{-1} beta_1/(-z)^a|, |int_{-1}^0 beta_1'/(-z)^(a-1)|,
///   int_{-1}^0 |beta_1' |z| + a beta_1|/(-z)^(a-1), and the mirrored three for beta_2.
struct UniformityQuantities {
    std::array<double, 6> values{};
    [[nodiscard]] double max() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }
};

namespace detail {
// int over [lo, hi] of a function smooth except at z0 and with an integrable
// singularity at 0; splits at the breakpoints that fall inside.
template <class F>
double split_integral(F&& f, double lo, double hi, double z0) {
    if (hi <= lo) return 0.0;
    double acc = 0.0;
    double a = lo;
    for (double brk : {z0}) {
        if (brk > a && brk < hi) {
            acc += quad::tanh_sinh(f, a, brk, 1e-12).value;
            a = brk;
        }
    }
    acc += quad::tanh_sinh(f, a, hi, 1e-12).value;
    return acc;
}
}  // namespace detail

inline UniformityQuantities uniformity_quantities(const AttractedLaw& law) {
    const double a = law.alpha();
    const double z0 = law.z0();
    UniformityQuantities q;
    for (int side = 0; side < 2; ++side) {
        const bool right = side == 1;
        const double sg = right ? 1.0 : -1.0;
        auto beta = [&](double s) {
            auto b = beta_functions(law, sg * s);
            return right ? b.second : b.first;
        };
        // far: int_1^inf beta(s)/s^a ds (beta vanishes beyond z0)
        const double far = detail::split_integral([&](double s) { return beta(s) / std::pow(s, a); },
                                                  1.0, std::max(1.0, z0), z0);
        const double near_deriv = detail::split_integral(
            [&](double s) { return beta_derivative(law, sg * s) / std::pow(s, a - 1.0); }, 0.0, 1.0, z0);
        const double near_kernel = detail::split_integral(
            [&](double s) { return std::abs(beta_kernel(law, sg * s)) / std::pow(s, a - 1.0); }, 0.0,
            1.0, z0);
        q.values[3 * side + 0] = std::abs(far);
        q.values[3 * side + 1] = std::abs(near_deriv);
        q.values[3 * side + 2] = near_kernel;
    }
    return q;
}

/// The six rate quantities of the decay condition at B_n^-1 = b n^(1/alpha), left first:
///   |beta_1(-B_n^-1)|, int_{-inf}^{-1} |beta_1(B_n^-1 z)|/(-z)^a, int_{-1}^0 |beta_1(B_n^-1 z)|/(-z)^(a-1),
/// and the mirrored three for beta_2.
inline std::array<double, 6> rate_quantities(const AttractedLaw& law, double n) {
    const double a = law.alpha();
    const double z0 = law.z0();
    const double inv_bn = law.b_scale() * std::pow(n, 1.0 / a);
    std::array<double, 6> out{};
    for (int side = 0; side < 2; ++side) {
        const bool right = side == 1;
        const double sg = right ? 1.0 : -1.0;
        auto beta_abs = [&](double y) {
            if (y >= z0) return 0.0;
            auto b = beta_functions(law, sg * y);
            return std::abs(right ? b.second : b.first);
        };
        const double edge = z0 / inv_bn;  // beta(inv_bn s) vanishes for s >= edge
        out[3 * side + 0] = beta_abs(inv_bn);
        out[3 * side + 1] = detail::split_integral(
            [&](double s) { return beta_abs(inv_bn * s) / std::pow(s, a); }, 1.0, std::max(1.0, edge),
            edge);
        out[3 * side + 2] = detail::split_integral(
            [&](double s) { return beta_abs(inv_bn * s) / std::pow(s, a - 1.0); }, 0.0, 1.0, edge);
    }
    return out;
}

inline nlohmann::json to_json(const AttractedLaw& law) {
    return {{"alpha", law.alpha()},
            {"k_minus", law.pair().k_minus},
            {"k_plus", law.pair().k_plus},
            {"b", law.b_scale()},
            {"z0", law.z0()},
            {"cubic", law.cubic()},
            {"bump", law.bump()},
            {"tilt", law.tilt()}};
}

inline AttractedLaw law_from_json(const nlohmann::json& j) {
    try {
        return AttractedLaw({j.at("k_minus").get<double>(), j.at("k_plus").get<double>()},
                            j.at("alpha").get<double>(), j.at("b").get<double>(),
                            j.at("z0").get<double>(), j.at("cubic").get<std::array<double, 4>>(),
                            j.at("bump").get<double>(), j.at("tilt").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("attracted_laws", "record", e.what());
    }
}

}  // namespace stablelab
