#pragma once

// Two-sided alpha-stable Levy measures F(dz) = (k- 1{z<0} + k+ 1{z>0}) |z|^(-alpha-1) dz
// and the finite uncertainty sets built from them.

#include "stablelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace stablelab {

struct KernelPair {
    double k_minus = 1.0;  // left-tail intensity
    double k_plus = 1.0;   // right-tail intensity

    [[nodiscard]] double total() const noexcept { return k_minus + k_plus; }
    [[nodiscard]] double skew() const noexcept { return k_plus - k_minus; }

    friend bool operator==(const KernelPair&, const KernelPair&) = default;
};

inline void require_alpha(double alpha, const char* module = "stable_kernel") {
    if (!(alpha > 1.0 && alpha < 2.0)) {
        throw ValidationError(module, "alpha", "must lie strictly inside (1, 2), got " +
                                                   std::to_string(alpha));
    }
}

/// Uncertainty set: finitely many kernel pairs sharing one stability exponent.
/// Every pair must satisfy lambda < k < Lambda componentwise.
class UncertaintySet {
public:
    UncertaintySet(double alpha, std::vector<KernelPair> pairs, double lambda, double Lambda)
        : alpha_(alpha), pairs_(std::move(pairs)), lambda_(lambda), Lambda_(Lambda) {
        require_alpha(alpha_);
        if (!(lambda_ > 0.0) || !(Lambda_ > lambda_)) {
            throw ValidationError("stable_kernel", "lambda", "need 0 < lambda < Lambda");
        }
        if (pairs_.empty()) {
            throw ValidationError("stable_kernel", "pairs", "uncertainty set is empty");
        }
        for (const auto& k : pairs_) {
            for (double v : {k.k_minus, k.k_plus}) {
                if (!(v > lambda_ && v < Lambda_)) {
                    throw ValidationError("stable_kernel", "pairs",
                                          "intensity " + std::to_string(v) +
                                              " outside (lambda, Lambda)");
                }
            }
        }
    }

    /// Singleton convenience: bounds chosen to bracket the pair.
    static UncertaintySet singleton(double alpha, KernelPair k) {
        const double lo = 0.5 * std::min(k.k_minus, k.k_plus);
        const double hi = 2.0 * std::max(k.k_minus, k.k_plus);
        return UncertaintySet(alpha, {k}, lo, hi);
    }

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] const std::vector<KernelPair>& pairs() const noexcept { return pairs_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double Lambda() const noexcept { return Lambda_; }
    [[nodiscard]] bool is_singleton() const noexcept { return pairs_.size() == 1; }

    [[nodiscard]] double max_total() const noexcept {
        double m = 0.0;
        for (const auto& k : pairs_) m = std::max(m, k.total());
        return m;
    }

private:
    double alpha_;
    std::vector<KernelPair> pairs_;
    double lambda_;
    double Lambda_;
};

/// Density of F_{k} at z != 0.
inline double levy_density(KernelPair k, double alpha, double z) {
    if (z == 0.0) throw DomainError("levy_density: z = 0 is the non-integrable singularity");
    require_alpha(alpha);
    const double c = z > 0.0 ? k.k_plus : k.k_minus;
    return c * std::pow(std::abs(z), -alpha - 1.0);
}

/// b_k = (k- - k+) * int_1^inf z^-alpha dz; the drift that appears when the
/// compensator is restricted to (-1, 1).
inline double drift_b(KernelPair k, double alpha) {
    require_alpha(alpha);
    return (k.k_minus - k.k_plus) / (alpha - 1.0);
}

/// int_{|z|<r} z^2 F_k(dz).
inline double small_jump_second_moment(KernelPair k, double alpha, double r) {
    if (!(r > 0.0)) throw DomainError("small_jump_second_moment: radius must be positive");
    require_alpha(alpha);
    return k.total() * std::pow(r, 2.0 - alpha) / (2.0 - alpha);
}

/// int_{|z|>=r} F_k(dz) restricted to one side: k_side * r^-alpha / alpha.
inline double tail_mass(double k_side, double alpha, double r) {
    if (!(r > 0.0)) throw DomainError("tail_mass: radius must be positive");
    return k_side * std::pow(r, -alpha) / alpha;
}

/// int_r^inf z F(dz) on one side: k_side * r^(1-alpha) / (alpha-1).
inline double tail_first_moment(double k_side, double alpha, double r) {
    if (!(r > 0.0)) throw DomainError("tail_first_moment: radius must be positive");
    require_alpha(alpha);
    return k_side * std::pow(r, 1.0 - alpha) / (alpha - 1.0);
}

}  // namespace stablelab
