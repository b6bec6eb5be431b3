#pragma once

// Thin wrappers over Boost.Math quadrature used throughout the library.

#include "stablelab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <string>

namespace stablelab::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 31-point Gauss-Kronrod on [a, b].
template <class F>
Result adaptive(F&& f, double a, double b, double tol = 1e-12, unsigned max_depth = 24) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, max_depth, tol, &err, &l1);
    return {v, err};
}

/// Same as adaptive() but throws when the achieved error exceeds `fail_above`.
template <class F>
double adaptive_checked(F&& f, double a, double b, double tol, double fail_above, const char* what) {
    auto r = adaptive(f, a, b, tol);
    if (!std::isfinite(r.value) || r.error > fail_above) {
        throw NumericalError(std::string(what) + ": quadrature did not reach tolerance, error estimate " +
                                 std::to_string(r.error),
                             r.error);
    }
    return r.value;
}

/// Fixed N-point Gauss-Legendre on [a, b].
template <unsigned N, class F>
double gauss(F&& f, double a, double b) {
    return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

/// Double-exponential rule for integrable endpoint singularities.
template <class F>
Result tanh_sinh(F&& f, double a, double b, double tol = 1e-12) {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    double err = 0.0;
    double l1 = 0.0;
    const double v = rule.integrate(f, a, b, tol, &err, &l1);
    return {v, err};
}

}  // namespace stablelab::quad
