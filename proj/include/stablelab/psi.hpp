#pragma once

// Fixed basket of bounded Lipschitz test functions. Each entry documents its
// Lipschitz constant and sup-norm so solvers and probes can check against them.

#include "stablelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>

namespace stablelab {

struct TestFunction {
    std::string name;
    std::map<std::string, double> params;
    std::function<double(double)> f;
    double lip = 0.0;
    double sup = 0.0;
    /// True when f is constant outside [-far_field, far_field].
    double far_field = 0.0;

    double operator()(double x) const { return f(x); }
};

namespace psi {

/// exp(-((x - center)/width)^2). Lip = sqrt(2/e)/width, sup = 1.
inline TestFunction gaussian_bump(double center = 0.0, double width = 1.0) {
    if (!(width > 0.0)) throw ValidationError("psi", "width", "must be positive");
    return {"gaussian_bump",
            {{"center", center}, {"width", width}},
            [=](double x) {
                const double s = (x - center) / width;
                return std::exp(-s * s);
            },
            std::sqrt(2.0 / std::exp(1.0)) / width,
            1.0,
            std::abs(center) + 40.0 * width};
}

/// Logistic 1/(1+exp(-s)) with s = clamp(slope (x - center), -clip, clip).
/// Lip = slope/4, sup = logistic(clip).
inline TestFunction sigmoid(double center = 0.0, double slope = 1.0, double clip = 6.0) {
    if (!(slope > 0.0)) throw ValidationError("psi", "slope", "must be positive");
    if (!(clip > 0.0)) throw ValidationError("psi", "clip", "must be positive");
    return {"sigmoid",
            {{"center", center}, {"slope", slope}, {"clip", clip}},
            [=](double x) {
                const double s = std::clamp(slope * (x - center), -clip, clip);
                return 1.0 / (1.0 + std::exp(-s));
            },
            slope / 4.0,
            1.0 / (1.0 + std::exp(-clip)),
            std::abs(center) + clip / slope};
}

/// min(|x|, clip). Lip = 1, sup = clip.
inline TestFunction abs_clip(double clip = 2.0) {
    if (!(clip > 0.0)) throw ValidationError("psi", "clip", "must be positive");
    return {"abs_clip", {{"clip", clip}},
            [=](double x) { return std::min(std::abs(x), clip); }, 1.0, clip, clip};
}

/// clamp(x, -clip, clip). Lip = 1, sup = clip.
inline TestFunction linear_clip(double clip = 2.0) {
    if (!(clip > 0.0)) throw ValidationError("psi", "clip", "must be positive");
    return {"linear_clip", {{"clip", clip}},
            [=](double x) { return std::clamp(x, -clip, clip); }, 1.0, clip, clip};
}

inline TestFunction constant(double value = 1.0) {
    return {"constant", {{"value", value}}, [=](double) { return value; }, 0.0,
            std::abs(value), 0.0};
}

/// Looks a basket entry up by name; missing parameters take the defaults above.
inline TestFunction make(const std::string& name, const std::map<std::string, double>& p) {
    auto get = [&](const char* key, double dflt) {
        auto it = p.find(key);
        return it == p.end() ? dflt : it->second;
    };
    if (name == "gaussian_bump") return gaussian_bump(get("center", 0.0), get("width", 1.0));
    if (name == "sigmoid") return sigmoid(get("center", 0.0), get("slope", 1.0), get("clip", 6.0));
    if (name == "abs_clip") return abs_clip(get("clip", 2.0));
    if (name == "linear_clip") return linear_clip(get("clip", 2.0));
    if (name == "constant") return constant(get("value", 1.0));
    throw ValidationError("psi", "name", "unknown test function '" + name + "'");
}

}  // namespace psi
}  // namespace stablelab
