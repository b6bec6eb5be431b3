#pragma once

// Experiment configuration: a JSON document with the fields below. Unknown keys are
// rejected so that typos surface as validation errors instead of silent defaults.
//
// {
//   "alpha": 1.5, "lambda": 0.5, "Lambda_cap": 3.0,
//   "pairs": [[0.7, 0.7], [0.7, 1.2]],
//   "b_scale": 1.0, "z0": 2.0, "h": 0.25, "horizon": 1.0,
//   "psi": {"name": "gaussian_bump", "params": {"center": 0, "width": 1}},
//   "grid": {"nx": 801, "half_width": 20, "safety": 0.5, "dp_nx": 4001, "dp_half_width": 20},
//   "n_values": [8, 64],
//   "checks": {...}, "output_dir": "out", "seedless": true
// }

#include "stablelab/errors.hpp"
#include "stablelab/kernel.hpp"
#include "stablelab/psi.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace stablelab {

struct GridConfig {
    std::size_t nx = 801;
    double half_width = 20.0;
    double safety = 0.5;
    std::size_t dp_nx = 4001;
    double dp_half_width = 20.0;
};

/// Pass thresholds used to turn experiment output into an exit status.
struct CheckConfig {
    double oracle_tol = 2e-2;          // solve: singleton PIDE vs Fourier oracle
    double lip_tol = 0.05;             // solve, regularity
    double clt_max_error = 5e-2;       // clt: error at the largest n
    double clt_min_drop = 2.0;         // clt: error(first n) / error(last n)
    double rate_tol = 0.15;            // hypothesis: |fitted rate - (1 - 2/alpha)|
    double residual_min_drop = 4.0;    // hypothesis: residual(first n) / residual(last n)
    double stability_tol = 0.20;       // regularity
};

struct ExperimentConfig {
    double alpha = 1.5;
    double lambda = 0.5;
    double Lambda_cap = 3.0;
    std::vector<KernelPair> pairs{{1.0, 1.0}};
    double b_scale = 1.0;
    double z0 = 2.0;
    double h = 0.25;
    double horizon = 1.0;
    std::string psi_name = "gaussian_bump";
    std::map<std::string, double> psi_params;
    GridConfig grid;
    std::vector<std::size_t> n_values{16, 32, 64, 128, 256};
    CheckConfig checks;
    std::string output_dir = "out";
    bool seedless = true;

    [[nodiscard]] UncertaintySet uncertainty_set() const { return UncertaintySet(alpha, pairs, lambda, Lambda_cap); }
    [[nodiscard]] TestFunction test_function() const { return psi::make(psi_name, psi_params); }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ValidationError("experiment_cli", where + key, "unknown field");
    }
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out, const std::string& where = "") {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("experiment_cli", where + key, std::string("wrong type: ") + e.what());
    }
}

inline void read_count(const nlohmann::json& j, const char* key, std::size_t& out, const std::string& where) {
    long long v = static_cast<long long>(out);
    read_field(j, key, v, where);
    if (v < 0) throw ValidationError("experiment_cli", where + key, "must be nonnegative");
    out = static_cast<std::size_t>(v);
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::read_field;
    if (!j.is_object()) throw ValidationError("experiment_cli", "config", "top level must be an object");
    detail::reject_unknown(j,
                           {"alpha", "lambda", "Lambda_cap", "pairs", "b_scale", "z0", "h", "horizon", "psi", "grid",
                            "n_values", "checks", "output_dir", "seedless"},
                           "");
    ExperimentConfig c;
    read_field(j, "alpha", c.alpha);
    read_field(j, "lambda", c.lambda);
    read_field(j, "Lambda_cap", c.Lambda_cap);
    read_field(j, "b_scale", c.b_scale);
    read_field(j, "z0", c.z0);
    read_field(j, "h", c.h);
    read_field(j, "horizon", c.horizon);
    read_field(j, "output_dir", c.output_dir);
    read_field(j, "seedless", c.seedless);
    if (j.contains("pairs")) {
        std::vector<std::array<double, 2>> raw;
        read_field(j, "pairs", raw);
        c.pairs.clear();
        for (const auto& p : raw) c.pairs.push_back({p[0], p[1]});
    }
    if (j.contains("n_values")) {
        // read as signed so that negative entries are reported instead of wrapping
        std::vector<long long> raw;
        read_field(j, "n_values", raw);
        c.n_values.clear();
        for (long long n : raw) {
            if (n < 1) throw ValidationError("experiment_cli", "n_values", "entries must be >= 1");
            c.n_values.push_back(static_cast<std::size_t>(n));
        }
    }
    if (j.contains("psi")) {
        const auto& p = j.at("psi");
        if (!p.is_object()) throw ValidationError("experiment_cli", "psi", "must be an object");
        detail::reject_unknown(p, {"name", "params"}, "psi.");
        read_field(p, "name", c.psi_name, "psi.");
        read_field(p, "params", c.psi_params, "psi.");
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_object()) throw ValidationError("experiment_cli", "grid", "must be an object");
        detail::reject_unknown(g, {"nx", "half_width", "safety", "dp_nx", "dp_half_width"}, "grid.");
        detail::read_count(g, "nx", c.grid.nx, "grid.");
        read_field(g, "half_width", c.grid.half_width, "grid.");
        read_field(g, "safety", c.grid.safety, "grid.");
        detail::read_count(g, "dp_nx", c.grid.dp_nx, "grid.");
        read_field(g, "dp_half_width", c.grid.dp_half_width, "grid.");
    }
    if (j.contains("checks")) {
        const auto& k = j.at("checks");
        if (!k.is_object()) throw ValidationError("experiment_cli", "checks", "must be an object");
        detail::reject_unknown(k,
                               {"oracle_tol", "lip_tol", "clt_max_error", "clt_min_drop", "rate_tol",
                                "residual_min_drop", "stability_tol"},
                               "checks.");
        read_field(k, "oracle_tol", c.checks.oracle_tol, "checks.");
        read_field(k, "lip_tol", c.checks.lip_tol, "checks.");
        read_field(k, "clt_max_error", c.checks.clt_max_error, "checks.");
        read_field(k, "clt_min_drop", c.checks.clt_min_drop, "checks.");
        read_field(k, "rate_tol", c.checks.rate_tol, "checks.");
        read_field(k, "residual_min_drop", c.checks.residual_min_drop, "checks.");
        read_field(k, "stability_tol", c.checks.stability_tol, "checks.");
    }
    return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& k : c.pairs) pairs.push_back({k.k_minus, k.k_plus});
    return {{"alpha", c.alpha},
            {"lambda", c.lambda},
            {"Lambda_cap", c.Lambda_cap},
            {"pairs", pairs},
            {"b_scale", c.b_scale},
            {"z0", c.z0},
            {"h", c.h},
            {"horizon", c.horizon},
            {"psi", {{"name", c.psi_name}, {"params", c.psi_params}}},
            {"grid",
             {{"nx", c.grid.nx},
              {"half_width", c.grid.half_width},
              {"safety", c.grid.safety},
              {"dp_nx", c.grid.dp_nx},
              {"dp_half_width", c.grid.dp_half_width}}},
            {"n_values", c.n_values},
            {"checks",
             {{"oracle_tol", c.checks.oracle_tol},
              {"lip_tol", c.checks.lip_tol},
              {"clt_max_error", c.checks.clt_max_error},
              {"clt_min_drop", c.checks.clt_min_drop},
              {"rate_tol", c.checks.rate_tol},
              {"residual_min_drop", c.checks.residual_min_drop},
              {"stability_tol", c.checks.stability_tol}}},
            {"output_dir", c.output_dir},
            {"seedless", c.seedless}};
}

inline std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

inline ExperimentConfig parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("experiment_cli", "config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("experiment_cli", "config", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Checks every module precondition the experiments rely on.
inline void validate(const ExperimentConfig& c) {
    if (!c.seedless) throw ValidationError("experiment_cli", "seedless", "all experiments are deterministic");
    (void)c.uncertainty_set();  // stable_kernel: alpha, lambda, Lambda, pairs
    (void)c.test_function();    // psi: name and parameters
    if (!(c.b_scale > 0.0)) throw ValidationError("attracted_laws", "b_scale", "must be positive");
    if (!(c.z0 > 0.0)) throw ValidationError("attracted_laws", "z0", "must be positive");
    if (!(c.h > 0.0 && c.h < 1.0)) throw ValidationError("pide_solver", "h_pad", "need 0 < h < 1");
    if (!(c.horizon > 0.0)) throw ValidationError("pide_solver", "horizon", "must be positive");
    if (c.grid.nx < 9 || c.grid.nx % 2 == 0) {
        throw ValidationError("pide_solver", "grid.nx", "need an odd node count >= 9 so that x = 0 is a node");
    }
    if (c.grid.dp_nx < 9 || c.grid.dp_nx % 2 == 0) {
        throw ValidationError("sublinear_engine", "grid.dp_nx", "need an odd node count >= 9");
    }
    if (!(c.grid.half_width > 0.0)) throw ValidationError("pide_solver", "grid.half_width", "must be positive");
    if (!(c.grid.dp_half_width > 0.0)) {
        throw ValidationError("sublinear_engine", "grid.dp_half_width", "must be positive");
    }
    if (!(c.grid.safety > 0.0 && c.grid.safety <= 1.0)) {
        throw ValidationError("pide_solver", "grid.safety", "need 0 < safety <= 1");
    }
    if (c.n_values.empty()) throw ValidationError("sublinear_engine", "n_values", "empty list");
    for (std::size_t i = 1; i < c.n_values.size(); ++i) {
        if (c.n_values[i] <= c.n_values[i - 1]) {
            throw ValidationError("sublinear_engine", "n_values", "must be strictly increasing");
        }
    }
    if (c.output_dir.empty()) throw ValidationError("experiment_cli", "output_dir", "empty path");
}

}  // namespace stablelab
