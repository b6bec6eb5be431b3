// Command-line front end: stablelab_cli <solve|clt|hypothesis|regularity> --config FILE [--out DIR]
//
// Exit status: 0 when every check passes, 2 on invalid configuration, 3 when a numerical
// threshold is missed or a numerical procedure fails, 1 on anything else (I/O errors).

#include "stablelab/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <map>

namespace {

using Runner = std::function<stablelab::ExperimentOutcome(const stablelab::ExperimentConfig&,
                                                          const std::filesystem::path&)>;

int execute(const Runner& run, const std::string& config_path, const std::string& out_dir) {
    using namespace stablelab;
    try {
        const ExperimentConfig cfg = load_config(config_path);
        const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(out_dir);
        const ExperimentOutcome res = run(cfg, dir);
        std::fputs(res.summary.c_str(), stdout);
        return res.passed() ? 0 : 3;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error [%s.%s]: %s\n", e.module().c_str(), e.field().c_str(), e.what());
        return 2;
    } catch (const GridTooNarrowError& e) {
        std::fprintf(stderr, "grid too narrow: %s (suggested half width %.6g)\n", e.what(),
                     e.suggested_half_width());
        return 3;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const CflError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for alpha-stable nonlinear expectations"};
    app.require_subcommand(1);

    const std::map<std::string, Runner> runners{
        {"solve", stablelab::run_solve},
        {"clt", stablelab::run_clt},
        {"hypothesis", stablelab::run_hypothesis},
        {"regularity", stablelab::run_regularity},
    };
    const std::map<std::string, std::string> help{
        {"solve", "forward/backward PIDE surfaces with max-principle, Lipschitz and oracle checks"},
        {"clt", "convergence of the nested sublinear sum to the PIDE value"},
        {"hypothesis", "increment-condition residual table and the self-attraction check"},
        {"regularity", "Lipschitz, Hoelder and derivative-bound probes on solver output"},
    };

    std::string config_path;
    std::string out_dir;
    for (const auto& [name, _] : runners) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config_path, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (defaults to output_dir in the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    for (const auto& [name, run] : runners) {
        if (app.got_subcommand(name)) return execute(run, config_path, out_dir);
    }
    return 2;
}
