#include "frontlab/config.hpp"
#include "frontlab/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace frontlab;

    CLI::App app{"frontlab: free-boundary reaction-diffusion experiments"};
    std::string kind;
    std::string config_path;
    std::string out_dir;
    std::optional<int> workers;
    app.add_option("kind", kind, "experiment kind (simulate, classify, sigma-star, semiwave, xi0, groundstate, "
                                 "bump, fit-speed, zeronum, stefan-check, barrier-check)")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker pool size for sigma-star probes")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code::usage;
    }

    RunConfig config;
    try {
        config = parse_config(config_path);
        const ExperimentKind requested = experiment_kind_from_string(kind);
        if (requested != config.kind) {
            std::cerr << "warning: command-line kind '" << kind << "' differs from config kind '"
                      << to_string(config.kind) << "'; using the config\n";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "frontlab: " << e.what() << "\n";
        return exit_code::usage;
    }

    if (!out_dir.empty() && out_dir != config.output) {
        const RunConfig defaults;
        if (config.output == defaults.output) {
            config.output = out_dir;
        } else {
            std::cerr << "warning: --out '" << out_dir << "' differs from config output '" << config.output
                      << "'; using the config\n";
        }
    }
    if (workers) {
        if (config.workers && *config.workers != *workers) {
            std::cerr << "warning: --workers " << *workers << " differs from config workers " << *config.workers
                      << "; using the config\n";
        } else {
            config.workers = workers;
        }
    }

    try {
        return run_experiment(config, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "frontlab: " << e.what() << "\n";
        return exit_code::usage;
    }
}
