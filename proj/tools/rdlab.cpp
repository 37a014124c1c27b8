// Command-line front end: parses a run config, dispatches the experiment and
// writes CSV artifacts (plus optional gnuplot scripts) to the output
// directory. Exit status: 0 pass, 1 fail verdict, 2 execution error.

#include <CLI11.hpp>
#include <iostream>

#include "rdlab/dispatch.hpp"

int main(int argc, char** argv) {
    CLI::App app{"reaction-diffusion comparison laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0x5eedULL;
    int jobs = 1;
    bool emit_plots = false;

    const std::vector<std::string> experiments = {
        "simulate", "compare", "compare-shifted", "check-conditions",
        "regularize", "maxprinciple", "linf", "eig"};

    for (const auto& name : experiments) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "sampling seed");
        sub->add_option("--jobs", jobs, "parallel workers for multi-k studies");
        sub->add_flag("--emit-plots", emit_plots, "write gnuplot scripts next to the CSVs");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string experiment = app.get_subcommands().front()->get_name();
    try {
        auto cfg = rdlab::RunConfig::from_file(config_path);
        auto setup = rdlab::build_setup(cfg, experiment);
        if (emit_plots) setup.emit_plots = true;
        auto result = rdlab::dispatch(setup, out_dir, seed, jobs);
        std::cout << result.summary << '\n';
        for (const auto& artifact : result.artifacts) std::cout << "wrote " << artifact << '\n';
        return result.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
