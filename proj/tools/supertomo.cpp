// supertomo: phantom generation, data simulation, and superiorized reconstruction experiments.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "supertomo/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Superiorized conjugate-gradient tomography toolkit"};
    app.require_subcommand(1);

    supertomo::CommandInput input;
    std::uint64_t seed = 0;
    std::string out;

    auto add_common = [&](CLI::App* cmd, bool many_configs) {
        if (many_configs) {
            cmd->add_option("--config", input.config_files, "Configuration files (key=value), one per algorithm")
                ->required();
        } else {
            cmd->add_option("--config", input.config_files, "Configuration file (key=value)");
        }
        cmd->add_option("--set", input.overrides, "Override a configuration key: --set key=value");
        cmd->add_option("--seed", seed, "Noise seed");
        cmd->add_option("--out", out, "Output directory");
    };

    auto* phantom = app.add_subcommand("phantom", "Render an ellipse phantom to an image and PGM preview");
    add_common(phantom, false);
    phantom->add_option("--phantom", input.phantom_spec, "Ellipse spec file (cx cy a b rotation delta per line)");

    auto* simulate = app.add_subcommand("simulate", "Simulate parallel-beam data for a phantom");
    add_common(simulate, false);

    auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct from a sinogram and write the SE curve");
    add_common(reconstruct, false);

    auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid over the first 15 iterations");
    add_common(sweep, false);
    sweep->add_option("--grid", input.grid_file, "Grid file")->required();

    auto* compare = app.add_subcommand("compare", "Run several configurations and merge their curves");
    add_common(compare, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : supertomo::kExitConfig;
    }

    for (auto* cmd : app.get_subcommands()) {
        if (cmd->count("--seed") > 0) input.seed = seed;
        if (cmd->count("--out") > 0) input.out = out;
    }

    if (phantom->parsed()) return supertomo::cmd_phantom(input, std::cerr);
    if (simulate->parsed()) return supertomo::cmd_simulate(input, std::cerr);
    if (reconstruct->parsed()) return supertomo::cmd_reconstruct(input, std::cerr);
    if (sweep->parsed()) return supertomo::cmd_sweep(input, std::cerr);
    return supertomo::cmd_compare(input, std::cerr);
}
