// Batch CLI: raster -> superpixels -> features -> clustering/selection ->
// maps and tables, driven by a single JSON config file.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seatex/seatex.hpp"

int main(int argc, char** argv) {
    CLI::App app{"seatex: superpixel texture segmentation with fuzzy/possibilistic "
                 "clustering and validity-driven feature selection"};
    app.require_subcommand(1);

    std::string config_path;
    std::string input_override;
    std::string out_override;
    std::int64_t seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run config (or a previous manifest)")
            ->required();
        sub->add_option("--input", input_override, "override the input image path");
        sub->add_option("--out", out_override, "override the output directory");
        sub->add_option("--seed", seed_override, "override the solver base seed");
    };

    CLI::App* fit = app.add_subcommand("fit", "cluster once and write per-cluster maps");
    CLI::App* select = app.add_subcommand("select", "forward feature selection");
    CLI::App* grid = app.add_subcommand("grid", "parameter grid search over a, m, q");
    CLI::App* baseline = app.add_subcommand("baseline", "score random feature subsets");
    CLI::App* features = app.add_subcommand("features", "dump the feature matrix as CSV");
    for (CLI::App* sub : {fit, select, grid, baseline, features}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        seatex::RunConfig cfg = seatex::load_config(config_path);
        cfg.mode = app.get_subcommands().front()->get_name();
        if (!input_override.empty()) {
            cfg.input_path = input_override;
            cfg.synthetic.reset();
        }
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (seed_override >= 0) cfg.solver.seed = static_cast<std::uint64_t>(seed_override);
        seatex::validate_config(cfg);
        return seatex::pipeline::run(cfg);
    } catch (const std::exception& e) {
        std::cerr << "seatex: error in config stage: " << e.what() << "\n";
        return 1;
    }
}
