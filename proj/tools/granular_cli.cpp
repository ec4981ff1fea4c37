#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "granular/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Structure-preserving simulator for the 1D granular kinetic equation"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "Run every scenario in a config file");
    std::string scenario_file;
    std::string out_dir = "out";
    int stride = -1;
    bool dry_run = false;
    std::vector<std::string> overrides;
    run->add_option("scenario-file", scenario_file, "Flat key=value scenario file")->required();
    run->add_option("--out", out_dir, "Output directory (one subdirectory per scenario)");
    run->add_option("--stride", stride, "Snapshot stride (overrides per-scenario stride)");
    run->add_flag("--dry-run", dry_run, "Echo the parsed configuration and exit");
    run->add_option("--override", overrides, "key=value or section.key=value, repeatable");

    CLI11_PARSE(app, argc, argv);

    try {
        std::vector<granular::Scenario> scenarios = granular::load_scenarios(scenario_file);
        for (const auto& o : overrides) granular::apply_override(scenarios, o);
        if (stride >= 0)
            for (auto& sc : scenarios) sc.stride = stride;

        if (dry_run) {
            std::cout << granular::serialize_scenarios(scenarios);
            return 0;
        }

        bool any_blowup = false;
        for (const auto& sc : scenarios) {
            const granular::ScenarioOutcome outcome = granular::run_scenario(sc, out_dir);
            std::cout << outcome.summary_json << "\n";
            any_blowup = any_blowup || outcome.blowup_triggered;
        }
        return any_blowup ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
