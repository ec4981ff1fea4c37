#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "granular/analytic.hpp"
#include "granular/driver.hpp"

namespace granular {

enum class ScenarioMode { Homogeneous, Inhomogeneous, SelfSimilar };

// Named initial profiles from the experiments; parameters are free where the
// formula has them.
std::function<double(double)> build_initial_profile(const std::string& name,
                                                    const std::map<std::string, double>& params);
std::function<double(double, double)> build_initial_field(
    const std::string& name, const std::map<std::string, double>& params);

std::vector<std::string> initial_condition_registry();

struct Scenario {
    std::string name;
    ScenarioMode mode = ScenarioMode::Homogeneous;
    RunConfig cfg;
    std::string ic_name = "g1";
    std::map<std::string, double> ic_params;
    SelfSimilarParams ss;
    double ss_t_end = 0.0;
    int ss_samples = 200;
    int stride = 0;  // snapshot stride; 0 disables snapshots
    std::optional<double> expect_tb;
    double expect_tb_tol = 0.0;

    bool operator==(const Scenario&) const = default;
};

// Flat key=value text with one [section] per scenario; '#' starts a comment.
std::vector<Scenario> parse_scenarios(const std::string& text);
std::vector<Scenario> load_scenarios(const std::string& path);
std::string serialize_scenarios(const std::vector<Scenario>& scenarios);

// Apply `key=value` or `section.key=value` overrides in place.
void apply_override(std::vector<Scenario>& scenarios, const std::string& assignment);

struct ScenarioOutcome {
    std::string summary_json;  // serialized summary for this scenario
    bool blowup_triggered = false;
};

// Executes one scenario, writing history.csv, snapshots on the stride, and
// summary.json into out_dir/<scenario-name>/.
ScenarioOutcome run_scenario(const Scenario& sc, const std::string& out_dir);

}  // namespace granular
