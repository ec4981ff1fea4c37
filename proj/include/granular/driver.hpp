#pragma once

#include <functional>
#include <vector>

#include "granular/grid.hpp"
#include "granular/jko.hpp"
#include "granular/meshmap.hpp"

namespace granular {

enum class TimeStrategy { Fixed, Adaptive };
enum class Trigger { None, MinDx, MinDv, ExitFlag, Horizon };

const char* trigger_name(Trigger t);

struct RunConfig {
    double gamma = 2.0;
    bool kernel_normalized = false;
    double lambda = 2.0;
    double L_x = 4.0;
    double L_v = 4.0;
    int N_x = 61;
    int N_v = 121;
    double dt0 = 0.01;
    TimeStrategy strategy = TimeStrategy::Fixed;
    double T_final = 1.0;
    double eps_v = 1e-3 / 16.0;  // minimum-mesh blow-up threshold in v
    double eps_x = 1e-3 / 16.0;  // minimum-mesh blow-up threshold in x
    double eps_t = 5e-6;         // minimum time step for the halving loop
    double delta0 = 0.5;
    double delta = 0.5;
    BumpKind bump_mode = BumpKind::OneBump;
    int refine_stride = 1;
    JkoOptions jko;

    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

struct BlowupReport {
    double T_b = 0.0;
    int B_x = 0;
    int B_v = 0;
    Trigger trigger = Trigger::None;
};

struct HistoryRow {
    double t = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double momentum = 0.0;
    double moment2 = 0.0;
    double moment3 = 0.0;
    double moment4 = 0.0;
    double entropy = 0.0;
    double min_dx = 0.0;
    double min_dv = 0.0;
    double max_f = 0.0;
    int exit_flag = 0;
};

// Running extrema of the structure-preservation checks, accumulated over the
// whole evolution.
struct ConservationStats {
    double initial_mass = 0.0;
    double initial_momentum = 0.0;
    double max_mass_drift_rel = 0.0;
    double max_momentum_drift = 0.0;
    double max_collision_moment2_rise = 0.0;
    double max_entropy_step_rise = 0.0;
};

struct HomogeneousResult {
    std::vector<HistoryRow> history;
    BlowupReport report;
    Grid1D v_grid;
    std::vector<double> f;
    ConservationStats stats;
};

struct InhomogeneousResult {
    std::vector<HistoryRow> history;
    BlowupReport report;
    PhaseField field;
    ConservationStats stats;
};

using HomogeneousCallback =
    std::function<void(int step, double t, const Grid1D&, const std::vector<double>&)>;
using InhomogeneousCallback = std::function<void(int step, double t, const PhaseField&)>;

// Halve dt until the solve converges or dt reaches eps_t; returns the final
// step size together with the last solve result.
template <class Solve>
auto adapt_dt_on_failure(double dt, double eps_t, Solve&& solve) {
    auto result = solve(dt);
    while (result.exit_flag == 1 && dt > eps_t) {
        dt *= 0.5;
        result = solve(dt);
    }
    return std::make_pair(dt, result);
}

// Mesh-refinement JKO evolution of the homogeneous equation with fixed or
// adaptive time stepping; stops on the horizon, on mesh collapse (Fixed), or
// on time-step collapse (Adaptive).
HomogeneousResult run_homogeneous(const RunConfig& cfg, const std::function<double(double)>& g0,
                                  const HomogeneousCallback& on_step = {});

// Split-step evolution of the full kinetic equation: transport, per-column
// collision solves, per-axis mesh refinement with dimensionwise rescale.
InhomogeneousResult run_inhomogeneous(const RunConfig& cfg,
                                      const std::function<double(double, double)>& f0,
                                      const InhomogeneousCallback& on_step = {});

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history);

}  // namespace granular
