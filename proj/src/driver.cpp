#include "granular/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "granular/diagnostics.hpp"
#include "granular/transport.hpp"

namespace granular {

const char* trigger_name(Trigger t) {
    switch (t) {
        case Trigger::None: return "None";
        case Trigger::MinDx: return "MinDx";
        case Trigger::MinDv: return "MinDv";
        case Trigger::ExitFlag: return "ExitFlag";
        case Trigger::Horizon: return "Horizon";
    }
    return "None";
}

void RunConfig::validate() const {
    if (N_x < 3 || N_v < 3) throw std::invalid_argument("config: grid sizes must be >= 3");
    if (!(dt0 > 0.0 && T_final > 0.0)) throw std::invalid_argument("config: dt0, T_final > 0");
    if (!(eps_v > 0.0 && eps_x > 0.0 && eps_t > 0.0))
        throw std::invalid_argument("config: thresholds must be positive");
    if (!(L_x > 0.0 && L_v > 0.0)) throw std::invalid_argument("config: domain sizes > 0");
    if (!(delta > 0.0 && delta < 1.0 && delta0 > 0.0 && delta0 < 1.0))
        throw std::invalid_argument("config: delta, delta0 in (0,1)");
    if (!(gamma >= 1.0)) throw std::invalid_argument("config: gamma >= 1");
}

namespace {

double max_value(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

HistoryRow history_row_1d(double t, double dt, const Grid1D& grid, const std::vector<double>& f,
                          int exit_flag) {
    HistoryRow row;
    row.t = t;
    row.dt = dt;
    row.mass = moment_1d(grid, f, 0, false);
    row.momentum = moment_1d(grid, f, 1, true);
    row.moment2 = moment_1d(grid, f, 2, false);
    row.moment3 = moment_1d(grid, f, 3, false);
    row.moment4 = moment_1d(grid, f, 4, false);
    row.entropy = entropy_1d(grid, f);
    row.min_dx = 0.0;
    row.min_dv = grid.min_spacing();
    row.max_f = max_value(f);
    row.exit_flag = exit_flag;
    return row;
}

HistoryRow history_row_2d(double t, double dt, const PhaseField& field, int exit_flag) {
    HistoryRow row;
    row.t = t;
    row.dt = dt;
    row.mass = moment(field, 0, false);
    row.momentum = moment(field, 1, true);
    row.moment2 = moment(field, 2, false);
    row.moment3 = moment(field, 3, false);
    row.moment4 = moment(field, 4, false);
    row.entropy = entropy(field);
    row.min_dx = field.x_grid.min_spacing();
    row.min_dv = field.v_grid.min_spacing();
    row.max_f = max_value(field.values);
    row.exit_flag = exit_flag;
    return row;
}

void track_step(ConservationStats& stats, const HistoryRow& prev, const HistoryRow& cur) {
    stats.max_mass_drift_rel =
        std::max(stats.max_mass_drift_rel,
                 std::fabs(cur.mass - stats.initial_mass) / stats.initial_mass);
    stats.max_momentum_drift =
        std::max(stats.max_momentum_drift, std::fabs(cur.momentum - stats.initial_momentum));
    stats.max_entropy_step_rise = std::max(stats.max_entropy_step_rise, cur.entropy - prev.entropy);
}

// One-bump or two-bump map from the concentration set of a profile; throws
// when the map cannot be built (caller keeps the previous grid).
MeshMap detect_and_build_map(const Grid1D& grid, const std::vector<double>& profile,
                             BumpKind kind, double delta0, double delta) {
    if (kind == BumpKind::OneBump) {
        const double r = concentration_radius_one_bump(grid, profile, delta0);
        return build_map_one_bump(r, delta, grid.half_length);
    }
    const auto [r1, r2] = concentration_radii_two_bump(grid, profile, delta0);
    const double min_sep = 2.0 * grid.half_length / grid.size();
    return build_map_two_bump(r1, r2, delta, grid.half_length, min_sep);
}

}  // namespace

HomogeneousResult run_homogeneous(const RunConfig& cfg, const std::function<double(double)>& g0,
                                  const HomogeneousCallback& on_step) {
    cfg.validate();
    const KernelSpec kspec{cfg.gamma, cfg.kernel_normalized};
    Grid1D grid = make_uniform_grid(cfg.L_v, cfg.N_v);
    const std::vector<double> s_nodes = make_uniform_s_nodes(cfg.N_v);

    std::vector<double> f(grid.size());
    for (int j = 0; j < grid.size(); ++j)
        f[j] = std::max(g0(grid.nodes[j]), kDensityFloor);
    if (!(max_value(f) > kDensityFloor))
        throw std::invalid_argument("run_homogeneous: initial profile has no mass");

    HomogeneousResult out;
    out.history.push_back(history_row_1d(0.0, cfg.dt0, grid, f, 0));
    out.stats.initial_mass = out.history.front().mass;
    out.stats.initial_momentum = out.history.front().momentum;
    if (on_step) on_step(0, 0.0, grid, f);

    double t = 0.0;
    double dt = cfg.dt0;
    Trigger trigger = Trigger::None;
    int b_v = 0;
    int step = 0;

    while (true) {
        if (t >= cfg.T_final) {
            trigger = Trigger::Horizon;
            break;
        }
        if (cfg.strategy == TimeStrategy::Fixed && grid.min_spacing() <= cfg.eps_v) {
            trigger = Trigger::MinDv;
            b_v = 1;
            break;
        }
        if (cfg.strategy == TimeStrategy::Adaptive && dt <= cfg.eps_t) {
            trigger = Trigger::ExitFlag;
            b_v = 1;
            break;
        }

        const CollisionOperator op = make_collision_operator(grid, kspec, cfg.lambda);
        const double m2_before = moment_1d(grid, f, 2, false);
        CollisionResult res;
        if (cfg.strategy == TimeStrategy::Adaptive) {
            auto [dt_new, r] = adapt_dt_on_failure(
                dt, cfg.eps_t, [&](double trial) { return solve_collision(f, trial, op, cfg.jko); });
            dt = dt_new;
            res = std::move(r);
        } else {
            res = solve_collision(f, dt, op, cfg.jko);
        }
        f = std::move(res.f);
        out.stats.max_collision_moment2_rise =
            std::max(out.stats.max_collision_moment2_rise,
                     moment_1d(grid, f, 2, false) - m2_before);

        ++step;
        if (step % cfg.refine_stride == 0) {
            try {
                const MeshMap map = detect_and_build_map(grid, f, cfg.bump_mode, cfg.delta0,
                                                         cfg.delta);
                auto [new_grid, new_f] = refine(grid, f, map, s_nodes);
                grid = std::move(new_grid);
                f = std::move(new_f);
            } catch (const std::runtime_error&) {
                // Map construction failed: keep the previous grid.
            }
        }

        t += dt;
        HistoryRow row = history_row_1d(t, dt, grid, f, res.exit_flag);
        track_step(out.stats, out.history.back(), row);
        out.history.push_back(row);
        if (on_step) on_step(step, t, grid, f);
    }

    out.report.T_b = t;
    out.report.B_v = b_v;
    out.report.B_x = 0;
    out.report.trigger = trigger;
    out.v_grid = std::move(grid);
    out.f = std::move(f);
    return out;
}

namespace {

// Per-axis projections (max over the complementary axis) feed the
// concentration detection for the 2D refinement.
std::vector<double> project_max_over_v(const PhaseField& field) {
    std::vector<double> proj(field.nx(), 0.0);
    for (int i = 0; i < field.nx(); ++i)
        for (int j = 0; j < field.nv(); ++j) proj[i] = std::max(proj[i], field.at(i, j));
    return proj;
}

std::vector<double> project_max_over_x(const PhaseField& field) {
    std::vector<double> proj(field.nv(), 0.0);
    for (int i = 0; i < field.nx(); ++i)
        for (int j = 0; j < field.nv(); ++j) proj[j] = std::max(proj[j], field.at(i, j));
    return proj;
}

// Dimensionwise regrid: interpolate along v for every x-row and rescale each
// row to its previous mass, then the same along x for every v-column.
PhaseField regrid_field(const PhaseField& field, const Grid1D& new_x, const Grid1D& new_v) {
    PhaseField mid;
    mid.x_grid = field.x_grid;
    mid.v_grid = new_v;
    mid.values.resize(static_cast<size_t>(field.nx()) * new_v.size());
    for (int i = 0; i < field.nx(); ++i) {
        const std::vector<double> row = field.row(i);
        const double row_mass = quadrature_mass(field.v_grid, row);
        std::vector<double> new_row = interpolate(field.v_grid, row, new_v.nodes);
        new_row = rescale_mass(new_v, std::move(new_row), row_mass);
        for (int j = 0; j < new_v.size(); ++j) mid.at(i, j) = new_row[j];
    }
    PhaseField out;
    out.x_grid = new_x;
    out.v_grid = new_v;
    out.values.resize(static_cast<size_t>(new_x.size()) * new_v.size());
    for (int j = 0; j < new_v.size(); ++j) {
        const std::vector<double> col = mid.column(j);
        const double col_mass = quadrature_mass(mid.x_grid, col);
        std::vector<double> new_col = interpolate(mid.x_grid, col, new_x.nodes);
        new_col = rescale_mass(new_x, std::move(new_col), col_mass);
        for (int i = 0; i < new_x.size(); ++i) out.at(i, j) = new_col[i];
    }
    return out;
}

}  // namespace

InhomogeneousResult run_inhomogeneous(const RunConfig& cfg,
                                      const std::function<double(double, double)>& f0,
                                      const InhomogeneousCallback& on_step) {
    cfg.validate();
    const KernelSpec kspec{cfg.gamma, cfg.kernel_normalized};
    PhaseField field = make_phase_field(make_uniform_grid(cfg.L_x, cfg.N_x),
                                        make_uniform_grid(cfg.L_v, cfg.N_v), f0);
    const std::vector<double> sx_nodes = make_uniform_s_nodes(cfg.N_x);
    const std::vector<double> sv_nodes = make_uniform_s_nodes(cfg.N_v);

    InhomogeneousResult out;
    out.history.push_back(history_row_2d(0.0, cfg.dt0, field, 0));
    out.stats.initial_mass = out.history.front().mass;
    out.stats.initial_momentum = out.history.front().momentum;
    if (on_step) on_step(0, 0.0, field);

    double t = 0.0;
    double dt = cfg.dt0;
    Trigger trigger = Trigger::None;
    int b_x = 0, b_v = 0;
    int step = 0;
    int last_exit_flag = 0;

    while (true) {
        if (t >= cfg.T_final) {
            trigger = Trigger::Horizon;
            break;
        }
        if (field.x_grid.min_spacing() <= cfg.eps_x) {
            trigger = Trigger::MinDx;
            b_x = 1;
            break;
        }
        if (field.v_grid.min_spacing() <= cfg.eps_v) {
            trigger = Trigger::MinDv;
            b_v = 1;
            break;
        }
        if (last_exit_flag == 1) {
            trigger = Trigger::ExitFlag;
            b_v = 1;
            break;
        }

        if (cfg.strategy == TimeStrategy::Adaptive) {
            dt = std::min(cfg.dt0,
                          std::min(0.9 * field.v_grid.min_spacing() / cfg.L_v,
                                   0.9 * field.x_grid.min_spacing() / cfg.L_x));
        }

        // Transport + per-column collision at step size dt; on failure under
        // the adaptive strategy the whole split step is redone at dt/2.
        double m2_pre_collision = 0.0;
        auto split_step = [&](double trial_dt) {
            struct StepResult {
                PhaseField field;
                int exit_flag;
            };
            PhaseField advected = transport_step(field, field.x_grid, trial_dt);
            m2_pre_collision = moment(advected, 2, false);
            const CollisionOperator op =
                make_collision_operator(advected.v_grid, kspec, cfg.lambda);
            int any_flag = 0;
            const int nx = advected.nx();
#pragma omp parallel for schedule(dynamic) reduction(max : any_flag)
            for (int i = 0; i < nx; ++i) {
                CollisionResult res =
                    solve_collision(advected.row(i), trial_dt, op, cfg.jko);
                for (int j = 0; j < advected.nv(); ++j) advected.at(i, j) = res.f[j];
                any_flag = std::max(any_flag, res.exit_flag);
            }
            return StepResult{std::move(advected), any_flag};
        };

        std::pair<double, decltype(split_step(dt))> stepped =
            cfg.strategy == TimeStrategy::Adaptive
                ? adapt_dt_on_failure(dt, cfg.eps_t, split_step)
                : std::make_pair(dt, split_step(dt));
        dt = stepped.first;
        field = std::move(stepped.second.field);
        last_exit_flag = stepped.second.exit_flag;
        out.stats.max_collision_moment2_rise =
            std::max(out.stats.max_collision_moment2_rise,
                     moment(field, 2, false) - m2_pre_collision);

        ++step;
        if (step % cfg.refine_stride == 0) {
            Grid1D new_x = field.x_grid;
            Grid1D new_v = field.v_grid;
            bool regrid = false;
            try {
                const MeshMap map_x = detect_and_build_map(
                    field.x_grid, project_max_over_v(field), cfg.bump_mode, cfg.delta0, cfg.delta);
                new_x = make_grid_from_nodes(cfg.L_x, [&] {
                    std::vector<double> nodes(sx_nodes.size());
                    for (size_t k = 0; k < sx_nodes.size(); ++k)
                        nodes[k] = map_x.eval_odd(sx_nodes[k]);
                    return nodes;
                }());
                regrid = true;
            } catch (const std::runtime_error&) {
            }
            try {
                const MeshMap map_v = detect_and_build_map(
                    field.v_grid, project_max_over_x(field), cfg.bump_mode, cfg.delta0, cfg.delta);
                new_v = make_grid_from_nodes(cfg.L_v, [&] {
                    std::vector<double> nodes(sv_nodes.size());
                    for (size_t k = 0; k < sv_nodes.size(); ++k)
                        nodes[k] = map_v.eval_odd(sv_nodes[k]);
                    return nodes;
                }());
                regrid = true;
            } catch (const std::runtime_error&) {
            }
            if (regrid) field = regrid_field(field, new_x, new_v);
        }

        t += dt;
        HistoryRow row = history_row_2d(t, dt, field, last_exit_flag);
        track_step(out.stats, out.history.back(), row);
        out.history.push_back(row);
        if (on_step) on_step(step, t, field);
    }

    out.report.T_b = t;
    out.report.B_x = b_x;
    out.report.B_v = b_v;
    out.report.trigger = trigger;
    out.field = std::move(field);
    return out;
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_history_csv: cannot open " + path);
    std::fprintf(fp,
                 "t,dt,mass,momentum,moment2,moment3,moment4,entropy,min_dx,min_dv,max_f,"
                 "exit_flag\n");
    for (const auto& r : history)
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                     r.t, r.dt, r.mass, r.momentum, r.moment2, r.moment3, r.moment4, r.entropy,
                     r.min_dx, r.min_dv, r.max_f, r.exit_flag);
    std::fclose(fp);
}

}  // namespace granular
