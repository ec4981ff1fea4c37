#include "granular/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "granular/diagnostics.hpp"

namespace granular {

namespace {

double param(const std::map<std::string, double>& params, const std::string& key,
             std::optional<double> fallback = std::nullopt) {
    auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (fallback) return *fallback;
    throw std::invalid_argument("initial condition: missing parameter '" + key + "'");
}

}  // namespace

std::vector<std::string> initial_condition_registry() {
    return {"g1", "g2", "g3", "g4", "in_two", "f0", "ic_g2"};
}

static std::string registry_message(const std::string& name) {
    std::string msg = "unknown initial condition '" + name + "'; known:";
    for (const auto& n : initial_condition_registry()) msg += " " + n;
    return msg;
}

std::function<double(double)> build_initial_profile(const std::string& name,
                                                    const std::map<std::string, double>& params) {
    (void)params;
    if (name == "g1") return [](double v) { return std::exp(-2.0 * v * v); };
    if (name == "g2") return [](double v) { return 2.0 * std::exp(-2.0 * v * v); };
    if (name == "g3") return [](double v) { return 4.0 * std::exp(-2.0 * v * v); };
    if (name == "g4" || name == "in_two")
        return [](double v) {
            return std::exp(-10.0 * (v - 1.5) * (v - 1.5)) + std::exp(-10.0 * (v + 1.5) * (v + 1.5));
        };
    throw std::invalid_argument(registry_message(name));
}

std::function<double(double, double)> build_initial_field(
    const std::string& name, const std::map<std::string, double>& params) {
    if (name == "f0") {
        const double a = param(params, "a");
        const double b = param(params, "b");
        const double c = param(params, "c");
        const double d = param(params, "d");
        return [=](double x, double v) {
            return std::exp(-a * (x + c) * (x + c)) * std::exp(-b * (v - d) * (v - d)) +
                   std::exp(-a * (x - c) * (x - c)) * std::exp(-b * (v + d) * (v + d));
        };
    }
    if (name == "ic_g2") {
        const double a = param(params, "a");
        const double b = param(params, "b");
        const double x1 = param(params, "x1");
        const double pref = 1.0 / std::sqrt(2.0 * M_PI);
        return [=](double x, double v) {
            const double core = pref * std::exp(-a * (b * x + v) * (b * x + v));
            const double ax = std::fabs(x);
            if (ax <= x1) return core;
            return core * std::exp(-1000.0 * (ax - x1) * (ax - x1));
        };
    }
    // Homogeneous profiles lifted to 2D are not provided on purpose: the
    // inhomogeneous runs all use the named 2D data.
    throw std::invalid_argument(registry_message(name));
}

namespace {

std::string mode_name(ScenarioMode m) {
    switch (m) {
        case ScenarioMode::Homogeneous: return "homogeneous";
        case ScenarioMode::Inhomogeneous: return "inhomogeneous";
        case ScenarioMode::SelfSimilar: return "selfsimilar";
    }
    return "homogeneous";
}

ScenarioMode mode_from(const std::string& s) {
    if (s == "homogeneous") return ScenarioMode::Homogeneous;
    if (s == "inhomogeneous") return ScenarioMode::Inhomogeneous;
    if (s == "selfsimilar") return ScenarioMode::SelfSimilar;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void assign_key(Scenario& sc, const std::string& key, const std::string& value) {
    auto d = [&] { return std::stod(value); };
    auto i = [&] { return std::stoi(value); };
    if (key == "mode") sc.mode = mode_from(value);
    else if (key == "gamma") sc.cfg.gamma = d();
    else if (key == "kernel_normalized") sc.cfg.kernel_normalized = (value == "true" || value == "1");
    else if (key == "lambda") sc.cfg.lambda = d();
    else if (key == "L_x") sc.cfg.L_x = d();
    else if (key == "L_v") sc.cfg.L_v = d();
    else if (key == "N_x") sc.cfg.N_x = i();
    else if (key == "N_v") sc.cfg.N_v = i();
    else if (key == "dt0") sc.cfg.dt0 = d();
    else if (key == "strategy") {
        if (value == "fixed") sc.cfg.strategy = TimeStrategy::Fixed;
        else if (value == "adaptive") sc.cfg.strategy = TimeStrategy::Adaptive;
        else throw std::invalid_argument("unknown strategy '" + value + "'");
    } else if (key == "T_final") sc.cfg.T_final = d();
    else if (key == "eps_v") sc.cfg.eps_v = d();
    else if (key == "eps_x") sc.cfg.eps_x = d();
    else if (key == "eps_t") sc.cfg.eps_t = d();
    else if (key == "delta0") sc.cfg.delta0 = d();
    else if (key == "delta") sc.cfg.delta = d();
    else if (key == "bump_mode") {
        if (value == "one") sc.cfg.bump_mode = BumpKind::OneBump;
        else if (value == "two") sc.cfg.bump_mode = BumpKind::TwoBump;
        else throw std::invalid_argument("unknown bump_mode '" + value + "'");
    } else if (key == "refine_stride") sc.cfg.refine_stride = i();
    else if (key == "jko_beta") sc.cfg.jko.beta = d();
    else if (key == "jko_omega") sc.cfg.jko.omega = d();
    else if (key == "jko_max_iter") sc.cfg.jko.max_iter = i();
    else if (key == "jko_tol") sc.cfg.jko.tol = d();
    else if (key == "jko_diag_floor") sc.cfg.jko.diag_floor = d();
    else if (key == "ic") sc.ic_name = value;
    else if (key.rfind("ic_", 0) == 0) sc.ic_params[key.substr(3)] = d();
    else if (key == "ss_rho0") sc.ss.rho0 = d();
    else if (key == "ss_m0") sc.ss.m0 = d();
    else if (key == "ss_b0") sc.ss.b0 = d();
    else if (key == "ss_lambda") sc.ss.lambda = d();
    else if (key == "ss_beta") sc.ss.beta = d();
    else if (key == "ss_t_end") sc.ss_t_end = d();
    else if (key == "ss_samples") sc.ss_samples = i();
    else if (key == "stride") sc.stride = i();
    else if (key == "expect_Tb") sc.expect_tb = d();
    else if (key == "expect_Tb_tol") sc.expect_tb_tol = d();
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<Scenario> parse_scenarios(const std::string& text) {
    std::vector<Scenario> result;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            Scenario sc;
            sc.name = trim(line.substr(1, line.size() - 2));
            for (const auto& existing : result)
                if (existing.name == sc.name)
                    throw std::invalid_argument("duplicate scenario name '" + sc.name + "'");
            result.push_back(std::move(sc));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || result.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value inside a [section]");
        assign_key(result.back(), trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (result.empty()) throw std::invalid_argument("config: no scenarios found");
    return result;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenarios(ss.str());
}

std::string serialize_scenarios(const std::vector<Scenario>& scenarios) {
    std::ostringstream out;
    for (const auto& sc : scenarios) {
        out << "[" << sc.name << "]\n";
        out << "mode = " << mode_name(sc.mode) << "\n";
        if (sc.mode == ScenarioMode::SelfSimilar) {
            out << "ss_rho0 = " << fmt(sc.ss.rho0) << "\n";
            out << "ss_m0 = " << fmt(sc.ss.m0) << "\n";
            out << "ss_b0 = " << fmt(sc.ss.b0) << "\n";
            out << "ss_lambda = " << fmt(sc.ss.lambda) << "\n";
            out << "ss_beta = " << fmt(sc.ss.beta) << "\n";
            out << "ss_t_end = " << fmt(sc.ss_t_end) << "\n";
            out << "ss_samples = " << sc.ss_samples << "\n";
        } else {
            out << "gamma = " << fmt(sc.cfg.gamma) << "\n";
            out << "kernel_normalized = " << (sc.cfg.kernel_normalized ? "true" : "false") << "\n";
            out << "lambda = " << fmt(sc.cfg.lambda) << "\n";
            if (sc.mode == ScenarioMode::Inhomogeneous) {
                out << "L_x = " << fmt(sc.cfg.L_x) << "\n";
                out << "N_x = " << sc.cfg.N_x << "\n";
            }
            out << "L_v = " << fmt(sc.cfg.L_v) << "\n";
            out << "N_v = " << sc.cfg.N_v << "\n";
            out << "dt0 = " << fmt(sc.cfg.dt0) << "\n";
            out << "strategy = "
                << (sc.cfg.strategy == TimeStrategy::Fixed ? "fixed" : "adaptive") << "\n";
            out << "T_final = " << fmt(sc.cfg.T_final) << "\n";
            out << "eps_v = " << fmt(sc.cfg.eps_v) << "\n";
            out << "eps_x = " << fmt(sc.cfg.eps_x) << "\n";
            out << "eps_t = " << fmt(sc.cfg.eps_t) << "\n";
            out << "delta0 = " << fmt(sc.cfg.delta0) << "\n";
            out << "delta = " << fmt(sc.cfg.delta) << "\n";
            out << "bump_mode = " << (sc.cfg.bump_mode == BumpKind::OneBump ? "one" : "two")
                << "\n";
            out << "refine_stride = " << sc.cfg.refine_stride << "\n";
            out << "jko_beta = " << fmt(sc.cfg.jko.beta) << "\n";
            out << "jko_omega = " << fmt(sc.cfg.jko.omega) << "\n";
            out << "jko_max_iter = " << sc.cfg.jko.max_iter << "\n";
            out << "jko_tol = " << fmt(sc.cfg.jko.tol) << "\n";
            out << "jko_diag_floor = " << fmt(sc.cfg.jko.diag_floor) << "\n";
            out << "ic = " << sc.ic_name << "\n";
            for (const auto& [k, v] : sc.ic_params) out << "ic_" << k << " = " << fmt(v) << "\n";
        }
        out << "stride = " << sc.stride << "\n";
        if (sc.expect_tb) {
            out << "expect_Tb = " << fmt(*sc.expect_tb) << "\n";
            out << "expect_Tb_tol = " << fmt(sc.expect_tb_tol) << "\n";
        }
        out << "\n";
    }
    return out.str();
}

void apply_override(std::vector<Scenario>& scenarios, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must look like key=value: " + assignment);
    std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    std::string section;
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
        section = key.substr(0, dot);
        key = key.substr(dot + 1);
    }
    bool applied = false;
    for (auto& sc : scenarios) {
        if (!section.empty() && sc.name != section) continue;
        assign_key(sc, key, value);
        applied = true;
    }
    if (!applied) throw std::invalid_argument("override matched no scenario: " + assignment);
}

ScenarioOutcome run_scenario(const Scenario& sc, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(out_dir) / sc.name;
    fs::create_directories(dir);

    nlohmann::json summary;
    summary["name"] = sc.name;
    summary["mode"] = mode_name(sc.mode);
    ScenarioOutcome outcome;

    auto snapshot_path = [&](int step) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "snapshot_%06d.txt", step);
        return (dir / buf).string();
    };

    if (sc.mode == ScenarioMode::SelfSimilar) {
        const double T = sc.ss.blowup_time();
        const double t_end = sc.ss_t_end > 0.0 ? sc.ss_t_end : 0.9 * T;
        write_selfsimilar_curves((dir / "curves.csv").string(), sc.ss, t_end, sc.ss_samples);
        summary["T"] = T;
        summary["t_end"] = t_end;
        const Criticality c = classify_threshold(sc.ss.lambda, sc.ss.rho0, T);
        summary["criticality"] = c == Criticality::Supercritical ? "supercritical"
                                 : c == Criticality::Critical    ? "critical"
                                                                 : "subcritical";
    } else if (sc.mode == ScenarioMode::Homogeneous) {
        const auto g0 = build_initial_profile(sc.ic_name, sc.ic_params);
        HomogeneousCallback cb;
        if (sc.stride > 0)
            cb = [&](int step, double t, const Grid1D& grid, const std::vector<double>& f) {
                if (step % sc.stride != 0) return;
                write_profile_snapshot(snapshot_path(step), t, grid, f);
            };
        const HomogeneousResult res = run_homogeneous(sc.cfg, g0, cb);
        write_history_csv((dir / "history.csv").string(), res.history);
        summary["T_b"] = res.report.T_b;
        summary["B_x"] = res.report.B_x;
        summary["B_v"] = res.report.B_v;
        summary["trigger"] = trigger_name(res.report.trigger);
        summary["mass_initial"] = res.history.front().mass;
        summary["mass_final"] = res.history.back().mass;
        summary["momentum_initial"] = res.history.front().momentum;
        summary["momentum_final"] = res.history.back().momentum;
        summary["max_mass_drift_rel"] = res.stats.max_mass_drift_rel;
        outcome.blowup_triggered = res.report.B_v == 1 || res.report.B_x == 1;
        if (sc.expect_tb) {
            summary["acceptance"] = {
                {"expected_Tb", *sc.expect_tb},
                {"tol", sc.expect_tb_tol},
                {"pass", std::fabs(res.report.T_b - *sc.expect_tb) <= sc.expect_tb_tol}};
        }
    } else {
        const auto f0 = build_initial_field(sc.ic_name, sc.ic_params);
        InhomogeneousCallback cb;
        if (sc.stride > 0)
            cb = [&](int step, double t, const PhaseField& field) {
                if (step % sc.stride != 0) return;
                write_snapshot(snapshot_path(step), t, field);
            };
        const InhomogeneousResult res = run_inhomogeneous(sc.cfg, f0, cb);
        write_history_csv((dir / "history.csv").string(), res.history);
        summary["T_b"] = res.report.T_b;
        summary["B_x"] = res.report.B_x;
        summary["B_v"] = res.report.B_v;
        summary["trigger"] = trigger_name(res.report.trigger);
        summary["mass_initial"] = res.history.front().mass;
        summary["mass_final"] = res.history.back().mass;
        summary["momentum_initial"] = res.history.front().momentum;
        summary["momentum_final"] = res.history.back().momentum;
        summary["max_mass_drift_rel"] = res.stats.max_mass_drift_rel;
        summary["log_ratio_rho_m"] = log_ratio_rho_m(res.field);
        outcome.blowup_triggered = res.report.B_v == 1 || res.report.B_x == 1;
        if (sc.expect_tb) {
            summary["acceptance"] = {
                {"expected_Tb", *sc.expect_tb},
                {"tol", sc.expect_tb_tol},
                {"pass", std::fabs(res.report.T_b - *sc.expect_tb) <= sc.expect_tb_tol}};
        }
    }
    summary["eps_v"] = sc.cfg.eps_v;
    summary["eps_x"] = sc.cfg.eps_x;
    summary["eps_t"] = sc.cfg.eps_t;

    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
    outcome.summary_json = summary.dump(2);
    return outcome;
}

}  // namespace granular
