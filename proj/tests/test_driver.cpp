#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "granular/driver.hpp"

using namespace granular;

namespace {

struct FakeResult {
    int exit_flag = 0;
};

}  // namespace

TEST_CASE("adapt_dt_on_failure halving behavior") {
    SUBCASE("immediate convergence keeps dt") {
        auto [dt, res] = adapt_dt_on_failure(0.01, 1e-6, [](double) { return FakeResult{0}; });
        CHECK(dt == doctest::Approx(0.01));
        CHECK(res.exit_flag == 0);
    }
    SUBCASE("two failures quarter the step") {
        int calls = 0;
        auto [dt, res] = adapt_dt_on_failure(0.01, 1e-6, [&](double) {
            ++calls;
            return FakeResult{calls <= 2 ? 1 : 0};
        });
        CHECK(dt == doctest::Approx(0.0025));
        CHECK(res.exit_flag == 0);
        CHECK(calls == 3);
    }
    SUBCASE("persistent failure stops at eps_t") {
        auto [dt, res] = adapt_dt_on_failure(0.01, 1e-4, [](double) { return FakeResult{1}; });
        CHECK(dt <= 1e-4);
        CHECK(dt > 0.5e-4);
        CHECK(res.exit_flag == 1);
    }
}

TEST_CASE("homogeneous run: structure preservation on a short g1 evolution") {
    RunConfig cfg;
    cfg.gamma = 1.0;
    cfg.kernel_normalized = false;
    cfg.lambda = 2.0;
    cfg.L_v = 4.0;
    cfg.N_v = 81;
    cfg.dt0 = 0.01;
    cfg.strategy = TimeStrategy::Fixed;
    cfg.T_final = 0.1;
    cfg.eps_v = 1e-6;
    cfg.delta0 = 0.5;
    cfg.delta = 0.5;
    cfg.bump_mode = BumpKind::OneBump;

    const HomogeneousResult res =
        run_homogeneous(cfg, [](double v) { return std::exp(-2.0 * v * v); });

    CHECK(res.report.trigger == Trigger::Horizon);
    CHECK(res.report.B_v == 0);
    CHECK(res.history.size() == 11);  // t=0 row plus 10 steps
    CHECK(res.stats.max_mass_drift_rel < 1e-10);
    CHECK(res.stats.max_collision_moment2_rise < 1e-8);
    CHECK(res.stats.max_entropy_step_rise < 1e-6);
    CHECK(std::fabs(res.history.back().momentum) < 1e-10);
    for (const auto& row : res.history) {
        CHECK(row.exit_flag == 0);
        CHECK(row.min_dv > 0.0);
    }
    // Refinement concentrated nodes around the bump.
    CHECK(res.history.back().min_dv < res.history.front().min_dv);
}

TEST_CASE("homogeneous run: mesh collapse triggers MinDv under the fixed strategy") {
    RunConfig cfg;
    cfg.gamma = 1.0;
    cfg.kernel_normalized = false;
    cfg.lambda = 2.0;
    cfg.L_v = 4.0;
    cfg.N_v = 61;
    cfg.dt0 = 0.01;
    cfg.strategy = TimeStrategy::Fixed;
    cfg.T_final = 5.0;
    cfg.eps_v = 0.02;  // loose threshold so the trigger fires quickly
    cfg.bump_mode = BumpKind::OneBump;

    const HomogeneousResult res =
        run_homogeneous(cfg, [](double v) { return 4.0 * std::exp(-2.0 * v * v); });
    CHECK(res.report.trigger == Trigger::MinDv);
    CHECK(res.report.B_v == 1);
    CHECK(res.report.T_b < 5.0);
}

TEST_CASE("inhomogeneous run: two-bump field stays conservative over a few steps") {
    RunConfig cfg;
    cfg.gamma = 3.0;
    cfg.kernel_normalized = false;
    cfg.lambda = 4.0;
    cfg.L_x = 4.0;
    cfg.L_v = 4.0;
    cfg.N_x = 31;
    cfg.N_v = 31;
    cfg.dt0 = 0.05;
    cfg.strategy = TimeStrategy::Fixed;
    cfg.T_final = 0.25;
    cfg.eps_v = 1e-6;
    cfg.eps_x = 1e-6;
    cfg.delta0 = 0.02;
    cfg.delta = 0.5;
    cfg.bump_mode = BumpKind::TwoBump;

    auto f0 = [](double x, double v) {
        return std::exp(-6.0 * (x + 1.5) * (x + 1.5)) * std::exp(-6.0 * (v - 2.0) * (v - 2.0)) +
               std::exp(-6.0 * (x - 1.5) * (x - 1.5)) * std::exp(-6.0 * (v + 2.0) * (v + 2.0));
    };
    int callbacks = 0;
    const InhomogeneousResult res =
        run_inhomogeneous(cfg, f0, [&](int, double, const PhaseField&) { ++callbacks; });

    CHECK(res.report.trigger == Trigger::Horizon);
    CHECK(res.report.B_x == 0);
    CHECK(res.report.B_v == 0);
    CHECK(callbacks == static_cast<int>(res.history.size()));
    CHECK(res.stats.max_mass_drift_rel < 1e-8);
    CHECK(res.stats.max_collision_moment2_rise < 1e-8);
    CHECK(res.stats.max_entropy_step_rise < 1e-6);
    // Central symmetry f(-x,-v) = f(x,v) of the data survives the splitting.
    const int nx = res.field.nx(), nv = res.field.nv();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nv; ++j)
            CHECK(res.field.at(i, j) ==
                  doctest::Approx(res.field.at(nx - 1 - i, nv - 1 - j)).epsilon(1e-6));
}

TEST_CASE("history CSV columns") {
    std::vector<HistoryRow> hist(2);
    hist[1].t = 0.5;
    hist[1].exit_flag = 1;
    const std::string path = "history_test_tmp.csv";
    write_history_csv(path, hist);
    std::FILE* fp = std::fopen(path.c_str(), "r");
    REQUIRE(fp != nullptr);
    char line[512];
    REQUIRE(std::fgets(line, sizeof line, fp) != nullptr);
    CHECK(std::string(line) ==
          "t,dt,mass,momentum,moment2,moment3,moment4,entropy,min_dx,min_dv,max_f,exit_flag\n");
    std::fclose(fp);
    std::remove(path.c_str());
}
