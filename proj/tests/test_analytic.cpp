#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "granular/analytic.hpp"

using namespace granular;

TEST_CASE("closed form at t = 0 and fixed-width critical case") {
    SelfSimilarParams p{0.5, 2.0, -4.0, 3.0, 0.0};
    const SelfSimilarState s0 = closed_form(p, 0.0);
    CHECK(s0.rho == doctest::Approx(0.5));
    CHECK(s0.m == doctest::Approx(2.0));
    CHECK(s0.b == doctest::Approx(-4.0));
    CHECK(s0.inv_sqrt_a == doctest::Approx(0.25));

    // lambda rho0 T = 2 makes the width exponent vanish.
    SelfSimilarParams crit{0.5, 1.0, -4.0, 16.0, 0.0};
    const double T = crit.blowup_time();
    CHECK(crit.lambda * crit.rho0 * T == doctest::Approx(2.0));
    for (double t : {0.1 * T, 0.5 * T, 0.9 * T})
        CHECK(closed_form(crit, t).inv_sqrt_a == doctest::Approx(0.5));

    SelfSimilarParams b10{1.0, 1.0, -10.0, 1.0, 0.0};
    CHECK(b10.blowup_time() == doctest::Approx(0.1));

    CHECK_THROWS(closed_form(p, p.blowup_time()));
}

TEST_CASE("closed form vs RK4 oracle over random parameter draws") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> rho_d(0.2, 2.0), m_d(0.2, 3.0), b_d(-8.0, -0.5),
        lam_d(0.5, 6.0);
    for (int trial = 0; trial < 20; ++trial) {
        SelfSimilarParams p{rho_d(rng), m_d(rng), b_d(rng), lam_d(rng), 0.0};
        const double T = p.blowup_time();
        const double t = 0.9 * T;
        const SelfSimilarState exact = closed_form(p, t);
        const SelfSimilarState ode = integrate_ode(p, t, T / 1e5);
        CHECK(ode.rho == doctest::Approx(exact.rho).epsilon(1e-8));
        CHECK(ode.m == doctest::Approx(exact.m).epsilon(1e-8));
        CHECK(ode.b == doctest::Approx(exact.b).epsilon(1e-8));
    }
}

TEST_CASE("closed form satisfies the ODE residual at sampled times") {
    SelfSimilarParams p{0.7, 1.3, -2.0, 2.5, 0.0};
    const double T = p.blowup_time();
    for (double t : {0.1 * T, 0.4 * T, 0.8 * T}) {
        const double h = 1e-6 * T;
        const SelfSimilarState sm = closed_form(p, t - h);
        const SelfSimilarState s0 = closed_form(p, t);
        const SelfSimilarState sp = closed_form(p, t + h);
        const double drho = (sp.rho - sm.rho) / (2.0 * h);
        const double dm = (sp.m - sm.m) / (2.0 * h);
        const double db = (sp.b - sm.b) / (2.0 * h);
        CHECK(drho == doctest::Approx(-s0.b * s0.rho).epsilon(1e-8));
        CHECK(dm == doctest::Approx(0.5 * p.lambda * s0.rho * s0.m).epsilon(1e-8));
        CHECK(db == doctest::Approx(-s0.b * s0.b).epsilon(1e-8));
    }
}

TEST_CASE("decoupled system at lambda = 0") {
    SelfSimilarParams p{1.2, 0.9, -1.0, 0.0, 0.0};
    const SelfSimilarState s = integrate_ode(p, 0.5, 1e-5);
    CHECK(s.m == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(s.rho == doctest::Approx(1.2 * 1.0 / 0.5).epsilon(1e-8));
}

TEST_CASE("gamma > 2: m(t)(T-t) approaches a constant on dyadic samples") {
    SelfSimilarParams p{1.0, 1.0, -2.0, 3.0, 1.0};  // beta = 1, i.e. gamma = 3
    const double T = p.blowup_time();
    std::vector<double> products;
    for (int k = 4; k <= 10; ++k) {
        const double t = T * (1.0 - std::pow(2.0, -k));
        const SelfSimilarState s = integrate_ode(p, t, T * std::pow(2.0, -k) / 2000.0);
        products.push_back(s.m * (T - t));
    }
    for (size_t i = 1; i < products.size(); ++i) {
        CHECK(products[i] > 0.0);
        CHECK(products[i] == doctest::Approx(products.back()).epsilon(0.05));
    }
}

TEST_CASE("width monotonicity across the threshold") {
    const double T = 0.5;
    SelfSimilarParams super{1.0, 1.0, -2.0, 5.0, 0.0};   // lambda rho0 T = 2.5
    SelfSimilarParams sub{1.0, 1.0, -2.0, 2.0, 0.0};     // lambda rho0 T = 1.0
    double prev_super = closed_form(super, 0.0).inv_sqrt_a;
    double prev_sub = closed_form(sub, 0.0).inv_sqrt_a;
    for (int k = 1; k <= 20; ++k) {
        const double t = 0.95 * T * k / 20.0;
        const double ws = closed_form(super, t).inv_sqrt_a;
        const double wb = closed_form(sub, t).inv_sqrt_a;
        CHECK(ws < prev_super);
        CHECK(wb > prev_sub);
        prev_super = ws;
        prev_sub = wb;
    }
}

TEST_CASE("threshold classification") {
    CHECK(classify_threshold(2.5, 1.0, 1.0) == Criticality::Supercritical);
    CHECK(classify_threshold(1.0, 1.0, 1.0) == Criticality::Subcritical);
    CHECK(classify_threshold(2.0, 1.0, 1.0) == Criticality::Critical);
    // a = 120, b = 10: rho0 = 1/sqrt(240), T = 0.1, boundary 20 sqrt(240) ~ 310
    const double rho0 = 1.0 / std::sqrt(240.0);
    CHECK(20.0 * std::sqrt(240.0) == doctest::Approx(309.84).epsilon(1e-3));
    CHECK(classify_threshold(311.0, rho0, 0.1) == Criticality::Supercritical);
    CHECK(classify_threshold(309.0, rho0, 0.1) == Criticality::Subcritical);
}

TEST_CASE("gamma = 2 characteristics") {
    SelfSimilarParams p{1.0, 2.0, -2.0, 6.0, 0.0};  // lambda rho0 T = 3 (supercritical)
    const double T = p.blowup_time();

    SUBCASE("alpha = 0 goes straight into the origin") {
        const double x = -0.4;
        const double v = -x / T;  // alpha = 0
        for (double t : {0.1 * T, 0.5 * T, 0.9 * T})
            CHECK(characteristic_gamma2(p, x, v, t) == doctest::Approx(x * (T - t) / T));
    }
    SUBCASE("trapped band stays negative") {
        const double x = -0.5;
        const double vlo = -x / T, vhi = -x / T * (0.5 * p.lambda * p.rho0 * T);
        const double v = 0.5 * (vlo + vhi);
        CHECK(xv_condition(p, x, v));
        for (int k = 1; k < 40; ++k)
            CHECK(characteristic_gamma2(p, x, v, T * k / 40.0) < 0.0);
    }
    SUBCASE("formula vs RK4 integration of the trajectory ODE") {
        auto trajectory = [&](double x, double v, double t_end, int steps) {
            double X = x, V = v, t = 0.0;
            const double h = t_end / steps;
            auto acc = [&](double tt, double XX, double VV) {
                const SelfSimilarState s = closed_form(p, tt);
                return 0.5 * p.lambda * s.rho * (s.b * XX - VV);
            };
            for (int k = 0; k < steps; ++k) {
                const double k1x = V, k1v = acc(t, X, V);
                const double k2x = V + 0.5 * h * k1v, k2v = acc(t + 0.5 * h, X + 0.5 * h * k1x, V + 0.5 * h * k1v);
                const double k3x = V + 0.5 * h * k2v, k3v = acc(t + 0.5 * h, X + 0.5 * h * k2x, V + 0.5 * h * k2v);
                const double k4x = V + h * k3v, k4v = acc(t + h, X + h * k3x, V + h * k3v);
                X += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
                V += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
                t += h;
            }
            return std::pair{X, V};
        };
        const double x = -0.7, v = 1.9;
        const auto [X, V] = trajectory(x, v, 0.9 * T, 200000);
        CHECK(characteristic_gamma2(p, x, v, 0.9 * T) == doctest::Approx(X).epsilon(1e-6));

        // alpha = sqrt(a)(V - bX) is conserved along the integrated trajectory.
        const double alpha0 = (p.m0 / p.rho0) * (v + x / T);
        for (double frac : {0.3, 0.6, 0.9}) {
            const auto [Xt, Vt] = trajectory(x, v, frac * T, 200000);
            const SelfSimilarState s = closed_form(p, frac * T);
            const double sqrt_a = s.m / s.rho;
            CHECK(std::fabs(sqrt_a * (Vt - s.b * Xt) - alpha0) < 1e-8);
        }
    }
    SUBCASE("critical case is refused") {
        SelfSimilarParams crit{1.0, 1.0, -2.0, 4.0, 0.0};  // lambda rho0 T = 2
        CHECK_THROWS(characteristic_gamma2(crit, -0.5, 1.5, 0.2));
    }
}

TEST_CASE("gamma > 2 characteristic and its zero crossing") {
    const double T = 0.5, C = 1.3;
    SUBCASE("alpha = 0: linear collapse, no crossing from x0 < 0") {
        for (double t : {0.1, 0.3, 0.45})
            CHECK(characteristic_gamma_gt2(-0.8, 0.0, C, T, t) ==
                  doctest::Approx(-0.8 * (T - t) / T));
        CHECK(!characteristic_gamma_gt2_crossing(-0.8, 0.0, C, T).has_value());
    }
    SUBCASE("x0 < 0, alpha > 0 crosses zero before T") {
        const auto t_star = characteristic_gamma_gt2_crossing(-0.8, 0.6, C, T);
        REQUIRE(t_star.has_value());
        CHECK(*t_star < T);
        CHECK(std::fabs(characteristic_gamma_gt2(-0.8, 0.6, C, T, *t_star)) < 1e-10);
    }
}

TEST_CASE("xv condition band") {
    SelfSimilarParams super{1.0, 1.0, -2.0, 6.0, 0.0};  // lambda rho0 T = 3
    const double T = super.blowup_time();
    const double x = -0.6;
    CHECK(!xv_condition(super, x, -x / T));  // strict lower bound
    CHECK(xv_condition(super, x, -x / T * (1.0 + 1.5) / 2.0));
    SelfSimilarParams sub{1.0, 1.0, -2.0, 2.0, 0.0};  // band empty below threshold
    for (double v : {0.5, 1.0, 1.2, 2.0, 5.0}) CHECK(!xv_condition(sub, x, v));
}

TEST_CASE("Burgers blow-up times of the named profiles") {
    const Grid1D g = make_uniform_grid(4.0, 1601);
    auto g1 = [](double v) { return std::exp(-2.0 * v * v); };
    auto g3 = [](double v) { return 4.0 * std::exp(-2.0 * v * v); };
    auto g4 = [](double v) {
        return std::exp(-10.0 * (v - 1.5) * (v - 1.5)) + std::exp(-10.0 * (v + 1.5) * (v + 1.5));
    };
    CHECK(burgers_blowup_time(g1, g) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(burgers_blowup_time(g3, g) == doctest::Approx(0.125).epsilon(1e-4));
    CHECK(burgers_blowup_time(g4, g) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_THROWS(burgers_blowup_time([](double) { return 0.0; }, g));
}
