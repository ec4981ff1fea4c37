#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "granular/meshmap.hpp"

using namespace granular;

namespace {

std::vector<double> sample(const Grid1D& g, double (*f)(double)) {
    std::vector<double> out(g.size());
    for (int j = 0; j < g.size(); ++j) out[j] = f(g.nodes[j]);
    return out;
}

double gauss30(double v) { return std::exp(-30.0 * v * v); }
double gauss20(double v) { return std::exp(-20.0 * v * v); }
double two_bumps(double v) {
    return std::exp(-50.0 * (v - 2.0) * (v - 2.0)) + std::exp(-50.0 * (v + 2.0) * (v + 2.0));
}

}  // namespace

TEST_CASE("one-bump radius snaps the analytic half-max crossing to the grid") {
    const Grid1D g = make_uniform_grid(2.0, 401);
    const auto f = sample(g, gauss30);
    const double r = concentration_radius_one_bump(g, f, 0.5);
    const double analytic = std::sqrt(std::log(2.0) / 30.0);  // e^{-30 r^2} = 1/2
    CHECK(std::fabs(r - analytic) <= 2.0 * 4.0 / 401);

    // delta0 -> 0+: every positive node qualifies, so the radius is the last node.
    const double r0 = concentration_radius_one_bump(g, f, 1e-300);
    CHECK(r0 == doctest::Approx(g.nodes.back()));

    // Support only at v < 0: degenerate fallback is the first positive node.
    std::vector<double> left(g.size(), 0.0);
    left[10] = 1.0;
    const double rfb = concentration_radius_one_bump(g, left, 0.5);
    double first_pos = 0.0;
    for (double v : g.nodes)
        if (v > 0.0) {
            first_pos = v;
            break;
        }
    CHECK(rfb == doctest::Approx(first_pos));

    CHECK_THROWS(concentration_radius_one_bump(g, std::vector<double>(g.size(), 0.0), 0.5));
}

TEST_CASE("two-bump radii: analytic level crossings of separated Gaussians") {
    const Grid1D g = make_uniform_grid(4.0, 801);
    const auto f = sample(g, two_bumps);
    const auto [r1, r2] = concentration_radii_two_bump(g, f, 0.5);
    const double w = std::sqrt(std::log(2.0) / 50.0);  // cross term negligible at this width
    CHECK(std::fabs(r1 - (2.0 - w)) <= 2.0 * 8.0 / 801);
    CHECK(std::fabs(r2 - (2.0 + w)) <= 2.0 * 8.0 / 801);

    std::vector<double> single(g.size(), 0.0);
    single[600] = 1.0;
    const auto [s1, s2] = concentration_radii_two_bump(g, single, 0.5);
    CHECK(s1 == doctest::Approx(g.nodes[600]));
    CHECK(s2 == doctest::Approx(g.nodes[600]));

    const auto [a1, a2] = concentration_radii_two_bump(g, f, 1e-300);
    double first_pos = 0.0;
    for (double v : g.nodes)
        if (v > 0.0) {
            first_pos = v;
            break;
        }
    CHECK(a1 == doctest::Approx(first_pos));
    CHECK(a2 == doctest::Approx(g.nodes.back()));
}

TEST_CASE("one-bump map: hand-solved quintic coefficients") {
    // {a/32 + b/2 = 0.25, a + b = 2} -> a = 1.6, b = 0.4
    const MeshMap map = build_map_one_bump(0.25, 0.5, 2.0);
    REQUIRE(map.pieces.size() == 2);
    CHECK(map.pieces[1].a == doctest::Approx(1.6));
    CHECK(map.pieces[1].b == doctest::Approx(0.4));
    CHECK(map(0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(map(1.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("one-bump map degenerates to the identity when r = delta L") {
    const MeshMap map = build_map_one_bump(1.0, 0.5, 2.0);
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.99}) CHECK(map(s) == doctest::Approx(2.0 * s));
}

TEST_CASE("one-bump sigmoid branch: endpoint residuals below 1e-10") {
    // r/delta = 3.6 >= L picks the sigmoid tail.
    const MeshMap map = build_map_one_bump(1.8, 0.5, 2.0);
    CHECK(std::fabs(map(0.5) - 1.8) < 1e-10);
    CHECK(std::fabs(map(1.0) - 2.0) < 1e-10);
    CHECK(map(0.0) == doctest::Approx(0.0));
}

TEST_CASE("two-bump map: matching residuals and monotonicity") {
    SUBCASE("symmetric data with small r1") {
        const MeshMap map = build_map_two_bump(0.2, 3.0, 0.5, 4.0);
        CHECK(std::fabs(map(0.0)) < 1e-10);
        CHECK(std::fabs(map(0.25) - 0.2) < 1e-10);
        CHECK(std::fabs(map(0.75) - 3.0) < 1e-10);
        CHECK(std::fabs(map(1.0) - 4.0) < 1e-10);
    }
    SUBCASE("degenerate flat middle is widened") {
        const MeshMap map = build_map_two_bump(1.0, 1.0, 0.5, 4.0, 0.1);
        CHECK(map.knots[1] - map.knots[0] == doctest::Approx(0.1));
        CHECK(std::fabs(map(1.0) - 4.0) < 1e-10);
    }
    SUBCASE("delta near 1: middle chord spans nearly everything") {
        const MeshMap map = build_map_two_bump(0.3, 3.5, 0.96, 4.0);
        CHECK(std::fabs(map(0.0)) < 1e-10);
        CHECK(std::fabs(map(1.0) - 4.0) < 1e-10);
    }
}

TEST_CASE("refine: identity map leaves grid and values unchanged") {
    const Grid1D g = make_uniform_grid(2.0, 40);
    const auto f = sample(g, gauss20);
    const MeshMap map = build_map_one_bump(1.0, 0.5, 2.0);  // mu(s) = 2s
    const auto s = make_uniform_s_nodes(40);
    const auto [ng, nf] = refine(g, f, map, s);
    for (int j = 0; j < 40; ++j) {
        CHECK(ng.nodes[j] == doctest::Approx(g.nodes[j]).epsilon(1e-13));
        CHECK(nf[j] == doctest::Approx(std::max(f[j], kDensityFloor)).epsilon(1e-8));
    }
}

TEST_CASE("refine concentrates half the nodes inside the detected radius") {
    const Grid1D g = make_uniform_grid(2.0, 80);
    const auto f = sample(g, gauss20);
    const double r = concentration_radius_one_bump(g, f, 0.5);
    const MeshMap map = build_map_one_bump(r, 0.5, 2.0);
    const auto s = make_uniform_s_nodes(80);
    const auto [ng, nf] = refine(g, f, map, s);

    int inside = 0;
    for (double v : ng.nodes)
        if (std::fabs(v) <= r + 1e-12) ++inside;
    CHECK(inside >= 40);

    CHECK(quadrature_mass(ng, nf) == doctest::Approx(quadrature_mass(g, f)).epsilon(1e-12));
    for (double v : nf) CHECK(v > 0.0);
    CHECK(ng.size() == g.size());
}
