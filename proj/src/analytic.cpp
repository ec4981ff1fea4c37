#include "granular/analytic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace granular {

SelfSimilarState closed_form(const SelfSimilarParams& p, double t) {
    if (p.beta != 0.0) throw std::invalid_argument("closed_form: requires beta = 0");
    const double T = p.blowup_time();
    if (!(t >= 0.0 && t < T)) throw std::domain_error("closed_form: past blow-up");
    const double ratio = T / (T - t);
    SelfSimilarState s;
    s.rho = p.rho0 * ratio;
    s.m = p.m0 * std::pow(ratio, 0.5 * p.lambda * p.rho0 * T);
    s.b = -1.0 / (T - t);
    s.inv_sqrt_a = s.rho / s.m;
    return s;
}

SelfSimilarState integrate_ode(const SelfSimilarParams& p, double t_end, double dt) {
    const double T = p.blowup_time();
    if (!(t_end < T)) throw std::domain_error("integrate_ode: t_end must precede blow-up");
    using V3 = std::array<double, 3>;  // (rho, m, b)
    auto rhs = [&](const V3& s) -> V3 {
        const double rho = s[0], m = s[1], b = s[2];
        return {-b * rho, 0.5 * p.lambda * std::pow(rho, 1.0 + p.beta) * std::pow(m, 1.0 - p.beta),
                -b * b};
    };
    V3 s{p.rho0, p.m0, p.b0};
    double t = 0.0;
    while (t < t_end) {
        const double h = std::min(dt, t_end - t);
        if (t + h > T) throw std::domain_error("integrate_ode: step straddles blow-up");
        const V3 k1 = rhs(s);
        V3 s2{s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1], s[2] + 0.5 * h * k1[2]};
        const V3 k2 = rhs(s2);
        V3 s3{s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1], s[2] + 0.5 * h * k2[2]};
        const V3 k3 = rhs(s3);
        V3 s4{s[0] + h * k3[0], s[1] + h * k3[1], s[2] + h * k3[2]};
        const V3 k4 = rhs(s4);
        for (int i = 0; i < 3; ++i)
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += h;
    }
    SelfSimilarState out;
    out.rho = s[0];
    out.m = s[1];
    out.b = s[2];
    out.inv_sqrt_a = s[0] / s[1];
    return out;
}

Criticality classify_threshold(double lambda, double rho0, double T) {
    if (!(lambda > 0.0 && rho0 > 0.0 && T > 0.0))
        throw std::invalid_argument("classify_threshold: inputs must be positive");
    const double q = lambda * rho0 * T;
    if (std::fabs(q - 2.0) <= 1e-12) return Criticality::Critical;
    return q > 2.0 ? Criticality::Supercritical : Criticality::Subcritical;
}

double characteristic_gamma2(const SelfSimilarParams& p, double x, double v, double t) {
    if (p.beta != 0.0) throw std::invalid_argument("characteristic_gamma2: requires beta = 0");
    const double T = p.blowup_time();
    if (!(t < T)) throw std::domain_error("characteristic_gamma2: past blow-up");
    const double kappa = 1.0 - 0.5 * p.lambda * p.rho0 * T;
    if (std::fabs(kappa) <= 1e-12)
        throw std::domain_error("characteristic_gamma2: critical case not covered");
    const double alpha = (p.m0 / p.rho0) * (v + x / T);
    const double ratio = T / (T - t);
    return (T - t) *
           (x / T + (alpha * p.rho0 / p.m0) * (1.0 / kappa) * (std::pow(ratio, kappa) - 1.0));
}

double characteristic_gamma_gt2(double x0, double alpha, double c, double T, double t) {
    if (!(t < T)) throw std::domain_error("characteristic_gamma_gt2: past blow-up");
    return (T - t) / T * (x0 + alpha * c * T * std::log(T / (T - t)));
}

std::optional<double> characteristic_gamma_gt2_crossing(double x0, double alpha, double c,
                                                        double T) {
    if (!(x0 < 0.0 && alpha > 0.0)) return std::nullopt;
    // X(t*) = 0 <=> log(T/(T-t*)) = -x0/(alpha c T); bisect on the bracket.
    double lo = 0.0, hi = T * (1.0 - 1e-16);
    if (characteristic_gamma_gt2(x0, alpha, c, T, hi) < 0.0) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (characteristic_gamma_gt2(x0, alpha, c, T, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

bool xv_condition(const SelfSimilarParams& p, double x, double v) {
    if (!(x < 0.0)) throw std::invalid_argument("xv_condition: requires x < 0");
    const double T = p.blowup_time();
    const double lower = -x / T;
    const double upper = lower * 0.5 * p.lambda * p.rho0 * T;
    return v > lower && v < upper;
}

double burgers_blowup_time(const std::function<double(double)>& g, const Grid1D& v_grid) {
    double gmax = 0.0;
    for (double v : v_grid.nodes) gmax = std::max(gmax, g(v));
    if (!(gmax > 0.0)) throw std::runtime_error("burgers_blowup_time: zero profile");
    return 1.0 / (2.0 * gmax);
}

void write_selfsimilar_curves(const std::string& path, const SelfSimilarParams& p, double t_end,
                              int samples) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_selfsimilar_curves: cannot open " + path);
    std::fprintf(fp, "t,rho,m,b,inv_sqrt_a\n");
    for (int k = 0; k <= samples; ++k) {
        const double t = t_end * k / samples;
        const SelfSimilarState s =
            p.beta == 0.0 ? closed_form(p, t) : integrate_ode(p, t, t_end / (100.0 * samples));
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t, s.rho, s.m, s.b, s.inv_sqrt_a);
    }
    std::fclose(fp);
}

void write_characteristic_curve(const std::string& path, const SelfSimilarParams& p, double x,
                                double v, double t_end, int samples) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_characteristic_curve: cannot open " + path);
    std::fprintf(fp, "t,X\n");
    for (int k = 0; k <= samples; ++k) {
        const double t = t_end * k / samples;
        std::fprintf(fp, "%.17g,%.17g\n", t, characteristic_gamma2(p, x, v, t));
    }
    std::fclose(fp);
}

}  // namespace granular
