#pragma once

#include <functional>
#include <optional>
#include <string>

#include "granular/grid.hpp"

namespace granular {

// Shear-profile self-similar solution f = m(t) phi(a(t)(v - b(t)x)^2) with
// canonical state (rho, m, b), rho = m/sqrt(a); blows up at T = 1/(-b0).
struct SelfSimilarParams {
    double rho0 = 1.0;
    double m0 = 1.0;
    double b0 = -1.0;   // negative shear
    double lambda = 1.0;
    double beta = 0.0;  // gamma - 2; 0 for the exact closed forms

    double blowup_time() const { return 1.0 / (-b0); }
    bool operator==(const SelfSimilarParams&) const = default;
};

struct SelfSimilarState {
    double rho = 0.0;
    double m = 0.0;
    double b = 0.0;
    double inv_sqrt_a = 0.0;  // rho/m, the velocity support width
};

// Closed forms rho = rho0 T/(T-t), m = m0 (T/(T-t))^{lambda rho0 T / 2},
// b = -1/(T-t). Requires beta = 0 and t < T.
SelfSimilarState closed_form(const SelfSimilarParams& p, double t);

// Classical RK4 on rho' = -b rho, m' = (lambda/2) rho^{1+beta} m^{1-beta},
// b' = -b^2; the independent oracle for the closed forms.
SelfSimilarState integrate_ode(const SelfSimilarParams& p, double t_end, double dt);

enum class Criticality { Subcritical, Critical, Supercritical };

// Threshold lambda rho0 T vs 2 with a 1e-12 window for the critical case.
Criticality classify_threshold(double lambda, double rho0, double T);

// X(t) along the characteristic of the gamma=2 infinite-mass solution,
// alpha = (m0/rho0)(v + x/T) conserved. Refuses the critical case where the
// displayed formula degenerates.
double characteristic_gamma2(const SelfSimilarParams& p, double x, double v, double t);

// gamma>2 analogue X(t) = ((T-t)/T)(X0 + alpha C T log(T/(T-t))).
double characteristic_gamma_gt2(double x0, double alpha, double c, double T, double t);

// Earliest zero crossing of the gamma>2 characteristic when X0<0, alpha>0.
std::optional<double> characteristic_gamma_gt2_crossing(double x0, double alpha, double c,
                                                        double T);

// Strict band -x/T < v < (-x/T)(lambda/2) rho0 T for x < 0; empty below the
// threshold.
bool xv_condition(const SelfSimilarParams& p, double x, double v);

// Shock-formation time 1/(2 max g) of the gamma=1 homogeneous equation.
double burgers_blowup_time(const std::function<double(double)>& g, const Grid1D& v_grid);

// CSV emitters for the (t, rho, m, b, 1/sqrt(a)) curves and a characteristic
// trajectory; columns in that order, header included.
void write_selfsimilar_curves(const std::string& path, const SelfSimilarParams& p, double t_end,
                              int samples);
void write_characteristic_curve(const std::string& path, const SelfSimilarParams& p, double x,
                                double v, double t_end, int samples);

}  // namespace granular
