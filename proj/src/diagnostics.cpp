#include "granular/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace granular {

double moment_1d(const Grid1D& grid, const std::vector<double>& f, int p, bool is_signed) {
    if (p < 0 || p > 4) throw std::invalid_argument("moment: p must be in {0..4}");
    double sum = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const double v = grid.nodes[j];
        const double vp = is_signed ? std::pow(v, p) : std::pow(std::fabs(v), p);
        sum += vp * f[j] * grid.weights[j];
    }
    return sum;
}

double moment(const PhaseField& field, int p, bool is_signed) {
    double sum = 0.0;
    for (int i = 0; i < field.nx(); ++i)
        sum += moment_1d(field.v_grid, field.row(i), p, is_signed) * field.x_grid.weights[i];
    return sum;
}

double entropy_1d(const Grid1D& grid, const std::vector<double>& f) {
    double sum = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const double v = std::max(f[j], kDensityFloor);
        sum -= v * std::log(v) * grid.weights[j];
    }
    return sum;
}

double entropy(const PhaseField& field) {
    double sum = 0.0;
    for (int i = 0; i < field.nx(); ++i)
        sum += entropy_1d(field.v_grid, field.row(i)) * field.x_grid.weights[i];
    return sum;
}

double peak_position(const Grid1D& v_grid, const std::vector<double>& f) {
    double best = -1.0;
    double best_val = 0.0;
    for (int j = 0; j < v_grid.size(); ++j) {
        if (v_grid.nodes[j] > 0.0 && f[j] > best_val) {
            best_val = f[j];
            best = v_grid.nodes[j];
        }
    }
    if (best_val <= 0.0) throw std::runtime_error("peak_position: empty field");
    return best;
}

int level_set_vertical_components(const PhaseField& field, double level) {
    int worst = 0;
    for (int i = 0; i < field.nx(); ++i) {
        int runs = 0;
        bool inside = false;
        for (int j = 0; j < field.nv(); ++j) {
            const bool above = field.at(i, j) > level;
            if (above && !inside) ++runs;
            inside = above;
        }
        worst = std::max(worst, runs);
    }
    return worst;
}

double log_ratio_rho_m(const PhaseField& field) {
    int i0 = 0;
    for (int i = 1; i < field.nx(); ++i)
        if (std::fabs(field.x_grid.nodes[i]) < std::fabs(field.x_grid.nodes[i0])) i0 = i;
    const std::vector<double> col = field.row(i0);
    const double rho = quadrature_mass(field.v_grid, col);
    const double m = *std::max_element(col.begin(), col.end());
    const double e = std::exp(1.0);
    if (!(rho > e) || !(m > e)) return std::numeric_limits<double>::quiet_NaN();
    return std::log(rho) / std::log(m);
}

}  // namespace granular
