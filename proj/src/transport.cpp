#include "granular/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace granular {

namespace {

// Wrap y into [-L, L).
double wrap_periodic(double y, double L) {
    const double period = 2.0 * L;
    double z = std::fmod(y + L, period);
    if (z < 0.0) z += period;
    return z - L;
}

}  // namespace

std::vector<double> advect_slice(const Grid1D& x_grid_old, const std::vector<double>& f_old,
                                 const std::vector<double>& x_query, double v, double dt) {
    if (dt < 0.0) throw std::invalid_argument("advect_slice: dt must be nonnegative");
    const int n = x_grid_old.size();
    const double L = x_grid_old.half_length;

    // Periodic extension with 3 ghost nodes on each side so interpolation
    // near the seam sees the wrapped neighbors.
    const int ghosts = 3;
    std::vector<double> xs, ys;
    xs.reserve(n + 2 * ghosts);
    ys.reserve(n + 2 * ghosts);
    for (int k = n - ghosts; k < n; ++k) {
        xs.push_back(x_grid_old.nodes[k] - 2.0 * L);
        ys.push_back(f_old[k]);
    }
    for (int k = 0; k < n; ++k) {
        xs.push_back(x_grid_old.nodes[k]);
        ys.push_back(f_old[k]);
    }
    for (int k = 0; k < ghosts; ++k) {
        xs.push_back(x_grid_old.nodes[k] + 2.0 * L);
        ys.push_back(f_old[k]);
    }
    PchipInterpolant interp(std::move(xs), std::move(ys));

    const double mass_old = quadrature_mass(x_grid_old, f_old);
    std::vector<double> out(x_query.size());
    for (size_t i = 0; i < x_query.size(); ++i) {
        const double y = wrap_periodic(x_query[i] - v * dt, L);
        out[i] = std::max(interp(y), kDensityFloor);
    }
    // Re-weight by the pre/post mass ratio on the query grid.
    Grid1D qgrid = x_grid_old;
    if (x_query != x_grid_old.nodes) qgrid = make_grid_from_nodes(L, x_query);
    const double mass_new = quadrature_mass(qgrid, out);
    const double scale = mass_old / mass_new;
    for (double& f : out) f *= scale;
    return out;
}

PhaseField transport_step(const PhaseField& field, const Grid1D& x_grid_new, double dt) {
    PhaseField out;
    out.x_grid = x_grid_new;
    out.v_grid = field.v_grid;
    out.values.resize(static_cast<size_t>(x_grid_new.size()) * field.nv());
    const int nv = field.nv();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < nv; ++j) {
        std::vector<double> slice = advect_slice(field.x_grid, field.column(j), x_grid_new.nodes,
                                                 field.v_grid.nodes[j], dt);
        for (int i = 0; i < x_grid_new.size(); ++i) out.at(i, j) = slice[i];
    }
    return out;
}

}  // namespace granular
