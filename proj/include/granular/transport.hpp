#pragma once

#include <vector>

#include "granular/grid.hpp"

namespace granular {

// Semi-Lagrangian free transport of one velocity slice: trace foot points
// y_i = x_i - v*dt, wrap them periodically into [-L, L], interpolate on the
// periodically extended node list, floor, and re-weight so the slice mass is
// exactly preserved.
std::vector<double> advect_slice(const Grid1D& x_grid_old, const std::vector<double>& f_old,
                                 const std::vector<double>& x_query, double v, double dt);

// Applies advect_slice independently for every velocity node, querying at
// x_grid_new. Mass is conserved per slice, hence in total.
PhaseField transport_step(const PhaseField& field, const Grid1D& x_grid_new, double dt);

}  // namespace granular
