#pragma once

#include <vector>

#include "granular/grid.hpp"

namespace granular {

// Velocity moments of a 1D profile: integrand v^p (signed, p odd momentum
// case) or |v|^p.
double moment_1d(const Grid1D& grid, const std::vector<double>& f, int p, bool is_signed);

// Phase-space moment by tensor quadrature, p in {0..4}.
double moment(const PhaseField& field, int p, bool is_signed);

// -int f log f with the floored density, so the integrand is finite.
double entropy_1d(const Grid1D& grid, const std::vector<double>& f);
double entropy(const PhaseField& field);

// Node of the maximum over v > 0 (tracks the positive bump of a symmetric
// pair). Throws on an all-zero profile.
double peak_position(const Grid1D& v_grid, const std::vector<double>& f);

// Maximum over x-columns of the number of maximal runs of consecutive
// v-nodes with f > level.
int level_set_vertical_components(const PhaseField& field, double level);

// log(rho)/log(m) for the x-column nearest 0, with rho its v-quadrature and
// m its maximum. Returns NaN until both rho and m exceed e, where the ratio
// becomes meaningful.
double log_ratio_rho_m(const PhaseField& field);

}  // namespace granular
