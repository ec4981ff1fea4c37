#pragma once

#include <utility>
#include <vector>

#include "granular/grid.hpp"

namespace granular {

enum class BumpKind { OneBump, TwoBump };

// One monotone piece of the mapping mu(s) on [s0, s1]:
//   Linear   a*s
//   Quintic  a*s^5 + b*s
//   Sigmoid  a/(1+exp(-b*s)) + shift
struct MapPiece {
    enum class Form { Linear, Quintic, Sigmoid };
    Form form = Form::Linear;
    double s0 = 0.0, s1 = 1.0;
    double a = 0.0, b = 0.0, shift = 0.0;

    double eval(double s) const;
};

// Piecewise refinement mapping mu: [0,1] -> [0,L] with mu(0)=0, mu(1)=L,
// strictly increasing; extended to [-1,1] by oddness at the call sites.
struct MeshMap {
    BumpKind kind = BumpKind::OneBump;
    double delta = 0.5;
    double delta0 = 0.5;
    double L = 1.0;
    std::vector<double> knots;  // (r) or (r1, r2)
    std::vector<MapPiece> pieces;

    double operator()(double s) const;
    double eval_odd(double s) const;  // sign(s) * mu(|s|)
};

// Outermost positive node of the super-level set {f > delta0 * max f}.
// Falls back to the first positive node when no positive node qualifies.
// Throws on an all-zero field.
double concentration_radius_one_bump(const Grid1D& grid, const std::vector<double>& f,
                                     double delta0);

// (min, max) positive nodes of the super-level set, same fallback.
std::pair<double, double> concentration_radii_two_bump(const Grid1D& grid,
                                                       const std::vector<double>& f,
                                                       double delta0);

// Linear core on [0, delta] with slope r/delta, quintic or sigmoid tail picked
// by the sign of L - r/delta. Throws "map construction failed" if the
// coefficient solve diverges or the assembled map is not strictly increasing.
MeshMap build_map_one_bump(double r, double delta, double L);

// Chord through (1/2 - delta/2, r1) and (1/2 + delta/2, r2) in the middle,
// quintic/sigmoid outer pieces. A middle gap below min_sep is widened to
// min_sep so the chord has positive slope.
MeshMap build_map_two_bump(double r1, double r2, double delta, double L, double min_sep = 0.0);

// Signed cell-centered uniform s-grid on [-1, 1], length n.
std::vector<double> make_uniform_s_nodes(int n);

// Regrid: new nodes from the odd extension of the map at s_nodes, values by
// shape-preserving interpolation, then mass-conserving rescale to the old
// mass. Grid size is preserved.
std::pair<Grid1D, std::vector<double>> refine(const Grid1D& grid, const std::vector<double>& f,
                                              const MeshMap& map,
                                              const std::vector<double>& s_nodes);

}  // namespace granular
