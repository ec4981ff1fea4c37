#include "granular/meshmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace granular {

namespace {

double sigmoid(double a, double b, double s) { return a / (1.0 + std::exp(-b * s)); }

struct Residual2 {
    double f1, f2;
    double j11, j12, j21, j22;  // d(f1,f2)/d(a,b)
};

// Damped Newton on a 2x2 system; initial guess a=2L, b=5, 100 iteration cap.
template <class Fn>
bool newton2(Fn&& residual, double& a, double& b) {
    double na = a, nb = b;
    auto norm = [&](double x, double y) { return std::sqrt(x * x + y * y); };
    Residual2 r = residual(na, nb);
    double fn = norm(r.f1, r.f2);
    for (int it = 0; it < 100; ++it) {
        if (fn < 1e-13) {
            a = na;
            b = nb;
            return true;
        }
        const double det = r.j11 * r.j22 - r.j12 * r.j21;
        if (!std::isfinite(det) || std::fabs(det) < 1e-300) return false;
        const double da = (-r.f1 * r.j22 + r.f2 * r.j12) / det;
        const double db = (-r.f2 * r.j11 + r.f1 * r.j21) / det;
        double step = 1.0;
        for (int half = 0; half < 40; ++half) {
            const double ta = na + step * da, tb = nb + step * db;
            Residual2 rt = residual(ta, tb);
            const double ft = norm(rt.f1, rt.f2);
            if (std::isfinite(ft) && ft < fn) {
                na = ta;
                nb = tb;
                r = rt;
                fn = ft;
                break;
            }
            step *= 0.5;
            if (half == 39) return false;
        }
    }
    if (fn < 1e-10) {
        a = na;
        b = nb;
        return true;
    }
    return false;
}

MapPiece make_linear(double slope, double s0, double s1) {
    MapPiece p;
    p.form = MapPiece::Form::Linear;
    p.s0 = s0;
    p.s1 = s1;
    p.a = slope;
    return p;
}

// Quintic through two value conditions (s_a, y_a), (s_b, y_b).
bool quintic_from_values(double sa, double ya, double sb, double yb, MapPiece& out) {
    const double sa5 = sa * sa * sa * sa * sa;
    const double sb5 = sb * sb * sb * sb * sb;
    const double det = sa5 * sb - sb5 * sa;
    if (std::fabs(det) < 1e-300) return false;
    const double a = (ya * sb - yb * sa) / det;
    const double b = (yb * sa5 - ya * sb5) / det;
    out.form = MapPiece::Form::Quintic;
    out.a = a;
    out.b = b;
    out.shift = 0.0;
    return true;
}

// Quintic through a value and a slope condition at the same point s_a.
bool quintic_from_value_slope(double sa, double ya, double slope, MapPiece& out) {
    const double sa4 = sa * sa * sa * sa;
    const double sa5 = sa4 * sa;
    // a*sa^5 + b*sa = ya ; 5a*sa^4 + b = slope
    const double a = (sa * slope - ya) / (4.0 * sa5);
    const double b = slope - 5.0 * a * sa4;
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    out.form = MapPiece::Form::Quintic;
    out.a = a;
    out.b = b;
    out.shift = 0.0;
    return true;
}

bool sigmoid_from_values(double sa, double ya, double sb, double yb, double L, MapPiece& out) {
    double a = 2.0 * L, b = 5.0;
    auto res = [&](double aa, double bb) {
        Residual2 r;
        const double ea = std::exp(-bb * sa), eb = std::exp(-bb * sb);
        r.f1 = sigmoid(aa, bb, sa) - ya;
        r.f2 = sigmoid(aa, bb, sb) - yb;
        r.j11 = sigmoid(1.0, bb, sa);
        r.j21 = sigmoid(1.0, bb, sb);
        r.j12 = aa * sa * ea / ((1.0 + ea) * (1.0 + ea));
        r.j22 = aa * sb * eb / ((1.0 + eb) * (1.0 + eb));
        return r;
    };
    if (!newton2(res, a, b)) return false;
    out.form = MapPiece::Form::Sigmoid;
    out.a = a;
    out.b = b;
    out.shift = 0.0;
    return true;
}

// Shifted sigmoid a/(1+e^{-b s}) - a/2 (so it vanishes at s=0), matching a
// value and a slope at s=sa.
bool sigmoid_from_value_slope(double sa, double ya, double slope, double L, MapPiece& out) {
    double a = 2.0 * L, b = 5.0;
    auto res = [&](double aa, double bb) {
        Residual2 r;
        const double e = std::exp(-bb * sa);
        const double den = 1.0 + e;
        r.f1 = aa / den - 0.5 * aa - ya;
        r.f2 = aa * bb * e / (den * den) - slope;
        r.j11 = 1.0 / den - 0.5;
        r.j12 = aa * sa * e / (den * den);
        r.j21 = bb * e / (den * den);
        // d/db [a b e/(1+e)^2], e=e^{-b sa}
        r.j22 = aa * e / (den * den) * (1.0 - bb * sa + 2.0 * bb * sa * e / den);
        return r;
    };
    if (!newton2(res, a, b)) return false;
    out.form = MapPiece::Form::Sigmoid;
    out.a = a;
    out.b = b;
    out.shift = -0.5 * a;
    return true;
}

bool piece_increasing(const MapPiece& piece) {
    const int samples = 200;
    double prev = piece.eval(piece.s0);
    if (!std::isfinite(prev)) return false;
    for (int k = 1; k <= samples; ++k) {
        const double s = piece.s0 + (piece.s1 - piece.s0) * k / samples;
        const double cur = piece.eval(s);
        if (!std::isfinite(cur) || !(cur > prev)) return false;
        prev = cur;
    }
    return true;
}

MapPiece make_affine(double s0, double y0, double s1, double y1) {
    MapPiece p;
    p.form = MapPiece::Form::Quintic;
    p.s0 = s0;
    p.s1 = s1;
    p.a = 0.0;
    p.b = (y1 - y0) / (s1 - s0);
    p.shift = y0 - p.b * s0;
    return p;
}

void check_monotone_and_knots(const MeshMap& map) {
    // Endpoint and knot interpolation to 1e-10, strict increase on 1e3 samples.
    auto expect = [](double got, double want) {
        if (std::fabs(got - want) > 1e-10 * std::max(1.0, std::fabs(want)))
            throw std::runtime_error("map construction failed: knot residual");
    };
    expect(map(0.0), 0.0);
    expect(map(1.0), map.L);
    if (map.kind == BumpKind::OneBump) {
        expect(map(map.delta), map.knots[0]);
    } else {
        expect(map(0.5 - 0.5 * map.delta), map.knots[0]);
        expect(map(0.5 + 0.5 * map.delta), map.knots[1]);
    }
    const int samples = 1000;
    double prev = map(0.0);
    for (int k = 1; k <= samples; ++k) {
        const double s = static_cast<double>(k) / samples;
        const double cur = map(s);
        if (!(cur > prev) || !std::isfinite(cur))
            throw std::runtime_error("map construction failed: not strictly increasing");
        prev = cur;
    }
}

}  // namespace

double MapPiece::eval(double s) const {
    switch (form) {
        case Form::Linear:
            return a * s;
        case Form::Quintic:
            return a * s * s * s * s * s + b * s + shift;
        case Form::Sigmoid:
            return sigmoid(a, b, s) + shift;
    }
    return 0.0;
}

double MeshMap::operator()(double s) const {
    for (const auto& p : pieces)
        if (s <= p.s1 || &p == &pieces.back()) return p.eval(s);
    return pieces.back().eval(s);
}

double MeshMap::eval_odd(double s) const {
    const double m = (*this)(std::fabs(s));
    return s < 0.0 ? -m : m;
}

double concentration_radius_one_bump(const Grid1D& grid, const std::vector<double>& f,
                                     double delta0) {
    auto radii = concentration_radii_two_bump(grid, f, delta0);
    return radii.second;
}

std::pair<double, double> concentration_radii_two_bump(const Grid1D& grid,
                                                       const std::vector<double>& f,
                                                       double delta0) {
    const int n = grid.size();
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, v);
    if (!(fmax > 0.0)) throw std::runtime_error("empty field");
    const double level = delta0 * fmax;
    double rmin = std::numeric_limits<double>::quiet_NaN();
    double rmax = rmin;
    for (int j = 0; j < n; ++j) {
        if (grid.nodes[j] > 0.0 && f[j] > level) {
            if (std::isnan(rmin)) rmin = grid.nodes[j];
            rmax = grid.nodes[j];
        }
    }
    if (std::isnan(rmin)) {
        // Degenerate: nothing above the level on the positive half.
        for (int j = 0; j < n; ++j) {
            if (grid.nodes[j] > 0.0) return {grid.nodes[j], grid.nodes[j]};
        }
        throw std::runtime_error("empty field: no positive nodes");
    }
    return {rmin, rmax};
}

MeshMap build_map_one_bump(double r, double delta, double L) {
    if (!(r > 0.0 && r < L)) throw std::invalid_argument("build_map_one_bump: need 0 < r < L");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("build_map_one_bump: need delta in (0,1)");
    MeshMap map;
    map.kind = BumpKind::OneBump;
    map.delta = delta;
    map.L = L;
    map.knots = {r};

    MapPiece core = make_linear(r / delta, 0.0, delta);
    MapPiece tail;
    tail.s0 = delta;
    tail.s1 = 1.0;
    // Concave-up quintic below the diagonal, sigmoid above; fall through to
    // the other form, then to the chord, whenever a candidate fails to be
    // increasing on its interval.
    auto candidates = [&](MapPiece& out, int rung) {
        switch (rung) {
            case 0:
                return r / delta <= L ? quintic_from_values(delta, r, 1.0, L, out)
                                      : sigmoid_from_values(delta, r, 1.0, L, L, out);
            case 1:
                return r / delta <= L ? sigmoid_from_values(delta, r, 1.0, L, L, out)
                                      : quintic_from_values(delta, r, 1.0, L, out);
            default:
                out = make_affine(delta, r, 1.0, L);
                return true;
        }
    };
    for (int rung = 0; rung < 3; ++rung) {
        MapPiece trial;
        trial.s0 = delta;
        trial.s1 = 1.0;
        if (!candidates(trial, rung)) continue;
        trial.s0 = delta;
        trial.s1 = 1.0;
        if (!piece_increasing(trial)) continue;
        tail = trial;
        break;
    }
    map.pieces = {core, tail};
    check_monotone_and_knots(map);
    return map;
}

MeshMap build_map_two_bump(double r1, double r2, double delta, double L, double min_sep) {
    if (!(r1 > 0.0 && r2 >= r1 && r2 < L))
        throw std::invalid_argument("build_map_two_bump: need 0 < r1 <= r2 < L");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("build_map_two_bump: need delta in (0,1)");
    if (r2 - r1 < min_sep) {
        // Flat middle chord would stall the map; widen to one node spacing.
        const double mid = 0.5 * (r1 + r2);
        r1 = std::max(0.25 * min_sep, mid - 0.5 * min_sep);
        r2 = r1 + min_sep;
        if (r2 >= L) {
            r2 = 0.5 * (r1 + L);
        }
    }
    const double q = 0.5 - 0.5 * delta;
    const double p = 0.5 + 0.5 * delta;
    const double slope = (r2 - r1) / delta;

    MeshMap map;
    map.kind = BumpKind::TwoBump;
    map.delta = delta;
    map.L = L;
    map.knots = {r1, r2};

    // Middle chord r1 + slope*(s - q) stored as a degenerate quintic.
    MapPiece middle;
    middle.form = MapPiece::Form::Quintic;
    middle.s0 = q;
    middle.s1 = p;
    middle.a = 0.0;
    middle.b = slope;
    middle.shift = r1 - slope * q;

    // Outer pieces per the concavity switch: quintic left / sigmoid right for
    // a steep chord, sigmoid left / quintic right otherwise. The left piece
    // passes through the origin by construction, so its free coefficients are
    // closed with slope continuity against the chord; when no candidate form
    // is increasing the ladder drops to a plain power or chord piece.
    auto pick = [&](double s0, double s1, auto&&... makers) {
        MapPiece piece;
        auto attempt = [&](auto&& maker) {
            MapPiece trial;
            trial.s0 = s0;
            trial.s1 = s1;
            if (!maker(trial)) return false;
            trial.s0 = s0;
            trial.s1 = s1;
            if (!piece_increasing(trial)) return false;
            piece = trial;
            return true;
        };
        if (!(attempt(makers) || ...))
            throw std::runtime_error("map construction failed: outer solve");
        return piece;
    };

    auto left_quintic_c1 = [&](MapPiece& out) { return quintic_from_value_slope(q, r1, slope, out); };
    auto left_sigmoid_c1 = [&](MapPiece& out) {
        return sigmoid_from_value_slope(q, r1, slope, L, out);
    };
    auto left_pure_quintic = [&](MapPiece& out) {
        out.form = MapPiece::Form::Quintic;
        out.a = r1 / (q * q * q * q * q);
        out.b = 0.0;
        out.shift = 0.0;
        return true;
    };
    auto left_chord = [&](MapPiece& out) {
        out = make_affine(0.0, 0.0, q, r1);
        return true;
    };
    auto right_quintic = [&](MapPiece& out) { return quintic_from_values(p, r2, 1.0, L, out); };
    auto right_sigmoid = [&](MapPiece& out) {
        return sigmoid_from_values(p, r2, 1.0, L, L, out);
    };
    auto right_chord = [&](MapPiece& out) {
        out = make_affine(p, r2, 1.0, L);
        return true;
    };

    MapPiece left =
        slope >= L ? pick(0.0, q, left_quintic_c1, left_sigmoid_c1, left_pure_quintic, left_chord)
                   : pick(0.0, q, left_sigmoid_c1, left_quintic_c1, left_pure_quintic, left_chord);
    MapPiece right = slope >= L ? pick(p, 1.0, right_sigmoid, right_quintic, right_chord)
                                : pick(p, 1.0, right_quintic, right_sigmoid, right_chord);

    map.pieces = {left, middle, right};
    check_monotone_and_knots(map);
    return map;
}

std::vector<double> make_uniform_s_nodes(int n) {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = -1.0 + (i + 0.5) * 2.0 / n;
    return s;
}

std::pair<Grid1D, std::vector<double>> refine(const Grid1D& grid, const std::vector<double>& f,
                                              const MeshMap& map,
                                              const std::vector<double>& s_nodes) {
    if (static_cast<int>(s_nodes.size()) != grid.size())
        throw std::invalid_argument("refine: s_nodes must match grid size");
    std::vector<double> new_nodes(s_nodes.size());
    for (size_t i = 0; i < s_nodes.size(); ++i) new_nodes[i] = map.eval_odd(s_nodes[i]);
    Grid1D new_grid = make_grid_from_nodes(grid.half_length, std::move(new_nodes));
    const double mass = quadrature_mass(grid, f);
    std::vector<double> new_values = interpolate(grid, f, new_grid.nodes);
    new_values = rescale_mass(new_grid, std::move(new_values), mass);
    return {std::move(new_grid), std::move(new_values)};
}

}  // namespace granular
