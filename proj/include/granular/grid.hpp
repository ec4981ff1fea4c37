#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace granular {

// Values below this are clipped before any mass rescale; keeps log f finite
// and the Fisher barrier well defined.
inline constexpr double kDensityFloor = 1e-10;

// Non-uniform 1D grid on [-L, L]. Nodes are cell-centered samples: the first
// and last node lie strictly inside the domain. Quadrature weights use the
// boundary-corrected trapezoid rule
//   w_1 = L + (v_1+v_2)/2,  w_j = (v_{j+1}-v_{j-1})/2,  w_N = L - (v_{N-1}+v_N)/2
// so that the weights of any admissible grid sum to exactly 2L.
struct Grid1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    double half_length = 0.0;

    int size() const { return static_cast<int>(nodes.size()); }
    double min_spacing() const;
};

// Uniform cell-centered grid: v_i = -L + (i - 1/2) * 2L/N, i = 1..N.
Grid1D make_uniform_grid(double half_length, int n);

// Wraps an externally produced strictly increasing node list; recomputes the
// quadrature weights. Throws std::invalid_argument on a malformed node list.
Grid1D make_grid_from_nodes(double half_length, std::vector<double> nodes);

// Boundary-corrected quadrature sum(values_j * w_j).
double quadrature_mass(const Grid1D& grid, const std::vector<double>& values);

// Monotone (shape-preserving) piecewise cubic Hermite interpolant with
// Fritsch-Carlson harmonic-mean slopes, matching the usual `pchip' behavior.
// Queries outside the node range clamp to the nearest endpoint value.
class PchipInterpolant {
public:
    PchipInterpolant(std::vector<double> x, std::vector<double> y);
    double operator()(double q) const;

private:
    std::vector<double> x_, y_, slope_;
};

std::vector<double> interpolate(const Grid1D& src, const std::vector<double>& values,
                                const std::vector<double>& query);

// out_j = max(values_j, floor) * target_mass / mass(floored values). Flooring
// happens before the mass is measured so the output mass is exact.
std::vector<double> rescale_mass(const Grid1D& grid, std::vector<double> values,
                                 double target_mass);

// f(x_i, v_j) sampled on a tensor grid; row-major over x then v.
struct PhaseField {
    Grid1D x_grid;
    Grid1D v_grid;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<size_t>(i) * v_grid.size() + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * v_grid.size() + j]; }
    int nx() const { return x_grid.size(); }
    int nv() const { return v_grid.size(); }

    std::vector<double> row(int i) const;
    std::vector<double> column(int j) const;
};

PhaseField make_phase_field(const Grid1D& x_grid, const Grid1D& v_grid,
                            const std::function<double(double, double)>& f0);

double total_mass(const PhaseField& field);

// Snapshot file: header line `# t=<time> Nx=<Nx> Nv=<Nv>`, then rows `x v f`
// with 17 significant digits, row-major over x then v.
void write_snapshot(const std::string& path, double t, const PhaseField& field);
PhaseField read_snapshot(const std::string& path, double* t_out = nullptr);

// Velocity-only snapshot of a homogeneous state, written as Nx=1 with x=0.
void write_profile_snapshot(const std::string& path, double t, const Grid1D& v_grid,
                            const std::vector<double>& f);

}  // namespace granular
