#pragma once

#include <vector>

#include "granular/grid.hpp"
#include "granular/kernels.hpp"

namespace granular {

// Unknown of one collision solve: densities at nodes and fluxes at half
// nodes. Boundary fluxes m_{1/2} = m_{N+1/2} = 0 are implicit (no-flux).
struct JkoState {
    std::vector<double> f;  // size N, strictly positive
    std::vector<double> m;  // size N-1
};

struct JkoOptions {
    double beta = 1.0;        // Fisher regularization strength
    double omega = 1.0;       // SQP relaxation step in (0, 1]
    int max_iter = 500;       // iteration cap; hitting it raises the exit flag
    double tol = 1e-6;        // relative-update stopping criterion
    double diag_floor = 1e-8; // lower bound for the Hessian diagonal

    bool operator==(const JkoOptions&) const = default;
};

// Interaction term of one collision step. The inelasticity strength enters
// as (lambda/2) W folded into the assembled matrix, so the discrete energy
// matches the drift strength of the kinetic equation.
struct CollisionOperator {
    Grid1D grid;
    std::vector<double> b_matrix;  // (lambda/2) W(v_i - v_l) w_i w_l, row-major
};

CollisionOperator make_collision_operator(const Grid1D& grid, const KernelSpec& kspec,
                                          double lambda);

// E(f) = sum_{i,l} W_{i,l} f_i f_l h_i h_l with boundary-corrected weights.
double energy(const std::vector<double>& f, const Grid1D& v_grid, const KernelSpec& kspec);
double energy(const std::vector<double>& f, const CollisionOperator& op);

// J(u) = F(f, m) + dt * E(f) with
// F = sum_j [ 2 m^2/(f_j+f_{j-1}) + (dt^2/(beta^2 dv_j^2)) (log f_j - log f_{j-1})^2 (f_j+f_{j-1})/2 ] dv_j.
// Throws if any f component is nonpositive.
double objective(const JkoState& u, double dt, const JkoOptions& opts,
                 const CollisionOperator& op);

// Analytic gradient of J, concatenated [df, dm]; used by the SQP step and
// checked against finite differences in the tests.
std::vector<double> objective_gradient(const JkoState& u, double dt, const JkoOptions& opts,
                                       const CollisionOperator& op);

// Dense N x (2N-1) constraint matrix A with A u = f_prev encoding
// f_j + (m_{j+1/2} - m_{j-1/2})/h_j = f_prev_j; exposed for verification.
std::vector<double> constraint_matrix_dense(const Grid1D& grid);

// Residual f_prev - A u, componentwise.
std::vector<double> constraint_residual(const JkoState& u, const std::vector<double>& f_prev,
                                        const Grid1D& grid);

struct CollisionResult {
    std::vector<double> f;
    int exit_flag = 0;  // 1 when the SQP hit max_iter without converging
};

// One regularized JKO step solved by SQP with a diagonal Hessian model and
// the linear equality constraint eliminated through its Schur complement
// (tridiagonal, solved directly). Mass is conserved exactly by feasibility.
CollisionResult solve_collision(const std::vector<double>& f_prev, double dt,
                                const CollisionOperator& op, const JkoOptions& opts);

}  // namespace granular
