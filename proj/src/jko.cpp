#include "granular/jko.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace granular {

CollisionOperator make_collision_operator(const Grid1D& grid, const KernelSpec& kspec,
                                          double lambda) {
    CollisionOperator op;
    op.grid = grid;
    const int n = grid.size();
    op.b_matrix = kernel_matrix(kspec, grid.nodes);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
            op.b_matrix[static_cast<size_t>(i) * n + l] *=
                0.5 * lambda * grid.weights[i] * grid.weights[l];
    return op;
}

double energy(const std::vector<double>& f, const Grid1D& v_grid, const KernelSpec& kspec) {
    const int n = v_grid.size();
    if (static_cast<int>(f.size()) != n) throw std::invalid_argument("energy: length mismatch");
    const std::vector<double> w = kernel_matrix(kspec, v_grid.nodes);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int l = 0; l < n; ++l) row += w[static_cast<size_t>(i) * n + l] * f[l] * v_grid.weights[l];
        e += row * f[i] * v_grid.weights[i];
    }
    return e;
}

double energy(const std::vector<double>& f, const CollisionOperator& op) {
    const int n = op.grid.size();
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int l = 0; l < n; ++l) row += op.b_matrix[static_cast<size_t>(i) * n + l] * f[l];
        e += row * f[i];
    }
    return e;
}

namespace {

void check_positive(const std::vector<double>& f) {
    for (double v : f)
        if (!(v > 0.0)) throw std::runtime_error("positivity violated");
}

}  // namespace

double objective(const JkoState& u, double dt, const JkoOptions& opts,
                 const CollisionOperator& op) {
    check_positive(u.f);
    const int n = op.grid.size();
    const auto& v = op.grid.nodes;
    const double cbeta = dt * dt / (opts.beta * opts.beta);
    double F = 0.0;
    for (int k = 0; k < n - 1; ++k) {
        const double dv = v[k + 1] - v[k];
        const double s = u.f[k] + u.f[k + 1];
        const double d = std::log(u.f[k + 1]) - std::log(u.f[k]);
        F += (2.0 * u.m[k] * u.m[k] / s + (cbeta / (dv * dv)) * d * d * 0.5 * s) * dv;
    }
    return F + dt * energy(u.f, op);
}

std::vector<double> objective_gradient(const JkoState& u, double dt, const JkoOptions& opts,
                                       const CollisionOperator& op) {
    check_positive(u.f);
    const int n = op.grid.size();
    const auto& v = op.grid.nodes;
    const double cbeta = dt * dt / (opts.beta * opts.beta);
    std::vector<double> g(2 * n - 1, 0.0);
    for (int k = 0; k < n - 1; ++k) {
        const double dv = v[k + 1] - v[k];
        const double s = u.f[k] + u.f[k + 1];
        const double d = std::log(u.f[k + 1]) - std::log(u.f[k]);
        const double c = cbeta / (dv * dv);
        const double mk = u.m[k];
        g[k] += dv * (-2.0 * mk * mk / (s * s) + c * (0.5 * d * d - s * d / u.f[k]));
        g[k + 1] += dv * (-2.0 * mk * mk / (s * s) + c * (0.5 * d * d + s * d / u.f[k + 1]));
        g[n + k] = dv * 4.0 * mk / s;
    }
    // dE/df_i = 2 sum_l B_{i,l} f_l  (B symmetric, zero diagonal)
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        const double* bi = &op.b_matrix[static_cast<size_t>(i) * n];
        for (int l = 0; l < n; ++l) row += bi[l] * u.f[l];
        g[i] += dt * 2.0 * row;
    }
    return g;
}

std::vector<double> constraint_matrix_dense(const Grid1D& grid) {
    const int n = grid.size();
    const int cols = 2 * n - 1;
    std::vector<double> a(static_cast<size_t>(n) * cols, 0.0);
    for (int j = 0; j < n; ++j) {
        a[static_cast<size_t>(j) * cols + j] = 1.0;
        if (j < n - 1) a[static_cast<size_t>(j) * cols + n + j] = 1.0 / grid.weights[j];
        if (j > 0) a[static_cast<size_t>(j) * cols + n + j - 1] = -1.0 / grid.weights[j];
    }
    return a;
}

std::vector<double> constraint_residual(const JkoState& u, const std::vector<double>& f_prev,
                                        const Grid1D& grid) {
    const int n = grid.size();
    std::vector<double> r(n);
    for (int j = 0; j < n; ++j) {
        double div = 0.0;
        if (j < n - 1) div += u.m[j];
        if (j > 0) div -= u.m[j - 1];
        r[j] = f_prev[j] - (u.f[j] + div / grid.weights[j]);
    }
    return r;
}

namespace {

// Banded LU with partial pivoting (LAPACK gbtrf-style storage): kl sub- and
// ku superdiagonals, pivoting fill of kl extra superdiagonals. Returns false
// on a vanishing pivot.
struct BandedLU {
    int n = 0, kl = 0, ku = 0;
    std::vector<double> ab;  // (2kl+ku+1) x n, column-major bands
    std::vector<int> piv;

    void init(int n_, int kl_, int ku_) {
        n = n_;
        kl = kl_;
        ku = ku_;
        ab.assign(static_cast<size_t>(2 * kl + ku + 1) * n, 0.0);
        piv.assign(n, 0);
    }
    void clear() { std::fill(ab.begin(), ab.end(), 0.0); }
    double& at(int i, int j) { return ab[static_cast<size_t>(j) * (2 * kl + ku + 1) + (kl + ku + i - j)]; }

    bool factor() {
        const int ldab = 2 * kl + ku + 1;
        for (int j = 0; j < n; ++j) {
            const int ilast = std::min(n - 1, j + kl);
            int ip = j;
            double pmax = std::fabs(at(j, j));
            for (int i = j + 1; i <= ilast; ++i) {
                const double a = std::fabs(at(i, j));
                if (a > pmax) {
                    pmax = a;
                    ip = i;
                }
            }
            piv[j] = ip;
            if (!(pmax > 0.0) || !std::isfinite(pmax)) return false;
            const int jlast = std::min(n - 1, j + kl + ku);
            if (ip != j)
                for (int c = j; c <= jlast; ++c) std::swap(at(j, c), at(ip, c));
            const double pivot = at(j, j);
            for (int i = j + 1; i <= ilast; ++i) {
                const double l = at(i, j) / pivot;
                at(i, j) = l;
                for (int c = j + 1; c <= jlast; ++c) at(i, c) -= l * at(j, c);
            }
        }
        (void)ldab;
        return true;
    }

    void solve(std::vector<double>& x) {
        for (int j = 0; j < n; ++j) {
            if (piv[j] != j) std::swap(x[j], x[piv[j]]);
            const int ilast = std::min(n - 1, j + kl);
            for (int i = j + 1; i <= ilast; ++i) x[i] -= at(i, j) * x[j];
        }
        for (int j = n - 1; j >= 0; --j) {
            const int first = std::max(0, j - kl - ku);
            x[j] /= at(j, j);
            for (int i = first; i < j; ++i) x[i] -= at(i, j) * x[j];
        }
    }
};

// Per-flux Hessian blocks of F over (f_k, f_{k+1}, m_k). The kinetic part is
// an exact rank-one PSD block; the Fisher 2x2 is shifted to its nearest PSD
// counterpart so the SQP model stays convex away from the minimizer.
struct FluxHessian {
    double aa, bb, ab, mm, ma, mb;
};

FluxHessian flux_hessian(double fa, double fb, double m, double dv, double c) {
    const double s = fa + fb;
    const double d = std::log(fb) - std::log(fa);
    FluxHessian h;
    const double k = 4.0 * dv / (s * s * s);
    h.aa = k * m * m;
    h.bb = k * m * m;
    h.ab = k * m * m;
    h.mm = k * s * s;
    h.ma = -k * m * s;
    h.mb = -k * m * s;
    // Fisher 2x2 over (fa, fb), eigenvalue-shifted to PSD.
    double paa = c * dv * (s * (1.0 + d) / (fa * fa) - 2.0 * d / fa);
    double pbb = c * dv * (s * (1.0 - d) / (fb * fb) + 2.0 * d / fb);
    double pab = c * dv * (d / fb - d / fa - s / (fa * fb));
    const double tr = paa + pbb;
    const double det = paa * pbb - pab * pab;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double eigmin = 0.5 * (tr - disc);
    if (eigmin < 0.0) {
        paa -= eigmin;
        pbb -= eigmin;
    }
    h.aa += paa;
    h.bb += pbb;
    h.ab += pab;
    return h;
}

}  // namespace

CollisionResult solve_collision(const std::vector<double>& f_prev, double dt,
                                const CollisionOperator& op, const JkoOptions& opts) {
    const Grid1D& grid = op.grid;
    const int n = grid.size();
    if (static_cast<int>(f_prev.size()) != n)
        throw std::invalid_argument("solve_collision: length mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("solve_collision: dt must be positive");

    std::vector<double> b(f_prev);
    for (double& x : b) x = std::max(x, kDensityFloor);

    JkoState u;
    u.f = b;
    u.m.assign(n - 1, 0.0);

    // KKT unknowns interleaved per node, [y_j, f_j, m_j], so the system is
    // banded with bandwidth 3.
    const int dim = 3 * n - 1;
    auto iy = [](int j) { return 3 * j; };
    auto jf = [](int j) { return 3 * j + 1; };
    auto jm = [](int k) { return 3 * k + 2; };

    BandedLU kkt;
    kkt.init(dim, 3, 3);
    std::vector<double> rhs(dim), g;
    const auto& w = grid.weights;
    const auto& v = grid.nodes;
    const double cbeta = dt * dt / (opts.beta * opts.beta);

    bool converged = false;
    bool singular = false;
    double zeta = 1.0;
    for (int l = 0; l < opts.max_iter; ++l) {
        if (zeta <= opts.tol) {
            converged = true;
            break;
        }
        g = objective_gradient(u, dt, opts, op);

        kkt.clear();
        std::fill(rhs.begin(), rhs.end(), 0.0);
        // Constraint rows: p_f + (p_m|right - p_m|left)/w = r.
        for (int j = 0; j < n; ++j) {
            kkt.at(iy(j), jf(j)) = 1.0;
            kkt.at(jf(j), iy(j)) = 1.0;
            double div = 0.0;
            if (j < n - 1) {
                kkt.at(iy(j), jm(j)) = 1.0 / w[j];
                kkt.at(jm(j), iy(j)) = 1.0 / w[j];
                div += u.m[j];
            }
            if (j > 0) {
                kkt.at(iy(j), jm(j - 1)) = -1.0 / w[j];
                kkt.at(jm(j - 1), iy(j)) = -1.0 / w[j];
                div -= u.m[j - 1];
            }
            rhs[iy(j)] = b[j] - (u.f[j] + div / w[j]);
            rhs[jf(j)] = -g[j];
            if (j < n - 1) rhs[jm(j)] = -g[n + j];
        }
        // Stationarity rows: H p + A^T y = -g with H = per-flux blocks of
        // grad^2 F, PSD by construction, diagonal floored.
        for (int k = 0; k < n - 1; ++k) {
            const double dv = v[k + 1] - v[k];
            const FluxHessian h =
                flux_hessian(u.f[k], u.f[k + 1], u.m[k], dv, cbeta / (dv * dv));
            kkt.at(jf(k), jf(k)) += h.aa;
            kkt.at(jf(k + 1), jf(k + 1)) += h.bb;
            kkt.at(jf(k), jf(k + 1)) += h.ab;
            kkt.at(jf(k + 1), jf(k)) += h.ab;
            kkt.at(jm(k), jm(k)) += h.mm;
            kkt.at(jm(k), jf(k)) += h.ma;
            kkt.at(jf(k), jm(k)) += h.ma;
            kkt.at(jm(k), jf(k + 1)) += h.mb;
            kkt.at(jf(k + 1), jm(k)) += h.mb;
        }
        for (int j = 0; j < n; ++j) {
            kkt.at(jf(j), jf(j)) = std::max(kkt.at(jf(j), jf(j)), opts.diag_floor);
            if (j < n - 1) kkt.at(jm(j), jm(j)) = std::max(kkt.at(jm(j), jm(j)), opts.diag_floor);
        }

        if (!kkt.factor()) {
            singular = true;
            break;
        }
        kkt.solve(rhs);

        // Relaxation with halving whenever a density component would leave
        // the positive cone. A fully floored step is not accepted as
        // convergence; the iteration keeps running into the cap instead.
        double omega = opts.omega;
        int halvings = 0;
        for (; halvings < 60; ++halvings) {
            bool ok = true;
            for (int j = 0; j < n; ++j)
                if (u.f[j] + omega * rhs[jf(j)] <= 0.0) {
                    ok = false;
                    break;
                }
            if (ok) break;
            omega *= 0.5;
        }
        double unorm2 = 0.0, pnorm2 = 0.0;
        for (int j = 0; j < n; ++j) {
            unorm2 += u.f[j] * u.f[j];
            pnorm2 += rhs[jf(j)] * rhs[jf(j)];
            if (j < n - 1) {
                unorm2 += u.m[j] * u.m[j];
                pnorm2 += rhs[jm(j)] * rhs[jm(j)];
            }
        }
        for (int j = 0; j < n; ++j) u.f[j] += omega * rhs[jf(j)];
        for (int k = 0; k < n - 1; ++k) u.m[k] += omega * rhs[jm(k)];
        zeta = omega * std::sqrt(pnorm2) / std::sqrt(unorm2);
        if (halvings >= 20) zeta = 1.0;
        if (!std::isfinite(zeta)) {
            singular = true;
            break;
        }
    }

    CollisionResult out;
    out.f = u.f;
    out.exit_flag = (converged && !singular) ? 0 : 1;
    return out;
}

}  // namespace granular
