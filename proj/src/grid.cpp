#include "granular/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace granular {

double Grid1D::min_spacing() const {
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < nodes.size(); ++i) dmin = std::min(dmin, nodes[i] - nodes[i - 1]);
    return dmin;
}

static std::vector<double> boundary_corrected_weights(double L, const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> w(n);
    w[0] = L + 0.5 * (v[0] + v[1]);
    for (int j = 1; j < n - 1; ++j) w[j] = 0.5 * (v[j + 1] - v[j - 1]);
    w[n - 1] = L - 0.5 * (v[n - 1] + v[n - 2]);
    return w;
}

Grid1D make_uniform_grid(double half_length, int n) {
    if (n < 3) throw std::invalid_argument("grid: need at least 3 nodes");
    if (half_length <= 0.0) throw std::invalid_argument("grid: half_length must be positive");
    std::vector<double> v(n);
    const double dx = 2.0 * half_length / n;
    for (int i = 0; i < n; ++i) v[i] = -half_length + (i + 0.5) * dx;
    return make_grid_from_nodes(half_length, std::move(v));
}

Grid1D make_grid_from_nodes(double half_length, std::vector<double> nodes) {
    const int n = static_cast<int>(nodes.size());
    if (n < 3) throw std::invalid_argument("grid: need at least 3 nodes");
    for (int i = 1; i < n; ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw std::invalid_argument("grid: nodes must be strictly increasing");
    if (!(nodes.front() > -half_length) || !(nodes.back() < half_length))
        throw std::invalid_argument("grid: nodes must lie strictly inside (-L, L)");
    Grid1D g;
    g.half_length = half_length;
    g.weights = boundary_corrected_weights(half_length, nodes);
    g.nodes = std::move(nodes);
    for (double w : g.weights)
        if (!(w > 0.0)) throw std::invalid_argument("grid: nonpositive quadrature weight");
    return g;
}

double quadrature_mass(const Grid1D& grid, const std::vector<double>& values) {
    if (values.size() != grid.nodes.size())
        throw std::invalid_argument("quadrature_mass: length mismatch");
    double sum = 0.0;
    for (size_t j = 0; j < values.size(); ++j) sum += values[j] * grid.weights[j];
    return sum;
}

PchipInterpolant::PchipInterpolant(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (n < 2 || y_.size() != x_.size())
        throw std::invalid_argument("pchip: need matching lists with at least 2 points");
    slope_.assign(n, 0.0);
    if (n == 2) {
        slope_[0] = slope_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
        return;
    }
    std::vector<double> h(n - 1), d(n - 1);
    for (int k = 0; k < n - 1; ++k) {
        h[k] = x_[k + 1] - x_[k];
        if (!(h[k] > 0.0)) throw std::invalid_argument("pchip: abscissae must increase");
        d[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    // Interior: Fritsch-Carlson weighted harmonic mean, zero at sign changes.
    for (int k = 1; k < n - 1; ++k) {
        if (d[k - 1] * d[k] <= 0.0) {
            slope_[k] = 0.0;
        } else {
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            slope_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    // Endpoints: non-centered three-point formula, clipped to keep shape.
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 < 0.0 && std::fabs(s) > 3.0 * std::fabs(d0))
            s = 3.0 * d0;
        return s;
    };
    slope_[0] = end_slope(h[0], h[1], d[0], d[1]);
    slope_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

double PchipInterpolant::operator()(double q) const {
    const int n = static_cast<int>(x_.size());
    if (q <= x_.front()) return y_.front();
    if (q >= x_.back()) return y_.back();
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (x_[mid] > q)
            hi = mid;
        else
            lo = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    const double t = (q - x_[lo]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[lo] + h * h10 * slope_[lo] + h01 * y_[lo + 1] + h * h11 * slope_[lo + 1];
}

std::vector<double> interpolate(const Grid1D& src, const std::vector<double>& values,
                                const std::vector<double>& query) {
    PchipInterpolant p(src.nodes, values);
    std::vector<double> out(query.size());
    for (size_t i = 0; i < query.size(); ++i) out[i] = p(query[i]);
    return out;
}

std::vector<double> rescale_mass(const Grid1D& grid, std::vector<double> values,
                                 double target_mass) {
    if (!(target_mass > 0.0)) throw std::invalid_argument("rescale_mass: target must be positive");
    for (double& v : values) v = std::max(v, kDensityFloor);
    const double mass = quadrature_mass(grid, values);
    const double scale = target_mass / mass;
    for (double& v : values) v *= scale;
    return values;
}

std::vector<double> PhaseField::row(int i) const {
    std::vector<double> out(v_grid.size());
    for (int j = 0; j < v_grid.size(); ++j) out[j] = at(i, j);
    return out;
}

std::vector<double> PhaseField::column(int j) const {
    std::vector<double> out(x_grid.size());
    for (int i = 0; i < x_grid.size(); ++i) out[i] = at(i, j);
    return out;
}

PhaseField make_phase_field(const Grid1D& x_grid, const Grid1D& v_grid,
                            const std::function<double(double, double)>& f0) {
    PhaseField field{x_grid, v_grid, {}};
    field.values.resize(static_cast<size_t>(x_grid.size()) * v_grid.size());
    for (int i = 0; i < x_grid.size(); ++i)
        for (int j = 0; j < v_grid.size(); ++j)
            field.at(i, j) = std::max(f0(x_grid.nodes[i], v_grid.nodes[j]), kDensityFloor);
    return field;
}

double total_mass(const PhaseField& field) {
    double sum = 0.0;
    for (int i = 0; i < field.nx(); ++i) {
        double row = 0.0;
        for (int j = 0; j < field.nv(); ++j) row += field.at(i, j) * field.v_grid.weights[j];
        sum += row * field.x_grid.weights[i];
    }
    return sum;
}

void write_snapshot(const std::string& path, double t, const PhaseField& field) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_snapshot: cannot open " + path);
    std::fprintf(fp, "# t=%.17g Nx=%d Nv=%d\n", t, field.nx(), field.nv());
    for (int i = 0; i < field.nx(); ++i)
        for (int j = 0; j < field.nv(); ++j)
            std::fprintf(fp, "%.17g %.17g %.17g\n", field.x_grid.nodes[i], field.v_grid.nodes[j],
                         field.at(i, j));
    std::fclose(fp);
}

void write_profile_snapshot(const std::string& path, double t, const Grid1D& v_grid,
                            const std::vector<double>& f) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_profile_snapshot: cannot open " + path);
    std::fprintf(fp, "# t=%.17g Nx=1 Nv=%d\n", t, v_grid.size());
    for (int j = 0; j < v_grid.size(); ++j)
        std::fprintf(fp, "%.17g %.17g %.17g\n", 0.0, v_grid.nodes[j], f[j]);
    std::fclose(fp);
}

PhaseField read_snapshot(const std::string& path, double* t_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
    std::string header;
    std::getline(in, header);
    double t = 0.0;
    int nx = 0, nv = 0;
    if (std::sscanf(header.c_str(), "# t=%lf Nx=%d Nv=%d", &t, &nx, &nv) != 3)
        throw std::runtime_error("read_snapshot: bad header in " + path);
    if (t_out) *t_out = t;
    std::vector<double> xcol, vcol, fs;
    fs.reserve(static_cast<size_t>(nx) * nv);
    double x, v, f;
    while (in >> x >> v >> f) {
        xcol.push_back(x);
        vcol.push_back(v);
        fs.push_back(f);
    }
    if (fs.size() != static_cast<size_t>(nx) * nv)
        throw std::runtime_error("read_snapshot: truncated data in " + path);
    std::vector<double> xs(nx), vs(nv);
    for (int i = 0; i < nx; ++i) xs[i] = xcol[static_cast<size_t>(i) * nv];
    for (int j = 0; j < nv; ++j) vs[j] = vcol[j];
    // Half-lengths are not stored; rebuild with the tightest symmetric domain
    // consistent with cell-centered samples.
    auto infer_L = [](const std::vector<double>& nodes) {
        const int n = static_cast<int>(nodes.size());
        double L = std::max(std::fabs(nodes.front()), std::fabs(nodes.back()));
        if (n > 1) L += 0.5 * std::min(nodes[1] - nodes[0], nodes[n - 1] - nodes[n - 2]);
        return L;
    };
    PhaseField field;
    field.x_grid = make_grid_from_nodes(infer_L(xs), xs);
    field.v_grid = make_grid_from_nodes(infer_L(vs), vs);
    field.values = std::move(fs);
    return field;
}

}  // namespace granular
