#include "granular/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace granular {

double kernel_value(const KernelSpec& spec, double v) {
    if (v == 0.0) return 0.0;
    const double p = std::pow(std::fabs(v), spec.gamma);
    return spec.normalized ? p / spec.gamma : p;
}

double kernel_grad(const KernelSpec& spec, double v) {
    if (v == 0.0) return 0.0;
    const double sign = v > 0.0 ? 1.0 : -1.0;
    const double p = sign * std::pow(std::fabs(v), spec.gamma - 1.0);
    return spec.normalized ? p : spec.gamma * p;
}

std::vector<double> kernel_matrix(const KernelSpec& spec, const std::vector<double>& v_nodes) {
    const int n = static_cast<int>(v_nodes.size());
    for (int i = 1; i < n; ++i)
        if (!(v_nodes[i] > v_nodes[i - 1]))
            throw std::invalid_argument("kernel_matrix: nodes must be strictly increasing");
    std::vector<double> w(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int l = i + 1; l < n; ++l) {
            const double val = kernel_value(spec, v_nodes[i] - v_nodes[l]);
            w[static_cast<size_t>(i) * n + l] = val;
            w[static_cast<size_t>(l) * n + i] = val;
        }
    }
    return w;
}

}  // namespace granular
