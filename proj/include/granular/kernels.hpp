#pragma once

#include <vector>

namespace granular {

// Power-law interaction kernel. normalized=true gives W(v) = |v|^gamma / gamma,
// normalized=false gives W(v) = |v|^gamma. Both variants appear in the runs;
// the factor only rescales the aggregation strength.
struct KernelSpec {
    double gamma = 2.0;
    bool normalized = true;
};

double kernel_value(const KernelSpec& spec, double v);

// d/dv W(v). For the normalized kernel this is sign(v)|v|^{gamma-1}; the
// unnormalized kernel carries an extra factor gamma. At v=0 the value is 0,
// also for gamma=1 where the sign jump is split at its midpoint.
double kernel_grad(const KernelSpec& spec, double v);

// Row-major N x N matrix W(v_i - v_l); symmetric with zero diagonal.
std::vector<double> kernel_matrix(const KernelSpec& spec, const std::vector<double>& v_nodes);

}  // namespace granular
