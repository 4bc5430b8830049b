#pragma once

#include <memory>
#include <vector>

#include "nlt/field.hpp"

namespace nlt {

class KernelTable;

/// The transport velocity v(r) = int_0^inf du/drho g(r/rho) rho^{1-alpha} drho
/// sampled at the nodes of the field's own grid. v(0) = 0 identically (g is
/// odd), and for alpha = 2 the operator degenerates to du/dr pointwise.
struct VelocityField {
    std::vector<double> grid;
    std::vector<double> values;
    /// Empirical accuracy: max deviation from the independent adaptive
    /// evaluation over a sample of nodes (0 for the local alpha = 2 branch).
    double quadrature_error_estimate = 0.0;
};

/// Process-wide cache of kernel tables keyed by (d, alpha); building a table
/// costs ~10 ms, so repeated velocity evaluations share one instance.
std::shared_ptr<const KernelTable> kernel_table_for(const KernelSpec& spec);

/// Velocity at every grid node of u. Cell-aligned fixed quadrature away from
/// the moving singularity rho = r_i plus graded panels across it, O(M^2)
/// total; rows are filled by a parallel map. Throws std::domain_error if the
/// support of u reaches past 0.9 r_max (the integral would be truncated).
VelocityField velocity(const RadialField& u);

/// Adaptive evaluation of the velocity at a single radius (odd in r): panel
/// decomposition split at rho = r with tanh-sinh across the singularity,
/// Gauss-Kronrod elsewhere. Serves as the accuracy reference for velocity().
double velocity_at(const RadialField& u, double r, double tol = 1e-9);

} // namespace nlt
