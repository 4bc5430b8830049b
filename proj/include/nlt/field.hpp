#pragma once

#include <cstddef>
#include <vector>

#include "nlt/kernel.hpp"

namespace nlt {

/// A radial profile u(r) sampled on a graded grid 0 = r_0 < ... < r_M,
/// evaluated between nodes by a monotonicity-preserving piecewise cubic.
///
/// The profile represents an even function of the full radial variable, so
/// the interpolant is built with du/dr(0) = 0 and eval/deriv accept negative
/// arguments through u(|r|). Beyond r_M the field is treated as identically
/// zero (fields are expected to be compactly supported well inside r_M).
///
/// Construct through make_field, which validates the inputs and fits the
/// limited Hermite slopes; the members are left public for cheap read access.
struct RadialField {
    std::vector<double> grid;
    std::vector<double> values;
    KernelSpec spec;
    /// Endpoint derivatives of the cubic on each cell (one slope per node).
    std::vector<double> slopes;

    double r_max() const { return grid.back(); }

    /// Interpolated value at |r|; 0 beyond the last node.
    double eval(double r) const;

    /// Interpolated du/dr at |r| (odd in r); 0 beyond the last node.
    double deriv(double r) const;

    /// u''(0) of the even extension, from the first-cell cubic with
    /// du/dr(0) = 0.
    double second_deriv_origin() const;

    /// Max of |du/dr| over all nodes and cell midpoints.
    double sup_abs_deriv() const;

    /// Last grid node whose value exceeds rel_tol times the max magnitude;
    /// 0 if the field vanishes identically.
    double support_radius(double rel_tol = 1e-12) const;
};

/// Validates the sampled data (first node at 0, strictly increasing finite
/// grid, matching sizes, at least 3 nodes, admissible spec) and fits the
/// monotone cubic slopes: shape-preserving weighted averages clamped to three
/// times the neighbouring secants, zero at sign changes of the secants, and
/// du/dr(0) = 0 for the even extension.
/// Throws std::invalid_argument on malformed data.
RadialField make_field(std::vector<double> grid, std::vector<double> values,
                       const KernelSpec& spec);

/// Shape-preserving Hermite slopes for the sampled values: the interior
/// formula is the harmonic-style weighted secant average used by make_field,
/// zeroed across secant sign changes and clamped to three times the smaller
/// neighbouring secant. zero_first_slope forces d_0 = 0 (even profiles);
/// otherwise the first node gets the same limited one-sided estimate as the
/// last one.
std::vector<double> limited_slopes(const std::vector<double>& grid,
                                   const std::vector<double>& values,
                                   bool zero_first_slope);

/// A plain monotone cubic interpolant over a sampled curve, with none of the
/// radial conventions of RadialField: no symmetry through the origin and
/// constant (boundary-value) extension outside the sampled range. Used for
/// curves that are odd or carry no parity, such as nodal transport speeds.
struct CubicCurve {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> slopes;

    /// Interpolated value; clamps to the boundary values outside the range.
    double eval(double r) const;
};

/// Builds a CubicCurve after validating the sample (at least 2 nodes,
/// strictly increasing finite grid, matching sizes). zero_first_slope as in
/// limited_slopes. Throws std::invalid_argument on malformed data.
CubicCurve make_curve(std::vector<double> grid, std::vector<double> values,
                      bool zero_first_slope);

/// Graded grid on [0, r_max] with M cells: nodes concentrate near the origin
/// and near the focus radius (where steep gradients develop), via inversion
/// of a smooth density. focus <= 0 disables the second concentration bump.
std::vector<double> make_grid(std::size_t M, double r_max, double focus);

} // namespace nlt
