#include "nlt/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nlt/mellin.hpp"
#include "nlt/quadrature.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

namespace {

/// Adaptive Gauss-Kronrod summed cell by cell over
/// [grid[first], min(grid.back(), hi)]: the interpolants have curvature
/// jumps at the nodes, so aligning the panels with the cells keeps every
/// integrand piece smooth and the subdivision shallow.
template <class F>
double over_cells(F&& f, const std::vector<double>& grid, std::size_t first,
                  double hi, double tol) {
    double total = 0.0;
    for (std::size_t j = first; j + 1 < grid.size() && grid[j] < hi; ++j)
        total += quad::gk(f, grid[j], std::min(grid[j + 1], hi), tol);
    return total;
}

} // namespace

double weighted_pairing(const RadialField& f, double delta) {
    validate_weight(f.spec, delta);
    // Nodal transport speeds from the cell-shared fast path, interpolated by
    // the same limited cubic used for profiles: the interpolation error is
    // orders below the certified-constant margins this pairing is held to,
    // and it turns every outer panel into a smooth product.
    const VelocityField vf = velocity(f);
    const CubicCurve V = make_curve(vf.grid, vf.values, false);
    const double r1 = f.grid[1];
    const auto integrand = [&](double r) {
        if (r <= 0.0) return 0.0;
        const double fp = f.deriv(r);
        if (fp == 0.0) return 0.0;
        return V.eval(r) * fp * std::pow(r, -1.0 - delta);
    };
    // Near the origin both factors vanish linearly, leaving r^(1-delta):
    // integrable but with unbounded curvature, which tanh-sinh absorbs. The
    // factors are grouped per power of r so the weight cannot overflow at
    // the double-exponentially deep samples.
    const auto near0 = [&](double r) {
        if (r <= 0.0) return 0.0;
        const double fp = f.deriv(r);
        if (fp == 0.0) return 0.0;
        return (V.eval(r) / r) * (fp / r) * std::pow(r, 1.0 - delta);
    };
    double total = quad::ts(near0, 0.0, r1, 1e-9);
    total += over_cells(integrand, f.grid, 1, f.r_max(), 1e-10);
    return total;
}

double rhs_functional(const RadialField& f, double delta) {
    validate_weight(f.spec, delta);
    const double a = f.spec.alpha;
    if (std::all_of(f.values.begin(), f.values.end(),
                    [&](double v) { return v == f.values.front(); }))
        return 0.0; // a globally constant profile has no oscillation
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    if (peak > 0.0 && std::abs(f.values.back()) > 1e-10 * peak)
        throw std::domain_error(
            "field has not decayed at the outer boundary: the oscillation "
            "integral diverges from the truncated tail");

    const double R = f.r_max();
    const double r1 = f.grid[1];
    const double f0 = f.values.front();
    const double upp0 = f.second_deriv_origin();

    // First cell from the even-extension Taylor form: the sampled difference
    // f(r) - f(0) loses all significance below ~1e-8 while the weight still
    // amplifies it, so the model value (u''(0) r^2 / 2)^2 is used instead.
    double total = 0.25 * upp0 * upp0 * std::pow(r1, 4.0 - a - delta) /
                   (4.0 - a - delta);
    const auto integrand = [&](double r) {
        const double df = f.eval(r) - f0;
        return df * df * std::pow(r, -1.0 - a - delta);
    };
    total += over_cells(integrand, f.grid, 1, R, 1e-10);
    // The field is identically zero beyond its grid, so the tail is exact.
    total += f0 * f0 * std::pow(R, -(a + delta)) / (a + delta);
    return total;
}

double blowup_functional(const RadialField& u, double delta, double L,
                         bool* max_at_origin) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error(
            "concentration weight requires delta in (0, 1)");
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::domain_error("cutoff length must be positive and finite");
    if (max_at_origin) {
        double peak = u.values.front();
        for (double v : u.values) peak = std::max(peak, v);
        *max_at_origin = !(u.values.front() < peak);
    }
    if (std::all_of(u.values.begin(), u.values.end(),
                    [&](double v) { return v == u.values.front(); }))
        return 0.0; // flat profiles concentrate nothing

    const double R = u.r_max();
    const double r1 = u.grid[1];
    const double u0 = u.values.front();
    const double upp0 = u.second_deriv_origin();

    // First cell via the Taylor form: u(0) - u(r) ~ -u''(0) r^2 / 2, whose
    // sampled counterpart drowns in rounding noise against the r^(-1-delta)
    // weight.
    const double edge = std::min(L, r1);
    double total =
        -0.5 * upp0 * std::pow(edge, 2.0 - delta) / (2.0 - delta);
    if (L > r1) {
        const auto integrand = [&](double r) {
            return (u0 - u.eval(r)) * std::pow(r, -1.0 - delta);
        };
        total += over_cells(integrand, u.grid, 1, std::min(L, R), 1e-10);
        if (L > R)
            total += u0 * (std::pow(R, -delta) - std::pow(L, -delta)) / delta;
    }
    return total;
}

double positivity_ratio(const RadialField& f, double delta) {
    const double rhs = rhs_functional(f, delta);
    if (!(rhs > 0.0))
        throw std::domain_error(
            "positivity ratio is undefined: the oscillation integral "
            "vanishes for a constant field");
    return weighted_pairing(f, delta) / rhs;
}

} // namespace nlt
