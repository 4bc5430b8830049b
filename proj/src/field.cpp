#include "nlt/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlt {

namespace {

/// Index of the cell [grid[i], grid[i+1]) containing r, for r in
/// [0, grid.back()]; the last cell is closed on the right.
std::size_t cell_index(const std::vector<double>& grid, double r) {
    auto it = std::upper_bound(grid.begin(), grid.end(), r);
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (i == 0) return 0;
    if (i >= grid.size()) return grid.size() - 2;
    return i - 1;
}

} // namespace

double RadialField::eval(double r) const {
    r = std::abs(r);
    if (r >= grid.back()) return r == grid.back() ? values.back() : 0.0;
    const std::size_t i = cell_index(grid, r);
    const double h = grid[i + 1] - grid[i];
    const double s = (r - grid[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * values[i] + h * h10 * slopes[i] + h01 * values[i + 1] +
           h * h11 * slopes[i + 1];
}

double RadialField::deriv(double r) const {
    const double sign = r < 0.0 ? -1.0 : 1.0;
    r = std::abs(r);
    if (r >= grid.back()) return 0.0;
    const std::size_t i = cell_index(grid, r);
    const double h = grid[i + 1] - grid[i];
    const double s = (r - grid[i]) / h;
    const double s2 = s * s;
    const double dh00 = (6.0 * s2 - 6.0 * s) / h;
    const double dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    const double dh01 = (-6.0 * s2 + 6.0 * s) / h;
    const double dh11 = 3.0 * s2 - 2.0 * s;
    return sign * (dh00 * values[i] + dh10 * slopes[i] + dh01 * values[i + 1] +
                   dh11 * slopes[i + 1]);
}

double RadialField::second_deriv_origin() const {
    // On the first cell u(r) = H(s) with s = r/h and slope(0) = 0, so
    // u''(0) = (6 (v1 - v0) - 2 h d1) / h^2.
    const double h = grid[1] - grid[0];
    return (6.0 * (values[1] - values[0]) - 2.0 * h * slopes[1]) / (h * h);
}

double RadialField::sup_abs_deriv() const {
    double best = 0.0;
    for (double s : slopes) best = std::max(best, std::abs(s));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        best = std::max(best,
                        std::abs(deriv(0.5 * (grid[i] + grid[i + 1]))));
    }
    return best;
}

double RadialField::support_radius(double rel_tol) const {
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    for (std::size_t i = values.size(); i-- > 0;) {
        if (std::abs(values[i]) > rel_tol * peak) return grid[i];
    }
    return 0.0;
}

RadialField make_field(std::vector<double> grid, std::vector<double> values,
                       const KernelSpec& spec) {
    spec.validate();
    if (grid.size() < 3)
        throw std::invalid_argument("radial field needs at least 3 nodes");
    if (grid.size() != values.size())
        throw std::invalid_argument("grid and value arrays differ in length");
    if (grid.front() != 0.0)
        throw std::invalid_argument("radial grid must start at r = 0");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
            throw std::invalid_argument("radial field data must be finite");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument(
                "radial grid must be strictly increasing");
    }

    RadialField f;
    f.slopes = limited_slopes(grid, values, true);
    f.grid = std::move(grid);
    f.values = std::move(values);
    f.spec = spec;
    return f;
}

std::vector<double> limited_slopes(const std::vector<double>& grid,
                                   const std::vector<double>& values,
                                   bool zero_first_slope) {
    const std::size_t M = grid.size() - 1;
    std::vector<double> h(M), delta(M);
    for (std::size_t j = 0; j < M; ++j) {
        h[j] = grid[j + 1] - grid[j];
        delta[j] = (values[j + 1] - values[j]) / h[j];
    }

    // One-sided boundary estimate from the two nearest secants, zeroed when
    // it disagrees in sign with the adjacent secant and clamped to 3x it.
    const auto one_sided = [&](std::size_t m, std::size_t n) {
        double dm = ((2.0 * h[m] + h[n]) * delta[m] - h[m] * delta[n]) /
                    (h[m] + h[n]);
        if (dm * delta[m] <= 0.0) return 0.0;
        if (std::abs(dm) > 3.0 * std::abs(delta[m]))
            dm = std::copysign(3.0 * std::abs(delta[m]), dm);
        return dm;
    };

    std::vector<double> d(M + 1, 0.0);
    if (M == 1) {
        d[0] = zero_first_slope ? 0.0 : delta[0];
        d[1] = delta[0];
        return d;
    }
    d[0] = zero_first_slope ? 0.0 : one_sided(0, 1);
    for (std::size_t i = 1; i < M; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
            continue;
        }
        d[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) /
               (h[i - 1] + h[i]);
        const double cap =
            3.0 * std::min(std::abs(delta[i - 1]), std::abs(delta[i]));
        if (std::abs(d[i]) > cap) d[i] = std::copysign(cap, d[i]);
    }
    d[M] = one_sided(M - 1, M - 2);
    return d;
}

double CubicCurve::eval(double r) const {
    if (r <= grid.front()) return values.front();
    if (r >= grid.back()) return values.back();
    const std::size_t i = cell_index(grid, r);
    const double h = grid[i + 1] - grid[i];
    const double s = (r - grid[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * values[i] + h * h10 * slopes[i] + h01 * values[i + 1] +
           h * h11 * slopes[i + 1];
}

CubicCurve make_curve(std::vector<double> grid, std::vector<double> values,
                      bool zero_first_slope) {
    if (grid.size() < 2)
        throw std::invalid_argument("curve needs at least 2 nodes");
    if (grid.size() != values.size())
        throw std::invalid_argument("grid and value arrays differ in length");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
            throw std::invalid_argument("curve data must be finite");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("curve grid must be strictly increasing");
    }
    CubicCurve c;
    c.slopes = limited_slopes(grid, values, zero_first_slope);
    c.grid = std::move(grid);
    c.values = std::move(values);
    return c;
}

std::vector<double> make_grid(std::size_t M, double r_max, double focus) {
    if (M < 2 || r_max <= 0.0 || !std::isfinite(r_max))
        throw std::invalid_argument("grid needs M >= 2 cells and r_max > 0");
    const int samples = 4096;
    auto density = [&](double x) {
        const double near0 = x / (0.15 * r_max);
        double w = 1.0 + 0.8 * std::exp(-near0 * near0);
        if (focus > 0.0) {
            const double nearf = (x - focus) / (0.1 * r_max);
            w += 0.8 * std::exp(-nearf * nearf);
        }
        return w;
    };
    // Cumulative trapezoid of the density, then invert at equal increments.
    std::vector<double> x(samples + 1), cum(samples + 1);
    for (int k = 0; k <= samples; ++k) x[k] = r_max * k / samples;
    cum[0] = 0.0;
    for (int k = 1; k <= samples; ++k) {
        cum[k] = cum[k - 1] +
                 0.5 * (density(x[k - 1]) + density(x[k])) * (x[k] - x[k - 1]);
    }
    std::vector<double> grid(M + 1);
    grid[0] = 0.0;
    grid[M] = r_max;
    for (std::size_t j = 1; j < M; ++j) {
        const double target = cum[samples] * static_cast<double>(j) /
                              static_cast<double>(M);
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        const std::size_t k = static_cast<std::size_t>(it - cum.begin());
        const double frac = (target - cum[k - 1]) / (cum[k] - cum[k - 1]);
        grid[j] = x[k - 1] + frac * (x[k] - x[k - 1]);
    }
    for (std::size_t j = 1; j <= M; ++j) {
        if (grid[j] <= grid[j - 1])
            grid[j] = std::nextafter(grid[j - 1], r_max * 2.0);
    }
    grid[M] = r_max;
    return grid;
}

} // namespace nlt
