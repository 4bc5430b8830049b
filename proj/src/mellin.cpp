#include "nlt/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlt/parallel.hpp"
#include "nlt/quadrature.hpp"
#include "nlt/special.hpp"

namespace nlt {

namespace {

using cplx = std::complex<double>;

/// Smallest direct-summation length; the remainder is closed analytically.
constexpr int kMinDirect = 2000;

/// Coefficient data for symbol summation: an exact prefix plus a far-field
/// model K x^{alpha-2} (1 + c1/x + c2/x^2 + c3/x^3). The model is needed
/// because at x beyond ~1e5 the log-gamma differences defining the
/// coefficients cancel catastrophically in double precision, while the
/// slowly decaying tail (terms ~ n^{alpha-3}) still carries real mass.
struct CoeffModel {
    KernelSpec spec;
    std::vector<double> prefix;
    bool harmonic = false; // d = 1, alpha = 1: a(x) = 2/(2x+1) exactly
    double K = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;

    double far(double x) const {
        if (harmonic) return 2.0 / (2.0 * x + 1.0);
        return K * std::pow(x, spec.alpha - 2.0) *
               (1.0 + (c1 + (c2 + c3 / x) / x) / x);
    }

    /// far(x0/t) * (x0/t^2) * t, written so no intermediate overflows even
    /// at denormal t (the naive x = x0/t route hits inf for t < ~1e-153).
    double far_flow(double t, double x0) const {
        if (harmonic) return 2.0 * x0 / (2.0 * x0 + t);
        const double u = t / x0;
        return K * std::pow(x0, spec.alpha - 1.0) *
               std::pow(t, 1.0 - spec.alpha) *
               (1.0 + u * (c1 + u * (c2 + u * c3)));
    }
};

CoeffModel build_model(const KernelSpec& spec, int n_direct,
                       const SeriesCoefficients& coeffs) {
    CoeffModel m;
    m.spec = spec;
    m.prefix.resize(n_direct + 1);
    const int have = static_cast<int>(coeffs.coeffs.size());
    for (int n = 0; n <= n_direct; ++n) {
        m.prefix[n] = (n < have && coeffs.spec.d == spec.d &&
                       coeffs.spec.alpha == spec.alpha)
                          ? coeffs.coeffs[n]
                          : detail::coeff_smooth(spec, n);
    }

    const double a = spec.alpha;
    if (spec.d == 1 && a == 1.0) {
        m.harmonic = true;
        return m;
    }
    if (spec.d == 1) {
        m.K = 2.0 * std::abs(1.0 - a) * std::pow(2.0, a - 2.0) /
              std::tgamma(a);
    } else {
        const double dd = spec.d;
        m.K = sphere_area(spec.d).sigma * (dd + a - 2.0) *
              std::tgamma(0.5 * dd) /
              (2.0 * std::tgamma(0.5 * a) * std::tgamma(0.5 * (dd + a)));
    }

    // Fit the 1/x correction coefficients where lgamma is still accurate;
    // the neglected 1/x^4 term is ~1e-13 relative already at x = 2000.
    const double xs[3] = {1000.0, 3000.0, 9000.0};
    double mat[3][3], rhs[3];
    for (int i = 0; i < 3; ++i) {
        const double x = xs[i];
        rhs[i] =
            detail::coeff_smooth(spec, x) / (m.K * std::pow(x, a - 2.0)) - 1.0;
        mat[i][0] = 1.0 / x;
        mat[i][1] = 1.0 / (x * x);
        mat[i][2] = 1.0 / (x * x * x);
    }
    // Gaussian elimination on the 3x3 system.
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(mat[row][col]) > std::abs(mat[piv][col])) piv = row;
        std::swap(mat[piv], mat[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = mat[row][col] / mat[col][col];
            for (int k = col; k < 3; ++k) mat[row][k] -= f * mat[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    double sol[3];
    for (int row = 2; row >= 0; --row) {
        double s = rhs[row];
        for (int k = row + 1; k < 3; ++k) s -= mat[row][k] * sol[k];
        sol[row] = s / mat[row][row];
    }
    m.c1 = sol[0];
    m.c2 = sol[1];
    m.c3 = sol[2];
    return m;
}

int direct_length(double lambda) {
    return std::max(kMinDirect,
                    static_cast<int>(std::ceil(2.0 * std::abs(lambda))));
}

/// H1 via direct summation over the exact prefix plus the Euler-Maclaurin
/// closure sum_{n>N} phi(n) = int_{N+1}^inf phi + phi(N+1)/2 - phi'(N+1)/12
/// (the next correction is ~phi'''/720 ~ 1e-15 here).
cplx h1_with_model(const CoeffModel& m, double A, double B, double lambda) {
    const int d = m.spec.d;
    const int n_direct =
        std::min<int>(static_cast<int>(m.prefix.size()) - 1,
                      direct_length(lambda));
    cplx sum = 0.0;
    for (int n = 0; n <= n_direct; ++n) {
        sum += m.prefix[n] * (1.0 / cplx(2.0 * n + A, lambda) +
                              1.0 / cplx(d + 2.0 * n + B, -lambda));
    }

    // Remainder integral, substituted x = x0/t; the integrand is
    // far_flow(t) * (S(x)/t) with S(x)/t kept rational in t so nothing
    // overflows however deep the quadrature probes. The residual
    // t^(1-alpha) factor can overflow at denormal t once alpha > ~1.95,
    // hence the guard (the mass below it is ~1e-14 even at alpha = 1.95).
    const double x0 = n_direct + 1.0;
    const cplx integral = quad::cts(
        [&](double t) -> cplx {
            if (t < 1e-290) return {0.0, 0.0};
            const cplx q = 1.0 / cplx(2.0 * x0 + A * t, lambda * t) +
                           1.0 / cplx(2.0 * x0 + (d + B) * t, -lambda * t);
            return m.far_flow(t, x0) * q;
        },
        0.0, 1.0, 1e-12);

    const double a0 = detail::coeff_smooth(m.spec, x0);
    const double ld = detail::coeff_log_deriv(m.spec, x0);
    const cplx d1(2.0 * x0 + A, lambda), d2(d + 2.0 * x0 + B, -lambda);
    const cplx s = 1.0 / d1 + 1.0 / d2;
    const cplx sp = -2.0 / (d1 * d1) - 2.0 / (d2 * d2);
    const cplx phi0 = a0 * s;
    const cplx phi0p = a0 * (ld * s + sp);
    return sum + integral + 0.5 * phi0 - phi0p / 12.0;
}

/// Same closure applied to the all-real expansion terms.
double re_h1_with_model(const CoeffModel& m, double A, double B,
                        double lambda) {
    const int d = m.spec.d;
    const double l2 = lambda * lambda;
    const int n_direct =
        std::min<int>(static_cast<int>(m.prefix.size()) - 1,
                      direct_length(lambda));
    double sum = 0.0;
    for (int n = 0; n <= n_direct; ++n) {
        const double m1 = 2.0 * n + A;
        const double m2 = d + 2.0 * n + B;
        sum += m.prefix[n] * (m1 / (l2 + m1 * m1) + m2 / (l2 + m2 * m2));
    }

    const double x0 = n_direct + 1.0;
    const double integral = quad::ts(
        [&](double t) {
            if (t < 1e-290) return 0.0;
            const double p1 = 2.0 * x0 + A * t;
            const double p2 = 2.0 * x0 + (d + B) * t;
            const double lt2 = l2 * t * t;
            return m.far_flow(t, x0) *
                   (p1 / (lt2 + p1 * p1) + p2 / (lt2 + p2 * p2));
        },
        0.0, 1.0, 1e-12);

    const double a0 = detail::coeff_smooth(m.spec, x0);
    const double ld = detail::coeff_log_deriv(m.spec, x0);
    const double m1 = 2.0 * x0 + A;
    const double m2 = d + 2.0 * x0 + B;
    const double s = m1 / (l2 + m1 * m1) + m2 / (l2 + m2 * m2);
    const double sp = 2.0 * (l2 - m1 * m1) / ((l2 + m1 * m1) * (l2 + m1 * m1)) +
                      2.0 * (l2 - m2 * m2) / ((l2 + m2 * m2) * (l2 + m2 * m2));
    const double phi0 = a0 * s;
    const double phi0p = a0 * (ld * s + sp);
    return sum + integral + 0.5 * phi0 - phi0p / 12.0;
}

double lb_with_model(const CoeffModel& m, double B, double csq) {
    const int d = m.spec.d;
    const int n_direct = static_cast<int>(m.prefix.size()) - 1;
    double sum = 0.0;
    for (int n = 0; n <= n_direct; ++n)
        sum += m.prefix[n] / (d + 2.0 * n + B);

    const double x0 = n_direct + 1.0;
    const double integral = quad::ts(
        [&](double t) {
            if (t < 1e-290) return 0.0;
            return m.far_flow(t, x0) / (2.0 * x0 + (d + B) * t);
        },
        0.0, 1.0, 1e-12);

    const double a0 = detail::coeff_smooth(m.spec, x0);
    const double ld = detail::coeff_log_deriv(m.spec, x0);
    const double den = d + 2.0 * x0 + B;
    const double phi0 = a0 / den;
    const double phi0p = a0 * ld / den - 2.0 * a0 / (den * den);
    return csq * (sum + integral + 0.5 * phi0 - phi0p / 12.0);
}

void require_series_hypotheses(const KernelSpec& spec, double delta) {
    spec.validate();
    if (!(spec.alpha > 0.0) || spec.alpha >= 2.0)
        throw std::domain_error(
            "symbol evaluation requires an exponent in (0, 2)");
    if (!(delta < spec.alpha))
        throw std::domain_error(
            "weight hypothesis violated: delta must be < alpha");
}

} // namespace

void validate_weight(const KernelSpec& spec, double delta) {
    require_series_hypotheses(spec, delta);
    if (!(delta > -spec.alpha))
        throw std::domain_error(
            "weight hypothesis violated: delta must be > -alpha");
    if (!(delta + spec.alpha < 2.0))
        throw std::domain_error(
            "weight hypothesis violated: delta + alpha must be < 2");
}

std::complex<double> h1_series(const KernelSpec& spec, double delta,
                               double lambda,
                               const SeriesCoefficients& coeffs) {
    require_series_hypotheses(spec, delta);
    const auto model = build_model(spec, direct_length(lambda), coeffs);
    const double A = 0.5 * (spec.alpha - delta);
    const double B = 0.5 * (spec.alpha + delta);
    return h1_with_model(model, A, B, lambda);
}

std::complex<double> h_symbol(const KernelSpec& spec, double delta,
                              double lambda,
                              const SeriesCoefficients& coeffs) {
    const double c = 0.5 * (spec.alpha + delta);
    return (c * c + lambda * lambda) * h1_series(spec, delta, lambda, coeffs);
}

double re_h_expansion(const KernelSpec& spec, double delta, double lambda,
                      const SeriesCoefficients& coeffs) {
    require_series_hypotheses(spec, delta);
    const auto model = build_model(spec, direct_length(lambda), coeffs);
    const double A = 0.5 * (spec.alpha - delta);
    const double B = 0.5 * (spec.alpha + delta);
    const double c = 0.5 * (spec.alpha + delta);
    return (c * c + lambda * lambda) *
           re_h1_with_model(model, A, B, lambda);
}

double analytic_lower_bound(const KernelSpec& spec, double delta,
                            const SeriesCoefficients& coeffs) {
    require_series_hypotheses(spec, delta);
    if (!(delta > -spec.alpha))
        throw std::domain_error(
            "weight hypothesis violated: delta must be > -alpha");
    const auto model = build_model(spec, kMinDirect, coeffs);
    const double B = 0.5 * (spec.alpha + delta);
    const double c = 0.5 * (spec.alpha + delta);
    return lb_with_model(model, B, c * c);
}

MellinSymbol positivity_certificate(const KernelSpec& spec, double delta,
                                    double lambda_max,
                                    const SeriesCoefficients& coeffs) {
    validate_weight(spec, delta);
    if (!(lambda_max > 0.0))
        throw std::domain_error("lambda_max must be positive");

    MellinSymbol ms;
    ms.spec = spec;
    ms.delta = delta;

    // Grid: dense linear refinement on [0, 10], geometric out to lambda_max.
    const int n_total = 2000;
    const int n_lin = lambda_max > 10.0 ? 400 : n_total;
    const double lin_hi = std::min(10.0, lambda_max);
    ms.lambda_grid.reserve(n_total);
    for (int i = 0; i < n_lin; ++i)
        ms.lambda_grid.push_back(lin_hi * i / (n_lin - 1));
    if (lambda_max > 10.0) {
        const int n_geo = n_total - n_lin;
        const double ratio = lambda_max / 10.0;
        for (int j = 1; j <= n_geo; ++j)
            ms.lambda_grid.push_back(
                10.0 * std::pow(ratio, static_cast<double>(j) / n_geo));
        ms.lambda_grid.back() = lambda_max;
    }

    const auto model =
        build_model(spec, direct_length(lambda_max), coeffs);
    const double A = 0.5 * (spec.alpha - delta);
    const double B = 0.5 * (spec.alpha + delta);
    const double c = 0.5 * (spec.alpha + delta);
    const double csq = c * c;

    const std::size_t n = ms.lambda_grid.size();
    ms.H1_values.resize(n);
    ms.H_values.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const double lambda = ms.lambda_grid[i];
        const cplx h1 = h1_with_model(model, A, B, lambda);
        ms.H1_values[i] = h1;
        ms.H_values[i] = (csq + lambda * lambda) * h1;
    });

    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (ms.H_values[i].real() < ms.H_values[arg].real()) arg = i;
    ms.positivity_constant = ms.H_values[arg].real();
    ms.argmin_lambda = ms.lambda_grid[arg];
    ms.analytic_lower_bound = lb_with_model(model, B, csq);

    if (!(ms.positivity_constant > 0.0))
        throw std::runtime_error(
            "positivity certification failed: Re H <= 0 at lambda = " +
            std::to_string(ms.argmin_lambda) +
            "; positivity is proven, so this indicates an implementation "
            "bug");
    return ms;
}

} // namespace nlt
