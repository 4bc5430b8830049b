#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace nlt::quad {

/// Adaptive Gauss-Kronrod (15-point) on [a,b]. `tol` is the relative error
/// target handed to the subdivision; `err` (if given) receives the estimate.
/// The panel is affine-mapped to [0,1] before integrating: boost's
/// termination test misbehaves on very short intervals (it can recurse to
/// full depth without ever accepting), while the mapped form converges.
template <class F>
double gk(F&& f, double a, double b, double tol = 1e-11, unsigned depth = 15,
          double* err = nullptr) {
    const double len = b - a;
    double e = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [&](double u) { return f(a + len * u); }, 0.0, 1.0, depth, tol, &e);
    if (err) *err = e * std::abs(len);
    return v * len;
}

/// Adaptive GK over consecutive panels delimited by sorted breakpoints.
template <class F>
double gk_panels(F&& f, const std::vector<double>& pts, double tol = 1e-11,
                 unsigned depth = 15, double* err = nullptr) {
    double v = 0.0, e = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!(pts[i + 1] > pts[i])) continue;
        double pe = 0.0;
        v += gk(f, pts[i], pts[i + 1], tol, depth, &pe);
        e += pe;
    }
    if (err) *err = e;
    return v;
}

/// tanh-sinh on [a,b]; handles integrable endpoint singularities. A callable
/// taking (x, xc) receives the exact signed endpoint offset as xc: a - x
/// (negative) on the left half of the interval, b - x (positive) on the right,
/// with the centre sample counting as the right half. Branch on the sign of
/// xc, not on the position of x, to pick the exact-offset side.
template <class F>
double ts(F&& f, double a, double b, double tol = 1e-11, double* err = nullptr) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
    double e = 0.0, l1 = 0.0;
    const double v = integrator.integrate(std::forward<F>(f), a, b, tol, &e, &l1);
    if (err) *err = e * std::max(1.0, l1);
    return v;
}

/// Complex-valued adaptive GK via two real passes.
template <class F>
std::complex<double> cgk(F&& f, double a, double b, double tol = 1e-11,
                         unsigned depth = 15) {
    const double re = gk([&](double x) { return f(x).real(); }, a, b, tol, depth);
    const double im = gk([&](double x) { return f(x).imag(); }, a, b, tol, depth);
    return {re, im};
}

/// Complex tanh-sinh via two real passes.
template <class F>
std::complex<double> cts(F&& f, double a, double b, double tol = 1e-11) {
    const double re = ts([&](double x) { return f(x).real(); }, a, b, tol);
    const double im = ts([&](double x) { return f(x).imag(); }, a, b, tol);
    return {re, im};
}

/// Fixed Gauss-Legendre rule with full node/weight arrays on (-1,1),
/// expanded from boost's symmetric half-rule. Deterministic cell quadrature.
template <unsigned N>
struct GaussRule {
    std::array<double, N> node{};
    std::array<double, N> weight{};

    GaussRule() {
        using G = boost::math::quadrature::gauss<double, N>;
        const auto& x = G::abscissa(); // nonnegative half
        const auto& w = G::weights();
        unsigned k = 0;
        if constexpr (N % 2 == 1) {
            node[k] = 0.0;
            weight[k] = w[0];
            ++k;
            for (unsigned i = 1; i < (N + 1) / 2; ++i) {
                node[k] = -x[i]; weight[k] = w[i]; ++k;
                node[k] = x[i];  weight[k] = w[i]; ++k;
            }
        } else {
            for (unsigned i = 0; i < N / 2; ++i) {
                node[k] = -x[i]; weight[k] = w[i]; ++k;
                node[k] = x[i];  weight[k] = w[i]; ++k;
            }
        }
    }

    static const GaussRule& get() {
        static const GaussRule rule;
        return rule;
    }
};

} // namespace nlt::quad
