#pragma once

namespace nlt {

/// Surface area of the unit sphere S^{d-1} in R^d: sigma = 2 pi^{d/2} / Gamma(d/2).
struct SphereArea {
    int d;
    double sigma;
};

/// Gamma(x) for x > 0. Throws std::domain_error for non-positive x.
/// Relative accuracy better than 1e-13 on (0, 50].
double gamma_fn(double x);

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), a,b > 0.
double beta_fn(double a, double b);

/// sphere_area(d) for d >= 1; throws std::domain_error otherwise.
SphereArea sphere_area(int d);

/// Double factorial n!! with the conventions 0!! = (-1)!! = 1.
/// Exact (integer) product for n <= 33, floating-point product above;
/// overflows to +inf past n ~ 300.
double double_factorial(int n);

} // namespace nlt
