#include "nlt/special.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace nlt {

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: argument must be positive");
    return std::lgamma(x);
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("beta_fn: arguments must be positive");
    // Log-space to survive large arguments; exact enough for the small ones.
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

SphereArea sphere_area(int d) {
    if (d < 1)
        throw std::domain_error("sphere_area: dimension must be >= 1");
    const double hd = 0.5 * static_cast<double>(d);
    const double sigma = 2.0 * std::pow(M_PI, hd) / std::tgamma(hd);
    return SphereArea{d, sigma};
}

double double_factorial(int n) {
    if (n == 0 || n == -1)
        return 1.0; // empty-product conventions
    if (n < -1)
        throw std::domain_error("double_factorial: argument must be >= -1");
    if (n <= 33) { // 33!! = 6332659870762850625 still fits in uint64
        std::uint64_t p = 1;
        for (int k = n; k > 1; k -= 2)
            p *= static_cast<std::uint64_t>(k);
        return static_cast<double>(p);
    }
    double p = 1.0;
    for (int k = n; k > 1; k -= 2)
        p *= static_cast<double>(k);
    return p;
}

} // namespace nlt
