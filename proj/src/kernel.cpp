#include "nlt/kernel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <boost/math/special_functions/digamma.hpp>

#include "nlt/quadrature.hpp"
#include "nlt/special.hpp"

namespace nlt {

namespace {

[[noreturn]] void throw_singular() {
    throw std::domain_error(
        "kernel is singular at r = 1 for alpha >= 1; integrate across the "
        "point instead of evaluating at it");
}

[[noreturn]] void throw_local_limit() {
    throw std::domain_error(
        "alpha = 2 is the local limit: the velocity is du/dr directly and "
        "no kernel exists");
}

/// Closed form for d = 1 (three branches in alpha). Valid for r != 1 and,
/// when alpha < 1, for r = 1 as well.
double d1_closed(double alpha, double r) {
    if (alpha == 1.0)
        return std::log(std::abs(1.0 + r)) - std::log(std::abs(1.0 - r));
    const double p = 1.0 - alpha;
    const double up = std::pow(std::abs(1.0 + r), p);
    const double um = std::pow(std::abs(1.0 - r), p);
    return alpha < 1.0 ? up - um : um - up;
}

/// Angular-integral worker. The distance |r - 1| is supplied by the caller
/// so table construction can keep offsets from r = 1 exact instead of
/// recovering them from a rounded sum 1 + t.
double theta_integral_core(const KernelSpec& spec, double r, double rm1,
                           double tol) {
    const double q = 0.5 * (spec.d - 2 + spec.alpha);
    const int dm2 = spec.d - 2;
    const double pref = sphere_area(spec.d - 1).sigma;
    const double rm1sq = rm1 * rm1;
    auto f = [&](double th) {
        const double sh = std::sin(0.5 * th);
        const double a2 = rm1sq + 4.0 * r * sh * sh;
        double w = std::cos(th);
        if (dm2 != 0) w *= std::pow(std::sin(th), dm2);
        return w * std::pow(a2, -q);
    };

    if (rm1 == 0.0) {
        // alpha < 1, r = 1: the integrand is th^{-alpha} times a smooth
        // factor. Substituting u = th^{1-alpha}/(1-alpha) removes the
        // singularity entirely, leaving a bounded integrand for plain GK.
        const double p = 1.0 - spec.alpha;
        auto smooth = [&](double th) {
            if (th <= 0.0) return 1.0;
            const double ratio = th / (2.0 * std::sin(0.5 * th));
            double w = std::cos(th) * std::pow(ratio, 2.0 * q);
            if (dm2 != 0) w *= std::pow(std::sin(th) / th, dm2);
            return w;
        };
        auto fu = [&](double u) {
            return smooth(std::pow(p * u, 1.0 / p));
        };
        return pref * quad::gk(fu, 0.0, std::pow(M_PI, p) / p, tol);
    }
    // Panels clustered geometrically at the near-singular angle th ~ |r-1|.
    const double t0 = std::min(rm1 / std::sqrt(r), M_PI);
    std::vector<double> pts{0.0};
    for (double t = t0; t < M_PI; t *= 8.0) pts.push_back(t);
    pts.push_back(M_PI);
    return pref * quad::gk_panels(f, pts, tol);
}

/// Per-spec cache of default-tolerance coefficients for kernel_eval.
const SeriesCoefficients& cached_series(const KernelSpec& spec) {
    static std::map<std::pair<int, double>, SeriesCoefficients> cache;
    static std::mutex guard;
    std::scoped_lock lock(guard);
    const auto key = std::make_pair(spec.d, spec.alpha);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, build_series(spec, 1e-12)).first;
    return it->second;
}

} // namespace

void KernelSpec::validate() const {
    if (d < 1) throw std::domain_error("kernel dimension must be >= 1");
    if (!(alpha >= 0.0) || alpha > 2.0)
        throw std::domain_error("kernel exponent must lie in [0, 2]");
    if (d == 1 && alpha == 0.0)
        throw std::domain_error("d = 1 requires a positive exponent");
}

namespace detail {

double coeff_smooth(const KernelSpec& spec, double x) {
    const double a = spec.alpha;
    if (spec.d == 1) {
        if (a == 1.0) return 2.0 / (2.0 * x + 1.0);
        return 2.0 * std::abs(1.0 - a) *
               std::exp(std::lgamma(a + 2.0 * x) - std::lgamma(2.0 * x + 2.0) -
                        std::lgamma(a));
    }
    const double dd = spec.d;
    const double sigma = sphere_area(spec.d).sigma;
    const double ln_a = std::log(sigma) + std::log(dd + a - 2.0) -
                        std::log(2.0) + std::lgamma(0.5 * a + x) -
                        std::lgamma(0.5 * a) +
                        std::lgamma(0.5 * (dd + a) + x) -
                        std::lgamma(0.5 * (dd + a)) - std::lgamma(x + 1.0) -
                        std::lgamma(0.5 * dd + x + 1.0) +
                        std::lgamma(0.5 * dd);
    return std::exp(ln_a);
}

double coeff_log_deriv(const KernelSpec& spec, double x) {
    using boost::math::digamma;
    const double a = spec.alpha;
    if (spec.d == 1) {
        if (a == 1.0) return -2.0 / (2.0 * x + 1.0);
        return 2.0 * digamma(a + 2.0 * x) - 2.0 * digamma(2.0 * x + 2.0);
    }
    const double dd = spec.d;
    return digamma(0.5 * a + x) + digamma(0.5 * (dd + a) + x) -
           digamma(x + 1.0) - digamma(0.5 * dd + x + 1.0);
}

} // namespace detail

double taylor_coefficient(const KernelSpec& spec, int n) {
    spec.validate();
    if (spec.local_limit()) throw_local_limit();
    if (n < 0) throw std::domain_error("coefficient index must be nonnegative");

    const double a = spec.alpha;
    if (spec.d >= 2) {
        const double dd = spec.d;
        if (n == 0) return sphere_area(spec.d).sigma * (dd + a - 2.0) / dd;
        if (a == 0.0) return 0.0;
    }
    return detail::coeff_smooth(spec, n);
}

SeriesCoefficients build_series(const KernelSpec& spec, double tol) {
    spec.validate();
    if (spec.local_limit()) throw_local_limit();
    if (!(tol > 0.0)) throw std::domain_error("tolerance must be positive");

    SeriesCoefficients sc;
    sc.spec = spec;

    if (spec.d >= 2 && spec.alpha == 0.0) {
        sc.coeffs = {taylor_coefficient(spec, 0)};
        sc.truncation_N = 0;
        sc.tail_bound = 0.0;
        return sc;
    }

    const double s = kSeriesSwitch;
    const double geo = 1.0 - s * s;
    for (int n = 0;; ++n) {
        if (n > 200000)
            throw std::runtime_error("series truncation did not converge");
        const double a = taylor_coefficient(spec, n);
        sc.coeffs.push_back(a);
        if (a * std::pow(s, 2 * n + 1) / geo < tol) {
            sc.truncation_N = n;
            // Coefficients decrease, so the next term bounds the whole tail
            // geometrically.
            sc.tail_bound =
                taylor_coefficient(spec, n + 1) * std::pow(s, 2 * n + 3) / geo;
            break;
        }
    }
    return sc;
}

double series_eval(const SeriesCoefficients& sc, double r) {
    const double r2 = r * r;
    double acc = 0.0;
    for (std::size_t i = sc.coeffs.size(); i-- > 0;)
        acc = sc.coeffs[i] + r2 * acc;
    return r * acc;
}

double kernel_theta_integral(const KernelSpec& spec, double r, double tol) {
    spec.validate();
    if (spec.d < 2)
        throw std::domain_error("the angular integral requires d >= 2");
    if (spec.local_limit()) throw_local_limit();
    if (!(r > 0.0))
        throw std::domain_error("the angular integral requires r > 0");
    if (r == 1.0 && spec.alpha >= 1.0) throw_singular();
    // For r in [0.5, 2] the subtraction r - 1 is exact (Sterbenz), so the
    // worker sees the true offset of the representable argument.
    return theta_integral_core(spec, r, std::abs(r - 1.0), tol);
}

double kernel_eval(const KernelSpec& spec, double r) {
    spec.validate();
    if (spec.local_limit()) throw_local_limit();
    if (r < 0.0)
        throw std::domain_error(
            "kernel argument must be nonnegative; g is odd, use -g(-r)");
    if (r == 0.0) return 0.0;

    const double a = spec.alpha;
    if (spec.d == 1) {
        if (r == 1.0 && a >= 1.0) throw_singular();
        return d1_closed(a, r);
    }
    if (a == 0.0) {
        const double a1 = taylor_coefficient(spec, 0);
        return r <= 1.0 ? a1 * r : a1 * std::pow(r, 1.0 - spec.d);
    }
    if (r <= kSeriesSwitch) return series_eval(cached_series(spec), r);
    if (r >= 1.0 / kSeriesSwitch)
        return std::pow(r, -(spec.d - 2 + a)) *
               series_eval(cached_series(spec), 1.0 / r);
    if (r == 1.0 && a >= 1.0) throw_singular();
    return kernel_theta_integral(spec, r, 1e-11);
}

namespace detail {

double ChebPiece::eval(double x) const {
    const double u = (2.0 * x - lo - hi) / (hi - lo);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t j = c.size(); j-- > 1;) {
        const double t = 2.0 * u * b1 - b2 + c[j];
        b2 = b1;
        b1 = t;
    }
    return u * b1 - b2 + c[0];
}

} // namespace detail

namespace {

/// Interpolates f on [lo, hi] at Chebyshev roots of degree deg.
template <class F>
detail::ChebPiece cheb_fit(F&& f, double lo, double hi, int deg) {
    const int n = deg + 1;
    std::vector<double> fv(n);
    for (int k = 0; k < n; ++k) {
        const double x = std::cos(M_PI * (k + 0.5) / n);
        fv[k] = f(0.5 * ((hi - lo) * x + lo + hi));
    }
    detail::ChebPiece piece{lo, hi, std::vector<double>(n)};
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
            s += fv[k] * std::cos(M_PI * j * (k + 0.5) / n);
        piece.c[j] = 2.0 * s / n;
    }
    piece.c[0] *= 0.5;
    return piece;
}

constexpr double kAsymRadius = 8e-10;

} // namespace

KernelTable::KernelTable(KernelSpec spec, double series_tol) : spec_(spec) {
    spec_.validate();
    if (spec_.local_limit()) throw_local_limit();
    refl_pow_ = spec_.d - 2 + spec_.alpha;
    if (spec_.d == 1) {
        mode_ = Mode::ClosedD1;
        return;
    }
    if (spec_.alpha == 0.0) {
        mode_ = Mode::ClosedAlpha0;
        alpha0_slope_ = taylor_coefficient(spec_, 0);
        return;
    }
    mode_ = Mode::General;
    series_ = build_series(spec_, series_tol);
    build_side(lo_, false, 1.0 - kSeriesSwitch);
    build_side(hi_, true, 1.0 / kSeriesSwitch - 1.0);
}

void KernelTable::build_side(Side& side, bool upper, double t_edge) {
    const double a = spec_.alpha;
    side.xi_lo = std::log(0.5 * kAsymRadius);
    side.xi_hi = std::log(t_edge);
    const int n_pieces = 6;
    const int deg = 20;
    side.width = (side.xi_hi - side.xi_lo) / n_pieces;

    auto raw = [&](double t) {
        // Pass the offset itself: forming 1 +- t first would round t away.
        return theta_integral_core(spec_, upper ? 1.0 + t : 1.0 - t, t, 1e-12);
    };
    for (int p = 0; p < n_pieces; ++p) {
        const double lo = side.xi_lo + p * side.width;
        side.pieces.push_back(cheb_fit(
            [&](double xi) {
                const double t = std::exp(xi);
                double v = raw(t);
                // Peel the divergent factor so the interpolated function is
                // smooth and bounded across the whole piece.
                if (a > 1.0) v *= std::pow(t, a - 1.0);
                return v;
            },
            lo, lo + side.width, deg));
    }

    // Two-term asymptote below the deepest interpolation knot.
    const double t1 = 1e-12, t2 = 1e-10;
    const double g1 = raw(t1), g2 = raw(t2);
    double p1, p2;
    if (a == 1.0) {
        p1 = -std::log(t1);
        p2 = -std::log(t2);
    } else {
        p1 = std::pow(t1, 1.0 - a);
        p2 = std::pow(t2, 1.0 - a);
    }
    side.asym_c1 = (g1 - g2) / (p1 - p2);
    side.asym_c2 = g1 - side.asym_c1 * p1;
}

double KernelTable::operator()(double r) const {
    if (r < 0.0) return -(*this)(-r);
    if (r == 0.0) return 0.0;
    const double a = spec_.alpha;
    if (mode_ == Mode::ClosedD1) {
        if (r == 1.0 && a >= 1.0) throw_singular();
        return d1_closed(a, r);
    }
    if (mode_ == Mode::ClosedAlpha0)
        return r <= 1.0 ? alpha0_slope_ * r
                        : alpha0_slope_ * std::pow(r, 1.0 - spec_.d);
    if (r <= kSeriesSwitch) return series_eval(series_, r);
    if (r >= 1.0 / kSeriesSwitch)
        return std::pow(r, -refl_pow_) * series_eval(series_, 1.0 / r);
    return band_eval(r - 1.0);
}

double KernelTable::eval_near_one(double t) const {
    const double a = spec_.alpha;
    if (t <= -1.0 || 1.0 + t >= 1.0 / kSeriesSwitch)
        throw std::domain_error(
            "offset evaluation is only valid inside the interpolation band");
    if (mode_ == Mode::ClosedD1) {
        if (t == 0.0 && a >= 1.0) throw_singular();
        const double at = std::abs(t);
        if (a < 1.0) return std::pow(2.0 + t, 1.0 - a) - std::pow(at, 1.0 - a);
        if (a == 1.0) return std::log(2.0 + t) - std::log(at);
        return std::pow(at, 1.0 - a) - std::pow(2.0 + t, 1.0 - a);
    }
    if (mode_ == Mode::ClosedAlpha0) {
        return t <= 0.0 ? alpha0_slope_ * (1.0 + t)
                        : alpha0_slope_ * std::pow(1.0 + t, 1.0 - spec_.d);
    }
    if (1.0 + t <= kSeriesSwitch) return series_eval(series_, 1.0 + t);
    return band_eval(t);
}

double KernelTable::band_eval(double t) const {
    const double a = spec_.alpha;
    if (t == 0.0 && a >= 1.0) throw_singular();
    const Side& side = t < 0.0 ? lo_ : hi_;
    const double at = std::abs(t);
    if (at < kAsymRadius) {
        const double phi =
            (a == 1.0) ? -std::log(at) : std::pow(at, 1.0 - a);
        return side.asym_c1 * phi + side.asym_c2;
    }
    double xi = std::log(at);
    if (xi < side.xi_lo) xi = side.xi_lo;
    if (xi > side.xi_hi) xi = side.xi_hi;
    int idx = static_cast<int>((xi - side.xi_lo) / side.width);
    if (idx < 0) idx = 0;
    const int last = static_cast<int>(side.pieces.size()) - 1;
    if (idx > last) idx = last;
    double v = side.pieces[idx].eval(xi);
    if (a > 1.0) v *= std::pow(at, 1.0 - a);
    return v;
}

} // namespace nlt
