#pragma once

#include <vector>

namespace nlt {

/// Parameters of the radial convolution kernel g_{d,alpha}.
///
/// Admissible window: d >= 1 and alpha in [0,2], except that alpha = 0 with
/// d = 1 has no kernel. alpha = 2 is accepted but flagged as the local limit
/// (the velocity degenerates to du/dr); kernel evaluation rejects it.
struct KernelSpec {
    int d = 3;
    double alpha = 1.0;

    bool local_limit() const { return alpha == 2.0; }

    /// Throws std::domain_error if (d, alpha) lies outside the window above.
    void validate() const;
};

/// Odd Taylor coefficients of g at the origin with truncation metadata.
/// coeffs[n] holds a_{2n+1}; the expansion is g(r) = sum a_{2n+1} r^{2n+1}.
struct SeriesCoefficients {
    KernelSpec spec;
    std::vector<double> coeffs;
    int truncation_N = 0;
    /// Bound on the dropped remainder |sum_{n>N} a_{2n+1} r^{2n+1}| at the
    /// series/quadrature switch radius.
    double tail_bound = 0.0;
};

/// Radius below which the Taylor series is used; the reflection identity
/// g(r) = r^{-(d-2+alpha)} g(1/r) covers r > 1/kSeriesSwitch, and direct
/// quadrature covers the band in between.
inline constexpr double kSeriesSwitch = 0.7;

/// Coefficient a_{2n+1} of the kernel's odd Taylor expansion, evaluated in
/// log-space so large n neither overflows nor underflows.
/// Throws std::domain_error for n < 0 or alpha = 2.
double taylor_coefficient(const KernelSpec& spec, int n);

/// Builds the coefficient list truncated where the geometric tail bound
/// a_{2N+1} s^{2N+1}/(1-s^2) at s = kSeriesSwitch drops below tol.
/// Throws std::domain_error for tol <= 0 or alpha = 2.
SeriesCoefficients build_series(const KernelSpec& spec, double tol);

/// Horner evaluation of the truncated odd series at r (accurate for
/// |r| <= kSeriesSwitch; converges for |r| < 1).
double series_eval(const SeriesCoefficients& sc, double r);

/// Direct adaptive quadrature of the angular integral defining g for d >= 2,
/// with panels clustered at the near-singular angle. Valid for any r > 0
/// except r = 1 when alpha >= 1. Serves as the reference evaluation.
double kernel_theta_integral(const KernelSpec& spec, double r,
                             double tol = 1e-11);

/// Full kernel evaluation: closed forms for d = 1 and for alpha = 0,
/// series / angular quadrature / reflection branches for d >= 2.
/// Throws std::domain_error for r < 0 (g is odd: evaluate at |r| and
/// negate), for alpha = 2, and at the singular point r = 1 when alpha >= 1.
double kernel_eval(const KernelSpec& spec, double r);

namespace detail {

/// One Chebyshev interpolation piece on [lo, hi] (Clenshaw evaluation).
struct ChebPiece {
    double lo = 0.0, hi = 1.0;
    std::vector<double> c;
    double eval(double x) const;
};

/// Smooth continuation of the coefficient formula to real index x >= 0;
/// agrees with taylor_coefficient at integers. Used by symbol-tail
/// summation, which needs the coefficients as a differentiable function.
double coeff_smooth(const KernelSpec& spec, double x);

/// Logarithmic derivative d/dx ln coeff_smooth(spec, x) (digamma sums).
double coeff_log_deriv(const KernelSpec& spec, double x);

} // namespace detail

/// Fast evaluator for g built once per spec: Horner series inside the switch
/// radius, reflection beyond, piecewise-Chebyshev interpolation in ln|r-1|
/// across the middle band (with the |r-1|^{1-alpha} singular factor peeled
/// off when alpha > 1), and a fitted two-term asymptote for |r-1| < 8e-10.
/// Immutable after construction; evaluation is pure and thread-safe.
class KernelTable {
public:
    explicit KernelTable(KernelSpec spec, double series_tol = 1e-12);

    /// g(r); odd across 0. Throws at the singular point r = 1 for alpha >= 1.
    double operator()(double r) const;

    /// g(1 + t) from the exact signed offset t. Forming 1 + t first rounds
    /// the offset away once |t| drops below ~1e-16, which matters to
    /// quadratures that probe arbitrarily close to the singularity; this
    /// entry keeps full offset precision. Requires 1 + t within (0, 1/0.7);
    /// throws at t = 0 for alpha >= 1 like operator().
    double eval_near_one(double t) const;

    const KernelSpec& spec() const { return spec_; }
    const SeriesCoefficients& series() const { return series_; }

private:
    struct Side {
        std::vector<detail::ChebPiece> pieces;
        double xi_lo = 0.0, xi_hi = 0.0, width = 0.0;
        double asym_c1 = 0.0, asym_c2 = 0.0;
    };

    enum class Mode { ClosedD1, ClosedAlpha0, General };

    double band_eval(double t) const;
    void build_side(Side& side, bool upper, double t_edge);

    KernelSpec spec_;
    SeriesCoefficients series_;
    Mode mode_ = Mode::General;
    double refl_pow_ = 0.0;
    double alpha0_slope_ = 0.0;
    Side lo_, hi_;
};

} // namespace nlt
