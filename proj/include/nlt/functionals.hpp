#pragma once

#include "nlt/field.hpp"

namespace nlt {

/// Weighted pairing of the transported field with its own slope,
///   I(f) = int_0^inf (Tf)(r) f'(r) r^(-1-delta) dr,
/// where T is the nonlocal velocity operator. Requires the weight hypotheses
/// |delta| < alpha and delta + alpha < 2 (alpha in (0,2)); throws
/// std::domain_error otherwise. The integrand vanishes like r^(1-delta) at
/// the origin, so the integral is finite for every admissible delta.
double weighted_pairing(const RadialField& f, double delta);

/// Oscillation functional
///   J(f) = int_0^inf (f(r) - f(0))^2 r^(-1-alpha-delta) dr,
/// under the same weight hypotheses. The field is identically zero beyond its
/// grid, which closes the integral with the exact tail
/// f(0)^2 R^(-(alpha+delta)) / (alpha+delta). Fields that have not decayed at
/// the outer boundary are rejected (std::domain_error): the truncated grid
/// cannot represent their divergent tail contribution.
double rhs_functional(const RadialField& f, double delta);

/// Concentration functional
///   B(u) = int_0^L (u(0) - u(r)) r^(-1-delta) dr,  delta in (0,1), L > 0.
/// If max_at_origin is non-null it receives whether u(0) is the global max of
/// the samples (the functional is still computed when it is not; the value is
/// then not sign-definite). Throws std::domain_error for delta outside (0,1)
/// or L <= 0.
double blowup_functional(const RadialField& u, double delta, double L,
                         bool* max_at_origin = nullptr);

/// The ratio I(f) / J(f) of the two functionals above. For admissible
/// weights this is bounded below by the certified positivity constant of the
/// matching Mellin symbol. Throws std::domain_error when J(f) vanishes
/// (constant fields), where the ratio is undefined.
double positivity_ratio(const RadialField& f, double delta);

} // namespace nlt
