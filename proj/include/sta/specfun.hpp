#pragma once

#include <complex>

#include "sta/core.hpp"

namespace sta::specfun {

using cplx = std::complex<double>;

/// Result of a complex error function evaluation. The error estimate uses a
/// saturation metric: it bounds |computed - true| / max(1, |true|), so it is
/// an absolute bound in the O(1) region and a relative bound where the
/// function grows like exp(Im(z)^2).
struct ComplexErfResult {
  cplx value;
  double estimated_abs_error;
};

/// erf of a complex argument. Maclaurin series (long double) for small |z|
/// and small Re(z); continued-fraction Faddeeva evaluation elsewhere.
/// Never returns NaN for finite input; overflow of exp(y^2 - x^2) beyond
/// double range saturates to +/-inf components.
ComplexErfResult cerf(cplx z);

/// Scaled complementary error function W(u) = exp(u^2) erfc(u), Re(u) >= 0.
/// Equal to the Faddeeva function w(iu); bounded on its domain.
cplx cerfc_scaled(cplx u);

/// Exact top-hat e_Delta(z): 1 inside, 0 outside, 1/2 on either endpoint.
double e_delta(double z, const Interval& delta);

/// Smeared top-hat E_Delta(z, l) = 1/2 [erf((z-a)/(sqrt(i) l)) - erf((z-b)/(sqrt(i) l))]
/// with sqrt(i) = exp(i pi/4). Requires l > 0; for the l = 0 limit use e_delta.
cplx e_delta_smeared(double z, double ell, const Interval& delta);

/// Generalization of e_delta_smeared to complex smearing scale, i.e. the
/// convolution of the top-hat with a Gaussian of complex variance i l^2 / 2.
/// Used internally for deconvolved kernel masks; bounded whenever
/// arg(i l^2) != pi (checked).
cplx smeared_tophat(double z, cplx ell, const Interval& delta);

/// Integral of exp(q2 y^2 + q1 y + q0) over the real interval [a, b],
/// evaluated through the erf antiderivative with scaled (overflow-safe)
/// regrouping when both endpoints sit in an erf saturation region.
cplx exp_quadratic_integral(cplx q2, cplx q1, cplx q0, double a, double b);

}  // namespace sta::specfun
