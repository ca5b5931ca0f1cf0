#include "sta/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sta::specfun {

namespace {

using lcplx = std::complex<long double>;

constexpr long double kSqrtPi = 1.7724538509055160272981674833411452L;

// Maclaurin series erf(z) = (2/sqrt(pi)) sum (-1)^n z^(2n+1) / (n! (2n+1)).
// Accumulated in long double. Cancellation is bounded by exp(2 Re(z)^2),
// so this is accurate for any |Im z| as long as Re(z) stays small, and for
// |z| <= 3 in general.
lcplx erf_maclaurin(lcplx z, int max_terms = 4000) {
  lcplx z2 = z * z;
  lcplx term = z;  // z^(2n+1)/n! at n=0
  lcplx sum = z;
  for (int n = 1; n < max_terms; ++n) {
    term *= -z2 / static_cast<long double>(n);
    lcplx contrib = term / static_cast<long double>(2 * n + 1);
    sum += contrib;
    if (std::abs(contrib) < 1e-24L * std::abs(sum) + 1e-4940L) break;
  }
  return sum * (2.0L / kSqrtPi);
}

// Faddeeva function w(zeta) for Im(zeta) >= 0 by backward continued
// fraction: w = (i/sqrt(pi)) / (zeta - (1/2)/(zeta - 1/(zeta - (3/2)/(...)))).
lcplx faddeeva_cf(lcplx zeta, int depth = 80) {
  lcplx t = 0.0L;
  for (int n = depth; n >= 1; --n) {
    t = (0.5L * n) / (zeta - t);
  }
  lcplx r = zeta - t;
  return lcplx(0.0L, 1.0L) / (kSqrtPi * r);
}

// Rational (pole-sum) Faddeeva evaluation: trapezoidal sampling of the
// Hilbert-transform representation with the pole-crossing correction,
//   w(z) = (i h / pi) sum_n exp(-n^2 h^2)/(z - n h)
//          + 2 exp(-z^2) / (1 - exp(-2 pi i z / h)).
// Remainder ~ exp(-pi^2/h^2) / |sin(pi z / h)|^2; with Im(z) >= 0.5 and
// h = 0.4 this sits below long-double resolution.
lcplx faddeeva_polesum(lcplx z, long double h = 0.4L) {
  // the Gaussian weights die below long-double resolution beyond |nh| ~ 7.5
  int n_max = static_cast<int>(std::ceil(7.5 / (double)h));
  lcplx sum = 0.0L;
  for (int n = -n_max; n <= n_max; ++n) {
    long double nh = n * h;
    sum += std::exp(-nh * nh) / (z - nh);
  }
  sum *= lcplx(0.0L, h / 3.14159265358979323846264338327950288L);
  lcplx pole_corr =
      2.0L * std::exp(-z * z) /
      (1.0L - std::exp(lcplx(0.0L, -2.0L) *
                       (3.14159265358979323846264338327950288L / h) * z));
  return sum + pole_corr;
}

lcplx faddeeva_upper(lcplx zeta) {
  return (std::norm(zeta) >= 81.0L) ? faddeeva_cf(zeta)
                                    : faddeeva_polesum(zeta);
}

// erf on the closed first quadrant (Re z >= 0, Im z >= 0).
lcplx erf_first_quadrant(lcplx z, double* err_est) {
  long double x = z.real(), y = z.imag();
  long double r2 = x * x + y * y;
  if (r2 <= 9.0L || x < 0.5L) {
    // series region; cancellation factor exp(2x^2) <= e^{0.5} when x < 0.5
    *err_est = 5e-15;
    return erf_maclaurin(z);
  }
  // Faddeeva region: erf = 1 - exp(-z^2) w(iz) with Im(iz) = x >= 0.5
  lcplx w = faddeeva_upper(lcplx(-y, x));
  lcplx e = std::exp(-z * z);  // |e| = exp(y^2 - x^2), fits long double here
  *err_est = 2e-14;
  return 1.0L - e * w;
}

cplx to_double(lcplx v) {
  return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

}  // namespace

ComplexErfResult cerf(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("cerf: non-finite argument");
  lcplx zz(z.real(), z.imag());
  bool neg = false, conj = false;
  if (zz.real() < 0.0L) {
    zz = -zz;
    neg = true;
  }
  if (zz.imag() < 0.0L) {
    zz = std::conj(zz);
    conj = true;
  }
  double err = 0.0;
  lcplx v = erf_first_quadrant(zz, &err);
  if (conj) v = std::conj(v);
  if (neg) v = -v;
  cplx out = to_double(v);
  double scale = std::max(1.0, std::abs(out));
  return ComplexErfResult{out, err * scale > 1e300 ? 1e300 : err};
}

cplx cerfc_scaled(cplx u) {
  if (u.real() < 0.0)
    throw std::invalid_argument("cerfc_scaled: requires Re(u) >= 0");
  lcplx uu(u.real(), u.imag());
  if (uu.real() >= 0.5L) {
    // W(u) = w(iu) with Im(iu) = Re(u) >= 1/2: pole-sum / CF region
    return to_double(faddeeva_upper(lcplx(-uu.imag(), uu.real())));
  }
  // near-imaginary u: 1 - erf has no cancellation, series is exact here
  double err;
  lcplx erfu = erf_first_quadrant(
      lcplx(uu.real(), std::fabs((double)uu.imag())), &err);
  if (uu.imag() < 0.0L) erfu = std::conj(erfu);
  return to_double(std::exp(uu * uu) * (1.0L - erfu));
}

double e_delta(double z, const Interval& delta) {
  if (z == delta.a() || z == delta.b()) return 0.5;
  return (z > delta.a() && z < delta.b()) ? 1.0 : 0.0;
}

cplx e_delta_smeared(double z, double ell, const Interval& delta) {
  if (!(ell > 0.0))
    throw std::invalid_argument(
        "e_delta_smeared: requires ell > 0; use e_delta for the sharp limit");
  return smeared_tophat(z, cplx(ell, 0.0), delta);
}

cplx smeared_tophat(double z, cplx ell, const Interval& delta) {
  if (ell == cplx(0.0, 0.0))
    throw std::invalid_argument("smeared_tophat: ell must be nonzero");
  // 1/sqrt(i) = exp(-i pi/4)
  const cplx inv_sqrt_i = std::polar(1.0, -0.25 * M_PI);
  cplx ua = (z - delta.a()) * inv_sqrt_i / ell;
  cplx ub = (z - delta.b()) * inv_sqrt_i / ell;
  return 0.5 * (cerf(ua).value - cerf(ub).value);
}

cplx exp_quadratic_integral(cplx q2, cplx q1, cplx q0, double a, double b) {
  if (a == b) return 0.0;
  const double kSqrtPiD = 1.772453850905516027;
  if (std::abs(q2) * std::max(a * a, b * b) < 1e-14) {
    // effectively linear exponent
    cplx base;
    if (std::abs(q1) * std::max(std::fabs(a), std::fabs(b)) < 1e-14) {
      base = (b - a) * (1.0 + 0.5 * q1 * (a + b));
    } else {
      base = (std::exp(q1 * b) - std::exp(q1 * a)) / q1;
    }
    return std::exp(q0) * base;
  }
  // exp(q2 y^2 + q1 y) = exp(c^2) exp(-(s y + c)^2),  s = sqrt(-q2),
  // c = -q1/(2s).  Antiderivative: (sqrt(pi)/2s) exp(q0 + c^2) erf(s y + c).
  cplx s = std::sqrt(-q2);
  if (s.real() < 0.0) s = -s;
  cplx c = -q1 / (2.0 * s);
  cplx ua = s * a + c, ub = s * b + c;
  cplx L = q0 + c * c;
  cplx pref = kSqrtPiD / (2.0 * s);

  auto scaled_term = [&](cplx u) -> cplx {
    // exp(L) erfc(u) for Re(u) >= 0, computed as exp(L - u^2) W(u)
    return std::exp(L - u * u) * cerfc_scaled(u);
  };

  bool a_pos = ua.real() >= 0.0, b_pos = ub.real() >= 0.0;
  if (a_pos && b_pos) {
    // erf(ub) - erf(ua) = erfc(ua) - erfc(ub)
    return pref * (scaled_term(ua) - scaled_term(ub));
  }
  if (!a_pos && !b_pos) {
    return pref * (scaled_term(-ub) - scaled_term(-ua));
  }
  // interval straddles the peak; exp(L) itself is bounded by the physics
  if (!a_pos && b_pos) {
    return pref * (2.0 * std::exp(L) - scaled_term(ub) - scaled_term(-ua));
  }
  return pref * (scaled_term(-ub) + scaled_term(ua) - 2.0 * std::exp(L));
}

}  // namespace sta::specfun
