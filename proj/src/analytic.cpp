#include "sta/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "sta/fft.hpp"
#include "sta/specfun.hpp"

namespace sta::analytic {

namespace {

using specfun::e_delta;
using specfun::e_delta_smeared;
using specfun::exp_quadratic_integral;
using specfun::smeared_tophat;

void require_admissible(const SystemParams& p) {
  if (p.free_particle()) return;
  double u = p.omega_T();
  if (!(u > 0.0 && u < M_PI))
    throw std::invalid_argument(
        "scale degenerate: omega*T outside the admissible window (0, pi)");
}

// 2 sin(u/2) - u cos(u/2), series-protected against cancellation
double two_sin_minus_ucos(double u) {
  if (std::fabs(u) < 0.1) {
    double u2 = u * u;
    return (u * u2 / 12.0) * (1.0 - u2 / 40.0 + u2 * u2 / 4480.0);
  }
  return 2.0 * std::sin(0.5 * u) - u * std::cos(0.5 * u);
}

// Quadratic-kernel coefficients: K = P_K exp[i(A_K (x2^2+x1^2) + B_K x2 x1)]
struct KernelCoeffs {
  cplx pref;
  double A_K;
  double B_K;
};

KernelCoeffs kernel_coeffs(const SystemParams& p) {
  cplx root_inv_i = std::polar(1.0, -0.25 * M_PI);
  if (p.free_particle()) {
    double s = p.mass / (2.0 * p.hbar * p.horizon);
    cplx pref =
        std::sqrt(p.mass / (2.0 * M_PI * p.hbar * p.horizon)) * root_inv_i;
    return {pref, s, -2.0 * s};
  }
  double u = p.omega_T();
  double sinu = std::sin(u);
  if (std::fabs(sinu) < 1e-12)
    throw std::invalid_argument("propagator: caustic, sin(omega T) = 0");
  double s = p.mass * p.omega / (2.0 * p.hbar * sinu);
  cplx pref = std::sqrt(p.mass * p.omega / (2.0 * M_PI * p.hbar * sinu)) *
              root_inv_i;
  return {pref, s * std::cos(u), -2.0 * s};
}

double ell_for(const SystemParams& p, KernelKind kind, double d_for_scales) {
  ScaleConstants sc = scale_constants(p, d_for_scales);
  switch (kind) {
    case KernelKind::ClassOp:
      return sc.lambda_C;
    case KernelKind::Projection:
      return sc.lambda_P;
    default:
      return 0.0;
  }
}

ApplyResult apply_trapezoid(KernelKind kind, const SystemParams& params,
                            const Interval& delta, const GridState& psi) {
  GridState out(psi.grid);
  double dx = psi.dx();
  int n = psi.n();
  KernelCoeffs kc = kernel_coeffs(params);
  double mu = xbar_classical_coeff(params);
  double ell = ell_for(params, kind, 1.0);

  // the E argument mu (x1 + x2) only depends on the anti-diagonal index
  // i + j, so the special-function factor needs 2n evaluations
  std::vector<cplx> e_diag(2 * n - 1);
  for (int s = 0; s < 2 * n - 1; ++s) {
    double zeta = mu * (2.0 * psi.grid.x_min + s * dx);
    e_diag[s] = (kind == KernelKind::ClassicalLimit)
                    ? cplx(e_delta(zeta, delta), 0.0)
                    : e_delta_smeared(zeta, ell, delta);
  }
  std::vector<cplx> quad_phase(n);  // exp(i A_K x^2)
  for (int j = 0; j < n; ++j)
    quad_phase[j] = std::exp(cplx(0.0, kc.A_K * psi.x(j) * psi.x(j)));

  for (int i = 0; i < n; ++i) {
    cplx acc = 0.0;
    double x2 = psi.x(i);
    cplx step = std::exp(cplx(0.0, kc.B_K * x2 * dx));
    cplx cross = std::exp(cplx(0.0, kc.B_K * x2 * psi.grid.x_min));
    for (int j = 0; j < n; ++j) {
      if ((j & 255) == 0)  // refresh the phase recurrence periodically
        cross = std::exp(cplx(0.0, kc.B_K * x2 * psi.x(j)));
      acc += quad_phase[j] * cross * e_diag[i + j] * psi.amp[j];
      cross *= step;
    }
    out.amp[i] = acc * kc.pref * quad_phase[i] * dx;
  }
  return {out, out.norm2()};
}

void half_free_evolution(const SystemParams& p, GridState& s) {
  fft_forward(s.amp);
  int n = s.n();
  double dx = s.dx();
  double c = p.hbar * 0.5 * p.horizon / (2.0 * p.mass);
  for (int j = 0; j < n; ++j) {
    double k = fft_wavenumber(j, n, dx);
    s.amp[j] *= std::exp(cplx(0.0, -c * k * k));
  }
  fft_backward(s.amp);
}

// Exact identity for the free particle: all three kernels factor as
// U(T/2) M U(T/2) with a multiplication mask M. The projection mask is the
// sharp top-hat (xbar is the mid-time position); the class-operator and
// limit masks are the top-hat deconvolved by the Fresnel smearing, i.e.
// smeared top-hats with imaginary-squared scale.
ApplyResult apply_spectral_mask(KernelKind kind, const SystemParams& params,
                                const Interval& delta, const GridState& psi) {
  if (!params.free_particle())
    throw std::invalid_argument(
        "apply_kernel_to_state: SpectralMask path implemented for the free "
        "particle only");
  // pad 2x to keep the half-evolved intermediate away from the wrap edge
  double span = psi.grid.x_max - psi.grid.x_min;
  GridSpec padded(psi.grid.x_min - 0.5 * span, psi.grid.x_max + 0.5 * span,
                  2 * psi.n());
  GridState work = embed(psi, padded);
  half_free_evolution(params, work);
  double lambda = params.lambda();
  for (int j = 0; j < work.n(); ++j) {
    double y = work.x(j);
    cplx mask;
    switch (kind) {
      case KernelKind::Projection:
        mask = e_delta(y, delta);
        break;
      case KernelKind::ClassOp:
        // ell^2 = -2 lambda^2/3; the branch with erf arguments along the
        // exp(+i pi/4) ray keeps the mask -> 1 inside the range
        mask = smeared_tophat(y, cplx(0.0, -lambda * std::sqrt(2.0 / 3.0)),
                              delta);
        break;
      default:  // ClassicalLimit
        mask = smeared_tophat(y, cplx(0.0, -lambda), delta);
        break;
    }
    work.amp[j] *= mask;
  }
  half_free_evolution(params, work);
  GridState out = restrict_to(work, psi.grid);
  return {out, out.norm2()};
}

}  // namespace

ScaleConstants scale_constants(const SystemParams& p, double packet_width) {
  require_admissible(p);
  ScaleConstants sc;
  sc.lambda = p.lambda();
  sc.t_spread =
      packet_width * packet_width * p.mass / (2.0 * p.hbar);
  if (p.free_particle()) {
    sc.lambda_P = sc.lambda;
    sc.lambda_C = sc.lambda / std::sqrt(3.0);
    return sc;
  }
  double u = p.omega_T();
  double s_half = std::sin(0.5 * u);
  double base = p.hbar * p.horizon / p.mass;  // = 2 lambda^2
  double u_over_sin = u / std::sin(u);
  // (1 - cos u)/u^2 = 2 sin^2(u/2) / u^2
  double one_m_cos_over_u2 = 2.0 * s_half * s_half / (u * u);
  double lp2 = 2.0 * base * u_over_sin * one_m_cos_over_u2 *
               one_m_cos_over_u2;
  // (1-cos u)/u^4 - sin u/(2 u^3) = sin(u/2) (2 sin(u/2) - u cos(u/2)) / u^4
  double bracket = s_half * two_sin_minus_ucos(u) / (u * u * u * u);
  double lc2 = 4.0 * base * u_over_sin * bracket;
  if (!(lp2 > 0.0) || !(lc2 > 0.0))
    throw std::invalid_argument("scale degenerate: nonpositive radicand");
  sc.lambda_P = std::sqrt(lp2);
  sc.lambda_C = std::sqrt(lc2);
  return sc;
}

double xbar_classical_coeff(const SystemParams& p) {
  if (p.free_particle()) return 0.5;
  require_admissible(p);
  double u = p.omega_T();
  return std::tan(0.5 * u) / u;  // = (1 - cos u)/(u sin u)
}

double xbar_classical(const SystemParams& p, double x2, double x1) {
  return xbar_classical_coeff(p) * (x1 + x2);
}

cplx propagator(const SystemParams& p, double x2, double x1) {
  KernelCoeffs kc = kernel_coeffs(p);
  return kc.pref *
         std::exp(cplx(0.0, kc.A_K * (x2 * x2 + x1 * x1) + kc.B_K * x2 * x1));
}

cplx c_matrix_element(const SystemParams& p, const Interval& delta, double x2,
                      double x1) {
  double ell = ell_for(p, KernelKind::ClassOp, 1.0);
  return propagator(p, x2, x1) *
         e_delta_smeared(xbar_classical(p, x2, x1), ell, delta);
}

cplx p_matrix_element(const SystemParams& p, const Interval& delta, double x2,
                      double x1) {
  double ell = ell_for(p, KernelKind::Projection, 1.0);
  return propagator(p, x2, x1) *
         e_delta_smeared(xbar_classical(p, x2, x1), ell, delta);
}

cplx xbar_eigenfunction(const SystemParams& p, double xbar, double x) {
  double pref = std::sqrt(p.mass / (M_PI * p.hbar * p.horizon));
  double mT = p.mass / p.horizon;
  if (p.free_particle()) {
    double phase = (2.0 * mT / p.hbar) * (xbar * x - 0.5 * x * x);
    return pref * std::exp(cplx(0.0, phase));
  }
  require_admissible(p);
  double u = p.omega_T();
  double s_half = std::sin(0.5 * u);
  if (std::fabs(s_half) < 1e-12)
    throw std::invalid_argument("xbar_eigenfunction: sin(omega T/2) caustic");
  double amp = pref * (0.5 * u) / std::fabs(s_half);
  // u^2/(1 - cos u) = u^2 / (2 sin^2(u/2))
  double coeff = u * u / (2.0 * s_half * s_half);
  double phase = (mT / p.hbar) * coeff *
                 (xbar * x - 0.5 * (std::sin(u) / u) * x * x);
  return amp * std::exp(cplx(0.0, phase));
}

cplx classical_limit_form(const SystemParams& p, const Interval& delta,
                          double x2, double x1) {
  return propagator(p, x2, x1) *
         e_delta(xbar_classical(p, x2, x1), delta);
}

ApplyResult apply_kernel_to_state(KernelKind kind, const SystemParams& params,
                                  const Interval& delta, const GridState& psi,
                                  ApplyMethod method) {
  require_admissible(params);
  if (method == ApplyMethod::Auto) method = ApplyMethod::Trapezoid;
  if (method == ApplyMethod::Trapezoid)
    return apply_trapezoid(kind, params, delta, psi);
  return apply_spectral_mask(kind, params, delta, psi);
}

ApplyResult apply_kernel_to_gaussian(KernelKind kind,
                                     const SystemParams& params,
                                     const Interval& delta,
                                     const GaussianState& psi,
                                     const GridSpec& out_grid) {
  require_admissible(params);
  KernelCoeffs kc = kernel_coeffs(params);
  double mu = xbar_classical_coeff(params);
  double d = psi.width, x0 = psi.center, p0 = psi.momentum;
  double hb = params.hbar;
  cplx pref_psi = std::pow(2.0 / (M_PI * d * d), 0.25);

  GridState out(out_grid);
  if (kind == KernelKind::ClassicalLimit) {
    // integrate K psi over the x1-interval mapped out by xbar_cl in Delta
    cplx alpha = cplx(1.0 / (d * d), -kc.A_K);
    for (int i = 0; i < out_grid.n; ++i) {
      double x2 = out_grid.x(i);
      cplx beta = cplx(2.0 * x0 / (d * d), kc.B_K * x2 + p0 / hb);
      cplx gamma = cplx(-x0 * x0 / (d * d), kc.A_K * x2 * x2);
      double lo = delta.a() / mu - x2, hi = delta.b() / mu - x2;
      out.amp[i] = kc.pref * pref_psi *
                   exp_quadratic_integral(-alpha, beta, gamma, lo, hi);
    }
    return {out, out.norm2()};
  }

  double ell = ell_for(params, kind, d);
  // K psi E: E(mu(x1+x2), ell) written as the top-hat convolved with the
  // complex Gaussian G; the x1 integral is then Gaussian and the remaining
  // y integral over [a, b] is an erf difference.
  cplx i_over_l2 = cplx(0.0, 1.0) / cplx(ell * ell, 0.0);
  cplx pref_G = 1.0 / (std::sqrt(M_PI) * std::polar(1.0, 0.25 * M_PI) * ell);
  cplx alpha = cplx(1.0 / (d * d), -kc.A_K) - i_over_l2 * (mu * mu);
  cplx beta_y = -2.0 * mu * i_over_l2;
  cplx gamma2 = i_over_l2;
  cplx pref_all = kc.pref * pref_G * pref_psi * std::sqrt(M_PI / alpha);
  for (int i = 0; i < out_grid.n; ++i) {
    double x2 = out_grid.x(i);
    cplx beta0 = cplx(2.0 * x0 / (d * d), kc.B_K * x2 + p0 / hb) +
                 2.0 * mu * mu * x2 * i_over_l2;
    cplx gamma0 = cplx(-x0 * x0 / (d * d), kc.A_K * x2 * x2) +
                  mu * mu * x2 * x2 * i_over_l2;
    cplx gamma1 = -2.0 * mu * x2 * i_over_l2;
    cplx q2 = beta_y * beta_y / (4.0 * alpha) + gamma2;
    cplx q1 = beta0 * beta_y / (2.0 * alpha) + gamma1;
    cplx q0 = beta0 * beta0 / (4.0 * alpha) + gamma0;
    out.amp[i] = pref_all * exp_quadratic_integral(q2, q1, q0, delta.a(),
                                                   delta.b());
  }
  return {out, out.norm2()};
}

cplx evolved_gaussian_amplitude(const SystemParams& params,
                                const GaussianState& psi, double x) {
  KernelCoeffs kc = kernel_coeffs(params);
  double d = psi.width, x0 = psi.center, p0 = psi.momentum;
  cplx pref_psi = std::pow(2.0 / (M_PI * d * d), 0.25);
  cplx alpha = cplx(1.0 / (d * d), -kc.A_K);
  cplx beta = cplx(2.0 * x0 / (d * d), kc.B_K * x + p0 / params.hbar);
  cplx gamma = cplx(-x0 * x0 / (d * d), kc.A_K * x * x);
  return kc.pref * pref_psi * std::sqrt(M_PI / alpha) *
         std::exp(beta * beta / (4.0 * alpha) + gamma);
}

GridState evolved_gaussian(const SystemParams& params, const GaussianState& psi,
                           const GridSpec& grid) {
  GridState out(grid);
  for (int i = 0; i < grid.n; ++i)
    out.amp[i] = evolved_gaussian_amplitude(params, psi, grid.x(i));
  return out;
}

}  // namespace sta::analytic
