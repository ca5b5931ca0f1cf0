#pragma once

#include "sta/core.hpp"

namespace sta::analytic {

/// Length scales of the two operator representations plus the packet
/// spreading time. For the free particle lambda_P = lambda and
/// lambda_C = lambda/sqrt(3) exactly; the oscillator forms degenerate to
/// those limits as omega T -> 0.
struct ScaleConstants {
  double lambda;
  double lambda_P;
  double lambda_C;
  double t_spread;
};

/// Throws "scale degenerate" outside the admissible window 0 <= omega T < pi
/// (unique classical path, positive radicands, no caustic).
ScaleConstants scale_constants(const SystemParams& params,
                               double packet_width);

/// Time average of the unique classical path from x1 to x2 in time T.
double xbar_classical(const SystemParams& params, double x2, double x1);

/// Coefficient mu with xbar_cl = mu (x1 + x2); 1/2 for the free particle,
/// tan(u/2)/u for the oscillator.
double xbar_classical_coeff(const SystemParams& params);

/// Propagator <x2| exp(-i H T / hbar) |x1> (free or Mehler form).
cplx propagator(const SystemParams& params, double x2, double x1);

/// <x2| C_Delta |x1> = K(x2,T;x1,0) E_Delta(xbar_cl, lambda_C).
cplx c_matrix_element(const SystemParams& params, const Interval& delta,
                      double x2, double x1);

/// <x2| P_Delta |x1> = K(x2,T;x1,0) E_Delta(xbar_cl, lambda_P).
cplx p_matrix_element(const SystemParams& params, const Interval& delta,
                      double x2, double x1);

/// Delta-normalized eigenfunction <x|xbar> of the time-average operator.
cplx xbar_eigenfunction(const SystemParams& params, double xbar, double x);

/// Shared hbar -> 0 limit of both representations:
/// e_Delta(xbar_cl) K(x2,T;x1,0).
cplx classical_limit_form(const SystemParams& params, const Interval& delta,
                          double x2, double x1);

enum class KernelKind { ClassOp, Projection, ClassicalLimit };

enum class ApplyMethod {
  Auto,         // Gaussian-free choice: Trapezoid at moderate scales
  Trapezoid,    // direct quadrature of the kernel on the state grid
  SpectralMask  // exact half-evolution / mask / half-evolution (free only)
};

struct ApplyResult {
  GridState out;
  double probability;  // discrete norm^2 of out
};

/// Apply one of the three kernels to a grid state by the selected method.
ApplyResult apply_kernel_to_state(KernelKind kind, const SystemParams& params,
                                  const Interval& delta, const GridState& psi,
                                  ApplyMethod method = ApplyMethod::Auto);

/// Closed-form application of a kernel to an analytic Gaussian packet,
/// exact at any hbar (the kernel integral reduces to complex-erf algebra).
ApplyResult apply_kernel_to_gaussian(KernelKind kind,
                                     const SystemParams& params,
                                     const Interval& delta,
                                     const GaussianState& psi,
                                     const GridSpec& out_grid);

/// Exact evolved packet U(T) psi on a grid (free or oscillator).
GridState evolved_gaussian(const SystemParams& params,
                           const GaussianState& psi, const GridSpec& grid);

/// Pointwise value of U(T) psi at x (same closed form).
cplx evolved_gaussian_amplitude(const SystemParams& params,
                                const GaussianState& psi, double x);

}  // namespace sta::analytic
