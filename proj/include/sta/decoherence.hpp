#pragma once

#include <vector>

#include "sta/core.hpp"
#include "sta/hermitian_eig.hpp"
#include "sta/oracle.hpp"

namespace sta::decoherence {

enum class Representation { ClassOperator, Projection };

/// Decoherence functional D(alpha, alpha') = <psi| C_a^dag C_a' |psi> over a
/// partition. Index 0 is the left tail, 1..n the cells, n+1 the right tail.
struct DecoherenceMatrix {
  Partition partition;
  Representation rep;
  Matrix entries;

  /// max |D_ab| / sqrt(D_aa D_bb) over a != b.
  double eps_max() const;
  std::vector<double> probabilities() const;  // diagonal entries
  double sum_defect() const;                  // |sum p - 1|
};

struct DecoherenceReport {
  double hbar;
  double eps_max;
  std::vector<double> probabilities;
  double sum_defect;
};

/// Decoherence matrix from the closed-form kernels applied to an analytic
/// Gaussian (exact at any hbar). The projection representation uses the
/// exact mid-time factorization, so its off-diagonals vanish identically.
/// Throws if the partition leaves more than 1e-8 of |psi|^2 mass outside
/// [x_min, x_max) plus the modeled drift (the tails would then carry
/// physics the cells should have).
DecoherenceMatrix decoherence_matrix(Representation rep,
                                     const SystemParams& params,
                                     const Partition& partition,
                                     const GaussianState& psi,
                                     const GridSpec& grid);

/// Same matrix from the grid oracle (k-quadrature class operators or
/// eigenprojections); used for cross-validation of the closed-form route.
DecoherenceMatrix decoherence_matrix_oracle(
    Representation rep, const SystemParams& params, const Partition& partition,
    const GridState& psi, const oracle::PotentialSpec& potential,
    const oracle::EvolutionPlan& plan, const oracle::KQuadSpec& kq);

/// Explicit free-particle kernel <x| C_Delta^dag C_Delta' |x'> by adaptive
/// quadrature over the intermediate endpoint y.
cplx freepart_decoherence_kernel(const SystemParams& params,
                                 const Interval& delta1,
                                 const Interval& delta2, double x,
                                 double xprime, double abs_tol = 1e-9);

struct SweepResult {
  std::vector<DecoherenceReport> class_rows;
  std::vector<DecoherenceReport> projection_rows;
  double class_decay_exponent;  // log-log slope of eps_max vs hbar
};

/// hbar sweep at fixed lengths: per-hbar decoherence reports for both
/// representations plus the fitted decay exponent of the class-operator
/// off-diagonals.
SweepResult hbar_sweep(const SystemParams& base, const Partition& partition,
                       const GaussianState& psi, const GridSpec& grid,
                       const std::vector<double>& hbars);

}  // namespace sta::decoherence
