#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sta/core.hpp"
#include "sta/hermitian_eig.hpp"

namespace sta::oracle {

/// Potential V(x) for the grid Hamiltonian H = p^2/2m + V(x).
struct PotentialSpec {
  enum class Kind { Free, Harmonic, Quartic, Tabulated };
  Kind kind = Kind::Free;
  double omega = 0.0;            // Harmonic
  double quartic_g = 0.0;        // Quartic: V = g x^4
  std::vector<double> samples;   // Tabulated: values on the evolution grid

  static PotentialSpec free_particle() { return {}; }
  static PotentialSpec harmonic(double om);
  static PotentialSpec quartic(double g);
  static PotentialSpec tabulated(std::vector<double> v);

  double value(double x, double mass) const;
  bool even_symmetric() const { return kind != Kind::Tabulated; }
};

/// Time discretization for split-spectral evolution. Convergence is
/// established by the doubling check (convergence_defect) rather than
/// asserted; richardson enables (4 psi_2N - psi_N)/3 extrapolation.
struct EvolutionPlan {
  GridSpec grid;
  int n_slices = 256;
  bool richardson = true;
};

/// Evolve a state for the full horizon T under
/// H_k = p^2/2m + V(x) - (hbar k / T) x
/// by Strang splitting around an exactly solved kinetic-plus-linear flow.
/// Unitary up to FFT roundoff; wrap-around at the grid edge is detected and
/// reported as an error.
GridState evolve_effective(const SystemParams& params,
                           const PotentialSpec& potential, double k,
                           const GridState& psi, const EvolutionPlan& plan);

/// L2 change of evolve_effective output when n_slices doubles; the plan
/// invariant asks for < 1e-8 on representative states.
double evolution_convergence_defect(const SystemParams& params,
                                    const PotentialSpec& potential, double k,
                                    const GridState& psi,
                                    const EvolutionPlan& plan);

/// Quadrature specification for the k-integral of the class operator.
struct KQuadSpec {
  double k_max = 0.0;       // 0 = automatic from scales and grid bandwidth
  double rel_tol = 1e-7;    // target relative L2 error from the GK estimate
  int initial_panels = 96;  // per half-axis
  int max_panels = 2048;
  int slices_at_kmax = 1024;  // per-node slice count scales with |k|
};

struct KQuadDiagnostics {
  double k_max = 0.0;
  int panels = 0;
  int evolutions = 0;
  double error_estimate = 0.0;  // relative L2
  bool used_parity = false;
};

/// C_Delta |psi> as the Fourier-weighted quadrature of effective evolutions
/// (one per k node, Gauss-Kronrod panels, adaptive refinement). Throws when
/// the embedded error estimate cannot reach rel_tol within max_panels.
GridState class_operator_apply(const SystemParams& params,
                               const PotentialSpec& potential,
                               const Interval& delta, const GridState& psi,
                               const EvolutionPlan& plan, const KQuadSpec& kq,
                               KQuadDiagnostics* diag = nullptr);

/// Same quadrature applied to several ranges at once; the expensive evolved
/// states are shared across cells.
std::vector<GridState> class_operator_apply_many(
    const SystemParams& params, const PotentialSpec& potential,
    const std::vector<Interval>& cells, const GridState& psi,
    const EvolutionPlan& plan, const KQuadSpec& kq,
    KQuadDiagnostics* diag = nullptr);

/// Hermitian grid realization of the time average (1/N) sum U'(t_i) X U(t_i)
/// with midpoint sampling, Richardson-extrapolated in the slice count, with
/// its full eigendecomposition.
struct XbarOperator {
  GridSpec grid;
  Matrix matrix;
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  double raw_hermiticity_defect = 0.0;
};

XbarOperator build_xbar_operator(const SystemParams& params,
                                 const PotentialSpec& potential,
                                 const EvolutionPlan& plan);

struct ProjectionAudit {
  std::vector<double> edge_eigenvalues;  // within 1e-12 of an interval edge
};

/// Project onto eigenvectors with eigenvalue in Delta (half-open), then
/// evolve the full horizon under H. Returns on the grid of `psi`.
GridState projection_apply(const XbarOperator& xbar, const Interval& delta,
                           const SystemParams& params,
                           const PotentialSpec& potential,
                           const GridState& psi, const EvolutionPlan& plan,
                           ProjectionAudit* audit = nullptr);

/// Projection step only (no final evolution), exposed for orthogonality and
/// completeness checks.
GridState project_only(const XbarOperator& xbar, const Interval& delta,
                       const GridState& psi, ProjectionAudit* audit = nullptr);

}  // namespace sta::oracle
