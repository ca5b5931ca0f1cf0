#pragma once

#include <vector>

#include "sta/core.hpp"
#include "sta/hermitian_eig.hpp"
#include "sta/oracle.hpp"

namespace sta::symbols {

/// Weyl symbol on the phase-space lattice. X points are the central half of
/// the position grid (rows with a full anti-diagonal period available);
/// P points are FFT frequencies with spacing 2 pi hbar / (n dx).
struct SymbolField {
  std::vector<double> X;
  std::vector<double> P;
  std::vector<std::vector<cplx>> vals;  // vals[ix][ip]
  double hbar;

  double max_imag() const;
};

/// Discrete Weyl transform over even anti-diagonal offsets,
/// sym(X_j, P) = A_jj + 2 sum_{m != 0} exp(-i P 2m dx / hbar) A[j+m, j-m].
SymbolField weyl_symbol(const Matrix& A, const GridSpec& grid, double hbar);

/// Inverse transform; returns the reconstructable anti-diagonal entries as
/// a matrix (zero outside), for the round-trip invariant.
Matrix weyl_symbol_inverse(const SymbolField& sym, const GridSpec& grid);

struct PhaseSpaceWindow {
  double x_lo, x_hi, p_lo, p_hi;
  bool contains(double x, double p) const {
    return x >= x_lo && x <= x_hi && p >= p_lo && p <= p_hi;
  }
};

struct DeviationReport {
  double max_abs_dev;
  double hbar;
};

/// || symbol(AB) - symbol(A) symbol(B) ||_max over the window.
DeviationReport symbol_product_check(const Matrix& A, const Matrix& B,
                                     const GridSpec& grid, double hbar,
                                     const PhaseSpaceWindow& window);

/// Compare the symbol of the constructed time-average operator against the
/// classical time average along trajectories launched from (X, P).
DeviationReport xbar_symbol_check(const SystemParams& params,
                                  const oracle::PotentialSpec& potential,
                                  const oracle::EvolutionPlan& plan,
                                  const PhaseSpaceWindow& window);

/// Classical time average of x(t) for the initial condition (x0, p0):
/// closed form for free/harmonic, adaptive RK4 otherwise.
double classical_xbar(const SystemParams& params,
                      const oracle::PotentialSpec& potential, double x0,
                      double p0);

/// Position matrix, band-limited spectral momentum matrix, and the identity
/// on a grid (helpers for symbol tests and operator assembly).
Matrix position_matrix(const GridSpec& grid);
Matrix momentum_matrix(const GridSpec& grid, double hbar);
Matrix matmul(const Matrix& A, const Matrix& B);

}  // namespace sta::symbols
