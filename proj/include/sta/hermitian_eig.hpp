#pragma once

#include <complex>
#include <vector>

#include "sta/core.hpp"

namespace sta {

/// Dense complex matrix, column-major (LAPACK layout).
struct Matrix {
  int n = 0;
  std::vector<cplx> a;  // a[i + j*n]

  Matrix() = default;
  explicit Matrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim) {}

  cplx& operator()(int i, int j) { return a[i + static_cast<size_t>(j) * n]; }
  const cplx& operator()(int i, int j) const {
    return a[i + static_cast<size_t>(j) * n];
  }
};

struct EigenSystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j is the eigenvector of values[j]
};

/// Full eigendecomposition of a Hermitian matrix (LAPACK zheevd).
/// Deterministic for a given input; throws on LAPACK failure.
EigenSystem hermitian_eig(const Matrix& A);

/// max |A - A^dagger| entry.
double hermiticity_defect(const Matrix& A);

}  // namespace sta
