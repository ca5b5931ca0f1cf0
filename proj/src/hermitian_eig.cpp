#include "sta/hermitian_eig.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>

namespace sta {

EigenSystem hermitian_eig(const Matrix& A) {
  EigenSystem es;
  es.vectors = A;
  es.values.assign(A.n, 0.0);
  int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'U', A.n,
      reinterpret_cast<lapack_complex_double*>(es.vectors.a.data()), A.n,
      es.values.data());
  if (info != 0)
    throw std::runtime_error("hermitian_eig: zheevd failed, info=" +
                             std::to_string(info));
  return es;
}

double hermiticity_defect(const Matrix& A) {
  double worst = 0.0;
  for (int j = 0; j < A.n; ++j)
    for (int i = 0; i <= j; ++i)
      worst = std::max(worst, std::abs(A(i, j) - std::conj(A(j, i))));
  return worst;
}

}  // namespace sta
