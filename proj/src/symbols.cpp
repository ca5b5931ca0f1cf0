#include "sta/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sta/fft.hpp"

namespace sta::symbols {

namespace {

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smoothstep_inf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = std::exp(-1.0 / t);
  double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// Smooth half-band momentum mask: identically 1 for |k| <= 0.5 k_half and
// identically 0 beyond 0.95 k_half, C-infinity in between. Keeps all
// even-offset Weyl transforms free of fold and seam artifacts.
double band_mask(double kappa, double dx) {
  double k_half = 0.5 * M_PI / dx;
  double t = (std::fabs(kappa) - 0.5 * k_half) / (0.45 * k_half);
  return 1.0 - smoothstep_inf(t);
}

}  // namespace

double SymbolField::max_imag() const {
  double worst = 0.0;
  for (const auto& row : vals)
    for (cplx v : row) worst = std::max(worst, std::fabs(v.imag()));
  return worst;
}

SymbolField weyl_symbol(const Matrix& A, const GridSpec& grid, double hbar) {
  const int n = grid.n;
  if (A.n != n) throw std::invalid_argument("weyl_symbol: size mismatch");
  const int m_half = n / 4;   // offsets m in [-n/4, n/4)
  const int nfft = n / 2;

  SymbolField sym;
  sym.hbar = hbar;
  for (int j = n / 4; j < 3 * n / 4; ++j) sym.X.push_back(grid.x(j));
  sym.P.resize(nfft);
  for (int k = 0; k < nfft; ++k)
    sym.P[k] = hbar * fft_wavenumber(k, nfft, 2.0 * grid.dx());

  std::vector<cplx> arr(nfft);
  for (int j = n / 4; j < 3 * n / 4; ++j) {
    // arr indexed by m wrapped into [0, nfft): m=0 single weight, else 2x
    for (int mi = 0; mi < nfft; ++mi) {
      int m = (mi < nfft / 2) ? mi : mi - nfft;
      cplx v = A(j + m, j - m);
      arr[mi] = (m == 0) ? v : 2.0 * v;
    }
    fft_forward(arr);  // sum_m arr[m] exp(-2 pi i k m / nfft)
    sym.vals.emplace_back(arr);
  }
  return sym;
}

Matrix weyl_symbol_inverse(const SymbolField& sym, const GridSpec& grid) {
  const int n = grid.n;
  const int nfft = n / 2;
  Matrix A(n);
  std::vector<cplx> arr(nfft);
  for (size_t r = 0; r < sym.vals.size(); ++r) {
    int j = n / 4 + static_cast<int>(r);
    arr = sym.vals[r];
    fft_backward(arr);
    for (int mi = 0; mi < nfft; ++mi) {
      int m = (mi < nfft / 2) ? mi : mi - nfft;
      cplx v = arr[mi];
      if (m != 0) v *= 0.5;
      A(j + m, j - m) = v;
    }
  }
  return A;
}

Matrix position_matrix(const GridSpec& grid) {
  Matrix X(grid.n);
  for (int j = 0; j < grid.n; ++j) X(j, j) = grid.x(j);
  return X;
}

Matrix momentum_matrix(const GridSpec& grid, double hbar) {
  // band-limited spectral momentum: F^dag diag(hbar kappa mask) F via FFTs
  const int n = grid.n;
  Matrix P(n);
  std::vector<cplx> col(n);
  for (int c = 0; c < n; ++c) {
    std::fill(col.begin(), col.end(), cplx(0.0, 0.0));
    col[c] = 1.0;
    fft_forward(col);
    for (int j = 0; j < n; ++j) {
      double kap = fft_wavenumber(j, n, grid.dx());
      col[j] *= hbar * kap * band_mask(kap, grid.dx());
    }
    fft_backward(col);
    for (int j = 0; j < n; ++j) P(j, c) = col[j];
  }
  return P;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  if (A.n != B.n) throw std::invalid_argument("matmul: size mismatch");
  const int n = A.n;
  Matrix C(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      cplx b = B(k, j);
      if (b == cplx(0.0, 0.0)) continue;
      const cplx* acol = &A(0, k);
      cplx* ccol = &C(0, j);
      for (int i = 0; i < n; ++i) ccol[i] += acol[i] * b;
    }
  }
  return C;
}

DeviationReport symbol_product_check(const Matrix& A, const Matrix& B,
                                     const GridSpec& grid, double hbar,
                                     const PhaseSpaceWindow& window) {
  SymbolField sa = weyl_symbol(A, grid, hbar);
  SymbolField sb = weyl_symbol(B, grid, hbar);
  SymbolField sc = weyl_symbol(matmul(A, B), grid, hbar);
  double worst = 0.0;
  for (size_t ix = 0; ix < sa.X.size(); ++ix)
    for (size_t ip = 0; ip < sa.P.size(); ++ip) {
      if (!window.contains(sa.X[ix], sa.P[ip])) continue;
      cplx dev = sc.vals[ix][ip] - sa.vals[ix][ip] * sb.vals[ix][ip];
      worst = std::max(worst, std::abs(dev));
    }
  return {worst, hbar};
}

double classical_xbar(const SystemParams& params,
                      const oracle::PotentialSpec& potential, double x0,
                      double p0) {
  using Kind = oracle::PotentialSpec::Kind;
  double T = params.horizon, m = params.mass;
  if (potential.kind == Kind::Free) return x0 + 0.5 * p0 * T / m;
  if (potential.kind == Kind::Harmonic) {
    double u = potential.omega * T;
    return std::sin(u) / u * x0 +
           (1.0 - std::cos(u)) / (u * u) * (p0 / m) * T;
  }
  if (potential.kind != Kind::Quartic)
    throw std::invalid_argument("classical_xbar: unsupported potential");
  double g = potential.quartic_g;
  auto force = [&](double x) { return -4.0 * g * x * x * x; };
  auto run = [&](int N) {
    double dt = T / N, x = x0, p = p0, acc = 0.0;
    for (int i = 0; i < N; ++i) {
      // RK4 on (x, p); trapezoid accumulation of x(t)
      double x_prev = x;
      double k1x = p / m, k1p = force(x);
      double k2x = (p + 0.5 * dt * k1p) / m, k2p = force(x + 0.5 * dt * k1x);
      double k3x = (p + 0.5 * dt * k2p) / m, k3p = force(x + 0.5 * dt * k2x);
      double k4x = (p + dt * k3p) / m, k4p = force(x + dt * k3x);
      x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
      p += dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      acc += 0.5 * dt * (x_prev + x);
    }
    return acc / T;
  };
  double a = run(512), b = run(1024);
  double best = (4.0 * b - a) / 3.0;
  double c = run(2048);
  double best2 = (4.0 * c - b) / 3.0;
  if (std::fabs(best2 - best) > 1e-9 * std::max(1.0, std::fabs(best2)))
    throw std::runtime_error("classical_xbar: ODE step control failure");
  return best2;
}

DeviationReport xbar_symbol_check(const SystemParams& params,
                                  const oracle::PotentialSpec& potential,
                                  const oracle::EvolutionPlan& plan,
                                  const PhaseSpaceWindow& window) {
  oracle::XbarOperator xb = oracle::build_xbar_operator(params, potential,
                                                        plan);
  // compress to the half band so the even-offset transform is faithful
  Matrix proj = momentum_matrix(plan.grid, 1.0);  // reuse the smooth mask
  {
    // turn the masked momentum into a pure band projector: replace the
    // diagonal kappa values by the mask alone
    const int n = plan.grid.n;
    std::vector<cplx> col(n);
    for (int c = 0; c < n; ++c) {
      std::fill(col.begin(), col.end(), cplx(0.0, 0.0));
      col[c] = 1.0;
      fft_forward(col);
      for (int j = 0; j < n; ++j)
        col[j] *= band_mask(fft_wavenumber(j, n, plan.grid.dx()),
                            plan.grid.dx());
      fft_backward(col);
      for (int j = 0; j < n; ++j) proj(j, c) = col[j];
    }
  }
  Matrix compressed = matmul(proj, matmul(xb.matrix, proj));
  SymbolField sym = weyl_symbol(compressed, plan.grid, params.hbar);

  double worst = 0.0;
  for (size_t ix = 0; ix < sym.X.size(); ++ix)
    for (size_t ip = 0; ip < sym.P.size(); ++ip) {
      if (!window.contains(sym.X[ix], sym.P[ip])) continue;
      double target =
          classical_xbar(params, potential, sym.X[ix], sym.P[ip]);
      worst = std::max(worst, std::abs(sym.vals[ix][ip] - target));
    }
  return {worst, params.hbar};
}

}  // namespace sta::symbols
