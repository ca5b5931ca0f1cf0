#include "sta/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sta/analytic.hpp"
#include "sta/fft.hpp"

namespace sta::oracle {

namespace {

// 15-point Kronrod / 7-point Gauss rule on [-1, 1] (QUADPACK dqk15).
// Gauss nodes sit at Kronrod indices 1, 3, 5 (mirrored) and the center.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

int next_pow2(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

struct Stepper {
  const SystemParams& params;
  const PotentialSpec& pot;
  const GridSpec grid;
  double k_source;  // H_k source strength: force f = hbar k / T

  std::vector<double> v_eff;    // V(x) - f x on the grid
  std::vector<double> kin;      // hbar kappa^2 / 2m on FFT bins

  Stepper(const SystemParams& p, const PotentialSpec& v, const GridSpec& g,
          double k)
      : params(p), pot(v), grid(g), k_source(k) {
    double f = p.hbar * k / p.horizon;
    v_eff.resize(g.n);
    for (int j = 0; j < g.n; ++j) {
      double x = g.x(j);
      v_eff[j] = v.value(x, p.mass) - f * x;
    }
    kin.resize(g.n);
    for (int j = 0; j < g.n; ++j) {
      double kap = fft_wavenumber(j, g.n, g.dx());
      kin[j] = p.hbar * kap * kap / (2.0 * p.mass);
    }
  }

  // One Strang step over signed dt. The kinetic-plus-linear part is exact
  // (kick-drift-kick plus the scalar phase f^2 dt^3 / 24 m hbar); the
  // potential appears in fused half kicks.
  void run(std::vector<cplx>& a, int n_steps, double dt) const {
    const double hb = params.hbar;
    const double f = hb * k_source / params.horizon;
    int n = grid.n;
    std::vector<cplx> half(n), full(n), drift(n);
    for (int j = 0; j < n; ++j) {
      half[j] = std::exp(cplx(0.0, -0.5 * dt * v_eff[j] / hb));
      full[j] = half[j] * half[j];
      drift[j] = std::exp(cplx(0.0, -dt * kin[j]));
    }
    cplx scalar = std::exp(
        cplx(0.0, -f * f * dt * dt * dt / (24.0 * params.mass * hb)));
    // total scalar applied once at the end
    cplx total_scalar = std::pow(scalar, n_steps);

    for (int j = 0; j < n; ++j) a[j] *= half[j];
    for (int s = 0; s < n_steps; ++s) {
      fft_forward(a);
      for (int j = 0; j < n; ++j) a[j] *= drift[j];
      fft_backward(a);
      if (s + 1 < n_steps)
        for (int j = 0; j < n; ++j) a[j] *= full[j];
    }
    for (int j = 0; j < n; ++j) a[j] *= half[j] * total_scalar;
  }
};

void check_wraparound(const GridState& s, double tol = 1e-12) {
  int guard = std::max(4, s.n() / 256);
  double mass = 0.0;
  for (int j = 0; j < guard; ++j)
    mass += std::norm(s.amp[j]) + std::norm(s.amp[s.n() - 1 - j]);
  mass *= s.dx();
  if (mass > tol) {
    std::ostringstream os;
    os << "evolve_effective: wrap-around detected, boundary norm " << mass
       << " on grid [" << s.grid.x_min << ", " << s.grid.x_max
       << "); enlarge the evolution grid";
    throw std::runtime_error(os.str());
  }
}

GridState evolve_on_plan_grid(const SystemParams& params,
                              const PotentialSpec& pot, double k,
                              const GridState& psi0, const GridSpec& grid,
                              int n_slices, bool richardson,
                              double boundary_tol = 1e-12) {
  Stepper st(params, pot, grid, k);
  double dt = params.horizon / n_slices;
  GridState fine = psi0;
  double n0 = fine.norm2();
  st.run(fine.amp, n_slices, dt);
  double drift = std::fabs(fine.norm2() - n0);
  if (drift > 1e-10 * std::max(1.0, n0))
    throw std::runtime_error("evolve_effective: unitarity drift " +
                             std::to_string(drift));
  if (richardson && n_slices >= 2) {
    GridState coarse = psi0;
    st.run(coarse.amp, n_slices / 2, 2.0 * dt);
    for (int j = 0; j < fine.n(); ++j)
      fine.amp[j] = (4.0 * fine.amp[j] - coarse.amp[j]) / 3.0;
  }
  check_wraparound(fine, boundary_tol);
  return fine;
}

double auto_k_max(const SystemParams& params, const PotentialSpec& pot,
                  const GridState& psi, const GridSpec& window,
                  const GridSpec& evo_grid) {
  // displacement per unit k of the packet under the source term
  double lam2 = params.hbar * params.horizon / (2.0 * params.mass);
  double disp_coeff = lam2;
  if (pot.kind == PotentialSpec::Kind::Harmonic) {
    double u = params.omega_T();
    disp_coeff = lam2 * 2.0 * (1.0 - std::cos(u)) / (u * u);
  }
  // spatial spread and center of |psi|^2
  double m0 = 0, m1 = 0, m2 = 0;
  for (int j = 0; j < psi.n(); ++j) {
    double w = std::norm(psi.amp[j]);
    m0 += w;
    m1 += w * psi.x(j);
    m2 += w * psi.x(j) * psi.x(j);
  }
  double xc = m1 / m0;
  double width = std::sqrt(std::max(m2 / m0 - xc * xc, 1e-30));
  double reach = std::max(std::fabs(window.x_min - xc),
                          std::fabs(window.x_max - xc)) +
                 9.0 * width;
  double k_need = reach / disp_coeff;
  // stay inside the evolution grid momentum band
  double k_psi = std::fabs(params.omega) > 0
                     ? 6.0 / width + std::fabs(xc) * params.mass *
                           params.omega / params.hbar
                     : 6.0 / width;
  double band_cap = M_PI / evo_grid.dx() - k_psi - 4.0 / width;
  return std::min(k_need, band_cap);
}

struct Panel {
  double lo, hi;
  std::vector<std::vector<cplx>> r15;  // per cell, on the window grid
  std::vector<std::vector<cplx>> r7;
  std::vector<double> err;             // per cell L2 of (r15 - r7)
  double err_max = 0.0;
};

cplx fourier_weight(double k, const Interval& delta) {
  if (std::fabs(k * delta.width) < 1e-8) {
    // sin(k delta/2)/k -> delta/2, with the next series term
    double s = 0.5 * delta.width *
               (1.0 - k * k * delta.width * delta.width / 24.0);
    return s / M_PI * std::exp(cplx(0.0, -k * delta.center));
  }
  return std::sin(0.5 * k * delta.width) / k / M_PI *
         std::exp(cplx(0.0, -k * delta.center));
}

}  // namespace

PotentialSpec PotentialSpec::harmonic(double om) {
  PotentialSpec p;
  p.kind = Kind::Harmonic;
  p.omega = om;
  return p;
}

PotentialSpec PotentialSpec::quartic(double g) {
  PotentialSpec p;
  p.kind = Kind::Quartic;
  p.quartic_g = g;
  return p;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> v) {
  PotentialSpec p;
  p.kind = Kind::Tabulated;
  p.samples = std::move(v);
  return p;
}

double PotentialSpec::value(double x, double mass) const {
  switch (kind) {
    case Kind::Free:
      return 0.0;
    case Kind::Harmonic:
      return 0.5 * mass * omega * omega * x * x;
    case Kind::Quartic:
      return quartic_g * x * x * x * x;
    case Kind::Tabulated:
      throw std::logic_error("tabulated potential is grid-addressed");
  }
  return 0.0;
}

GridState evolve_effective(const SystemParams& params,
                           const PotentialSpec& potential, double k,
                           const GridState& psi, const EvolutionPlan& plan) {
  if (potential.kind == PotentialSpec::Kind::Tabulated &&
      static_cast<int>(potential.samples.size()) != plan.grid.n)
    throw std::invalid_argument("tabulated potential length != grid size");
  GridState work =
      (psi.grid == plan.grid) ? psi : embed(psi, plan.grid);
  GridState out = evolve_on_plan_grid(params, potential, k, work, plan.grid,
                                      plan.n_slices, plan.richardson);
  return (psi.grid == plan.grid) ? out : restrict_to(out, psi.grid);
}

double evolution_convergence_defect(const SystemParams& params,
                                    const PotentialSpec& potential, double k,
                                    const GridState& psi,
                                    const EvolutionPlan& plan) {
  EvolutionPlan doubled = plan;
  doubled.n_slices = plan.n_slices * 2;
  GridState a = evolve_effective(params, potential, k, psi, plan);
  GridState b = evolve_effective(params, potential, k, psi, doubled);
  return l2_distance(a, b);
}

std::vector<GridState> class_operator_apply_many(
    const SystemParams& params, const PotentialSpec& potential,
    const std::vector<Interval>& cells, const GridState& psi,
    const EvolutionPlan& plan, const KQuadSpec& kq, KQuadDiagnostics* diag) {
  if (cells.empty()) throw std::invalid_argument("no cells");
  const GridSpec window = psi.grid;
  GridState embedded = (psi.grid == plan.grid) ? psi : embed(psi, plan.grid);

  double k_max = kq.k_max > 0.0
                     ? kq.k_max
                     : auto_k_max(params, potential, psi, window, plan.grid);
  if (!(k_max > 0.0))
    throw std::invalid_argument("class_operator_apply: empty k range");

  // parity shortcut: V even, symmetric grid, psi even about 0
  bool parity = potential.even_symmetric() &&
                std::fabs(plan.grid.x_min + plan.grid.x_max) < 1e-12 &&
                std::fabs(window.x_min + window.x_max) < 1e-12;
  if (parity) {
    for (int j = 1; j < embedded.n() && parity; ++j)
      if (std::abs(embedded.amp[j] - embedded.amp[embedded.n() - j]) > 1e-12)
        parity = false;
  }

  const int nw = window.n;
  const size_t ncells = cells.size();
  int evolutions = 0;

  // returns the restricted state and, under parity, the restriction of its
  // mirror image (mirrored on the evolution grid, where -x stays in range)
  auto evolve_node = [&](double k) -> std::pair<std::vector<cplx>,
                                                std::vector<cplx>> {
    int slices = std::max(
        32, next_pow2(static_cast<int>(std::ceil(
                kq.slices_at_kmax * std::fabs(k) / k_max))));
    bool exact = potential.kind == PotentialSpec::Kind::Free;
    GridState ev = evolve_on_plan_grid(params, potential, k, embedded,
                                       plan.grid, exact ? 1 : slices,
                                       exact ? false : plan.richardson);
    ++evolutions;
    std::pair<std::vector<cplx>, std::vector<cplx>> out;
    out.first = restrict_to(ev, window).amp;
    if (parity) {
      GridState mir(plan.grid);
      int ne = plan.grid.n;
      for (int i = 0; i < ne; ++i) mir.amp[i] = ev.amp[(ne - i) % ne];
      out.second = restrict_to(mir, window).amp;
    }
    return out;
  };

  auto eval_panel = [&](Panel& p) {
    double c = 0.5 * (p.lo + p.hi), h = 0.5 * (p.hi - p.lo);
    p.r15.assign(ncells, std::vector<cplx>(nw, 0.0));
    p.r7.assign(ncells, std::vector<cplx>(nw, 0.0));
    p.err.assign(ncells, 0.0);
    // evaluate all 15 nodes once, accumulate both rules
    for (int i = 0; i < 8; ++i) {
      for (int sign = (i == 7 ? 0 : -1); sign <= 1; sign += 2) {
        if (i == 7 && sign != 0) continue;
        if (i != 7 && sign == 0) continue;
        double k = c + sign * h * kXgk[i];
        auto [phi, phi_mirror] = evolve_node(k);
        double wk = h * kWgk[i];
        bool is_gauss = (i % 2 == 1) || i == 7;
        double wg = is_gauss ? h * kWg[i == 7 ? 3 : (i - 1) / 2] : 0.0;
        for (size_t ci = 0; ci < ncells; ++ci) {
          cplx w = fourier_weight(k, cells[ci]);
          for (int j = 0; j < nw; ++j) {
            cplx contrib = w * phi[j];
            if (parity)
              contrib += std::conj(w) * phi_mirror[j];
            p.r15[ci][j] += wk * contrib;
            if (is_gauss) p.r7[ci][j] += wg * contrib;
          }
        }
      }
    }
    p.err_max = 0.0;
    double dxw = window.dx();
    for (size_t ci = 0; ci < ncells; ++ci) {
      double e2 = 0.0;
      for (int j = 0; j < nw; ++j) e2 += std::norm(p.r15[ci][j] - p.r7[ci][j]);
      p.err[ci] = std::sqrt(e2 * dxw);
      p.err_max = std::max(p.err_max, p.err[ci]);
    }
  };

  // initial panels over [lo_range, k_max]
  double lo_range = parity ? 0.0 : -k_max;
  std::vector<Panel> panels;
  int n0 = std::max(8, kq.initial_panels);
  double w0 = (k_max - lo_range) / n0;
  for (int i = 0; i < n0; ++i) {
    Panel p;
    p.lo = lo_range + i * w0;
    p.hi = (i + 1 == n0) ? k_max : lo_range + (i + 1) * w0;
    eval_panel(p);
    panels.push_back(std::move(p));
  }

  auto totals_and_errors = [&](std::vector<double>& norms,
                               std::vector<double>& errs) {
    norms.assign(ncells, 0.0);
    errs.assign(ncells, 0.0);
    std::vector<std::vector<cplx>> tot(ncells,
                                       std::vector<cplx>(nw, 0.0));
    for (const Panel& p : panels)
      for (size_t ci = 0; ci < ncells; ++ci) {
        errs[ci] += p.err[ci];
        for (int j = 0; j < nw; ++j) tot[ci][j] += p.r15[ci][j];
      }
    for (size_t ci = 0; ci < ncells; ++ci) {
      double s = 0.0;
      for (int j = 0; j < nw; ++j) s += std::norm(tot[ci][j]);
      norms[ci] = std::sqrt(s * window.dx());
    }
  };

  std::vector<double> norms, errs;
  totals_and_errors(norms, errs);
  auto worst_over_cells = [&]() {
    double norm_max = 0.0;
    for (double n : norms) norm_max = std::max(norm_max, n);
    double worst = 0.0;
    for (size_t ci = 0; ci < ncells; ++ci)
      worst = std::max(
          worst, errs[ci] / std::max(norms[ci], 0.02 * norm_max + 1e-300));
    return worst;
  };
  while (true) {
    double worst_ratio = worst_over_cells();
    if (worst_ratio <= kq.rel_tol) break;
    if (static_cast<int>(panels.size()) >= kq.max_panels) {
      std::ostringstream os;
      os << "class_operator_apply: k-quadrature unconverged: relative error "
         << worst_ratio << " > " << kq.rel_tol << " with " << panels.size()
         << " panels, k_max=" << k_max << ", evolutions=" << evolutions;
      throw std::runtime_error(os.str());
    }
    // split the worst panel (deterministic tie-break toward lower k)
    size_t worst = 0;
    double we = -1.0;
    for (size_t i = 0; i < panels.size(); ++i)
      if (panels[i].err_max > we + 1e-300 ||
          (panels[i].err_max == we && panels[i].lo < panels[worst].lo)) {
        we = panels[i].err_max;
        worst = i;
      }
    Panel left, right;
    left.lo = panels[worst].lo;
    left.hi = 0.5 * (panels[worst].lo + panels[worst].hi);
    right.lo = left.hi;
    right.hi = panels[worst].hi;
    eval_panel(left);
    eval_panel(right);
    panels[worst] = std::move(left);
    panels.push_back(std::move(right));
    totals_and_errors(norms, errs);
  }

  // deterministic final summation in k order
  std::sort(panels.begin(), panels.end(),
            [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  std::vector<GridState> out(ncells, GridState(window));
  for (const Panel& p : panels)
    for (size_t ci = 0; ci < ncells; ++ci)
      for (int j = 0; j < nw; ++j) out[ci].amp[j] += p.r15[ci][j];

  if (diag)
    *diag = KQuadDiagnostics{k_max, static_cast<int>(panels.size()),
                             evolutions, worst_over_cells(), parity};
  return out;
}

GridState class_operator_apply(const SystemParams& params,
                               const PotentialSpec& potential,
                               const Interval& delta, const GridState& psi,
                               const EvolutionPlan& plan, const KQuadSpec& kq,
                               KQuadDiagnostics* diag) {
  std::vector<GridState> r = class_operator_apply_many(
      params, potential, {delta}, psi, plan, kq, diag);
  return std::move(r.front());
}

XbarOperator build_xbar_operator(const SystemParams& params,
                                 const PotentialSpec& potential,
                                 const EvolutionPlan& plan) {
  const GridSpec& g = plan.grid;
  const int n = g.n;
  int n_base = std::max(16, next_pow2(plan.n_slices));

  auto build_at = [&](int N) -> Matrix {
    Stepper st(params, potential, g, 0.0);
    double dt = params.horizon / N;
    Matrix A(n);
    std::vector<cplx> phi(n), acc(n);
    std::vector<std::vector<cplx>> xi(N, std::vector<cplx>(n));
    for (int col = 0; col < n; ++col) {
      std::fill(phi.begin(), phi.end(), cplx(0.0, 0.0));
      phi[col] = 1.0;
      st.run(phi, 1, 0.5 * dt);  // to the first midpoint t = dt/2
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < n; ++j) xi[i][j] = g.x(j) * phi[j];
        if (i + 1 < N) st.run(phi, 1, dt);
      }
      acc = xi[N - 1];
      for (int i = N - 2; i >= 0; --i) {
        st.run(acc, 1, -dt);
        for (int j = 0; j < n; ++j) acc[j] += xi[i][j];
      }
      st.run(acc, 1, -0.5 * dt);
      double invN = 1.0 / N;
      for (int j = 0; j < n; ++j) A(j, col) = acc[j] * invN;
    }
    return A;
  };

  Matrix A;
  if (plan.richardson && n_base >= 16) {
    Matrix a1 = build_at(n_base);
    Matrix a2 = build_at(n_base / 2);
    Matrix a4 = build_at(n_base / 4);
    A = Matrix(n);
    for (size_t i = 0; i < A.a.size(); ++i)
      A.a[i] = (64.0 * a1.a[i] - 20.0 * a2.a[i] + a4.a[i]) / 45.0;
  } else {
    A = build_at(n_base);
  }

  XbarOperator xb{g, {}, {}, {}, hermiticity_defect(A)};
  double scale = std::max(std::fabs(g.x_min), std::fabs(g.x_max));
  if (xb.raw_hermiticity_defect > 1e-10 * std::max(1.0, scale))
    throw std::runtime_error(
        "build_xbar_operator: non-Hermitian beyond tolerance, defect = " +
        std::to_string(xb.raw_hermiticity_defect));
  // hermitize to remove roundoff before diagonalizing
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      cplx v = 0.5 * (A(i, j) + std::conj(A(j, i)));
      A(i, j) = v;
      A(j, i) = std::conj(v);
    }
  for (int j = 0; j < n; ++j) A(j, j) = cplx(A(j, j).real(), 0.0);

  EigenSystem es = hermitian_eig(A);
  xb.matrix = std::move(A);
  xb.eigenvalues = std::move(es.values);
  xb.eigenvectors = std::move(es.vectors);
  return xb;
}

GridState project_only(const XbarOperator& xbar, const Interval& delta,
                       const GridState& psi, ProjectionAudit* audit) {
  if (!(psi.grid == xbar.grid))
    throw std::invalid_argument("project_only: state grid != operator grid");
  const int n = xbar.grid.n;
  GridState out(psi.grid);
  for (int j = 0; j < n; ++j) {
    double ev = xbar.eigenvalues[j];
    if (audit && (std::fabs(ev - delta.a()) < 1e-12 ||
                  std::fabs(ev - delta.b()) < 1e-12))
      audit->edge_eigenvalues.push_back(ev);
    if (!delta.contains(ev)) continue;
    const cplx* v = &xbar.eigenvectors(0, j);
    cplx c = 0.0;
    for (int i = 0; i < n; ++i) c += std::conj(v[i]) * psi.amp[i];
    for (int i = 0; i < n; ++i) out.amp[i] += v[i] * c;
  }
  return out;
}

GridState projection_apply(const XbarOperator& xbar, const Interval& delta,
                           const SystemParams& params,
                           const PotentialSpec& potential,
                           const GridState& psi, const EvolutionPlan& plan,
                           ProjectionAudit* audit) {
  GridState embedded = (psi.grid == xbar.grid) ? psi : embed(psi, xbar.grid);
  GridState projected = project_only(xbar, delta, embedded, audit);
  // the projected state can carry slowly decaying tails out to the edge of
  // the operator grid, and the truncation seam radiates across the full
  // momentum band; evolve on a 4x grid so nothing wraps
  double span = xbar.grid.x_max - xbar.grid.x_min;
  GridSpec wide(xbar.grid.x_min - 1.5 * span, xbar.grid.x_max + 1.5 * span,
                4 * xbar.grid.n);
  GridState padded = embed(projected, wide);
  bool exact = potential.kind == PotentialSpec::Kind::Free;
  if (potential.kind == PotentialSpec::Kind::Tabulated)
    throw std::invalid_argument(
        "projection_apply: tabulated potentials need matching grids");
  // the truncation seam radiates a small quantified mass toward the far
  // boundary; the restricted window never touches it
  GridState evolved = evolve_on_plan_grid(params, potential, 0.0, padded,
                                          wide, exact ? 1 : plan.n_slices,
                                          exact ? false : plan.richardson,
                                          1e-7);
  return restrict_to(evolved, psi.grid);
}

}  // namespace sta::oracle
