#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "oracle_utils.hpp"
#include "sta/analytic.hpp"
#include "sta/fft.hpp"
#include "sta/oracle.hpp"

using namespace sta;
using namespace sta::oracle;

namespace {

double mean_momentum(const GridState& s, double hbar) {
  std::vector<cplx> f = s.amp;
  fft_forward(f);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < s.n(); ++j) {
    double k = fft_wavenumber(j, s.n(), s.dx());
    num += std::norm(f[j]) * hbar * k;
    den += std::norm(f[j]);
  }
  return num / den;
}

EvolutionPlan default_plan(const GridSpec& state_grid, int slices,
                           bool rich = true) {
  double span = state_grid.x_max - state_grid.x_min;
  GridSpec evo(state_grid.x_min - 0.5 * span, state_grid.x_max + 0.5 * span,
               2 * state_grid.n);
  return EvolutionPlan{evo, slices, rich};
}

}  // namespace

TEST_CASE("free evolution at k=0 matches the closed form exactly") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GaussianState g(1.0, 0.3, 2.0);
  GridSpec grid(-14.0, 14.0, 1024);
  GridState psi = sample_gaussian(g, grid, p);
  EvolutionPlan plan = default_plan(grid, 1, false);
  GridState ev = evolve_effective(p, PotentialSpec::free_particle(), 0.0, psi,
                                  plan);
  GridState want = analytic::evolved_gaussian(p, g, grid);
  CHECK(l2_distance(ev, want) < 1e-12);
}

TEST_CASE("linear source: exact momentum impulse hbar k") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GaussianState g(1.0, 0.0, 0.0);
  GridSpec grid(-16.0, 16.0, 2048);
  GridState psi = sample_gaussian(g, grid, p);
  EvolutionPlan plan = default_plan(grid, 1, false);
  for (double k : {4.0, 16.0, 64.0}) {
    GridState ev =
        evolve_effective(p, PotentialSpec::free_particle(), k, psi, plan);
    CHECK(std::fabs(mean_momentum(ev, p.hbar) - k) < 1e-8);
    CHECK(std::fabs(ev.norm2() - 1.0) < 1e-10);
  }
}

TEST_CASE("free+linear stepper is slice-count independent (exact flow)") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GaussianState g(1.0, 0.0, 0.0);
  GridSpec grid(-16.0, 16.0, 2048);
  GridState psi = sample_gaussian(g, grid, p);
  EvolutionPlan one = default_plan(grid, 1, false);
  EvolutionPlan many = default_plan(grid, 64, false);
  GridState a = evolve_effective(p, PotentialSpec::free_particle(), 40.0, psi,
                                 one);
  GridState b = evolve_effective(p, PotentialSpec::free_particle(), 40.0, psi,
                                 many);
  CHECK(l2_distance(a, b) < 1e-11);
}

TEST_CASE("harmonic evolution reproduces the coherent-state trajectory") {
  double omega = 2.0;
  SystemParams p(1.0, 1.0, omega, 0.5);
  // coherent state: ground width d = sqrt(2 hbar / m omega) in this
  // parameterization (|psi|^2 variance hbar/2 m omega)
  double d = std::sqrt(2.0 * 1.0 / (1.0 * omega));
  GaussianState g(d, 1.5, 0.0);
  GridSpec grid(-16.0, 16.0, 2048);
  GridState psi = sample_gaussian(g, grid, p);
  EvolutionPlan plan = default_plan(grid, 256, true);
  GridState ev =
      evolve_effective(p, PotentialSpec::harmonic(omega), 0.0, psi, plan);
  GridState want(grid);
  for (int j = 0; j < grid.n; ++j)
    want.amp[j] =
        testoracle::coherent_state(1.0, 1.0, omega, 1.5, 0.5, grid.x(j));
  CHECK(l2_distance(ev, want) < 1e-8);
}

TEST_CASE("strang error is second order before extrapolation") {
  double omega = 2.0;
  SystemParams p(1.0, 1.0, omega, 0.5);
  double d = std::sqrt(2.0 / omega);
  GaussianState g(d, 1.5, 0.0);
  GridSpec grid(-16.0, 16.0, 1024);
  GridState psi = sample_gaussian(g, grid, p);
  GridState want(grid);
  for (int j = 0; j < grid.n; ++j)
    want.amp[j] =
        testoracle::coherent_state(1.0, 1.0, omega, 1.5, 0.5, grid.x(j));
  auto err_at = [&](int slices) {
    EvolutionPlan plan = default_plan(grid, slices, false);
    plan.grid = GridSpec(-32.0, 32.0, 2048);
    GridState ev =
        evolve_effective(p, PotentialSpec::harmonic(omega), 0.0, psi, plan);
    return l2_distance(ev, want);
  };
  double e1 = err_at(64), e2 = err_at(128);
  CHECK(e1 / e2 > 3.4);  // order >= 2
  CHECK(e1 / e2 < 4.6);
}

TEST_CASE("convergence defect helper reports doubling sensitivity") {
  SystemParams p(1.0, 1.0, 2.0, 0.5);
  GaussianState g(1.0, 0.5, 0.0);
  GridSpec grid(-14.0, 14.0, 1024);
  GridState psi = sample_gaussian(g, grid, p);
  EvolutionPlan plan = default_plan(grid, 256, true);
  double defect = evolution_convergence_defect(p, PotentialSpec::harmonic(2.0),
                                               0.0, psi, plan);
  CHECK(defect < 1e-8);
}

TEST_CASE("wrap-around at the grid edge is detected, not silently wrong") {
  SystemParams p(1.0, 1.0, 0.0, 0.5);
  GaussianState g(1.0, 0.0, 30.0);  // drifts 15 length units
  GridSpec grid(-16.0, 16.0, 2048);
  // the sampler itself already refuses this combination
  CHECK_THROWS_AS(sample_gaussian(g, grid, p), std::invalid_argument);
  // fill directly to show the evolution-time guard fires too
  GridState psi(grid);
  for (int j = 0; j < grid.n; ++j) psi.amp[j] = g.amplitude(grid.x(j), p.hbar);
  EvolutionPlan plan{grid, 1, false};  // no headroom
  CHECK_THROWS_AS(
      evolve_effective(p, PotentialSpec::free_particle(), 0.0, psi, plan),
      std::runtime_error);
}

TEST_CASE("class operator, free particle: matches the closed form") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GaussianState g(1.0, 0.0, 0.0);
  GridSpec grid(-12.0, 12.0, 2048);
  GridState psi = sample_gaussian(g, grid, p);
  EvolutionPlan plan = default_plan(grid, 1, false);
  KQuadSpec kq;
  kq.rel_tol = 1e-7;
  for (double width : {1.0, 10.0}) {
    Interval delta(0.0, width);
    KQuadDiagnostics diag;
    GridState got = class_operator_apply(p, PotentialSpec::free_particle(),
                                         delta, psi, plan, kq, &diag);
    GridState want = analytic::apply_kernel_to_gaussian(
                         analytic::KernelKind::ClassOp, p, delta, g, grid)
                         .out;
    double rel = l2_distance(got, want) / want.norm();
    printf("[free C oracle] delta=%g rel=%.3g panels=%d evolutions=%d "
           "k_max=%.1f parity=%d\n",
           width, rel, diag.panels, diag.evolutions, diag.k_max,
           (int)diag.used_parity);
    CHECK(rel < 1e-6);
  }
}

TEST_CASE("class operator with huge range returns the evolved state") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GaussianState g(1.0, 0.0, 0.0);
  GridSpec grid(-12.0, 12.0, 2048);
  GridState psi = sample_gaussian(g, grid, p);
  EvolutionPlan plan = default_plan(grid, 1, false);
  KQuadSpec kq;
  Interval wide(0.0, 60.0);  // far beyond packet support and drift
  GridState got = class_operator_apply(p, PotentialSpec::free_particle(),
                                       wide, psi, plan, kq);
  GridState want = analytic::evolved_gaussian(p, g, grid);
  CHECK(l2_distance(got, want) / want.norm() < 1e-6);
}

TEST_CASE("xbar operator, free particle: equals x + (T/2m) p in action") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GridSpec grid(-14.0, 14.0, 1024);
  EvolutionPlan plan{grid, 64, true};
  XbarOperator xb =
      build_xbar_operator(p, PotentialSpec::free_particle(), plan);
  CHECK(xb.raw_hermiticity_defect < 1e-10);
  // apply to a localized band-limited state and compare against
  // x psi + (T/2m)(-i hbar d/dx) psi via the spectral derivative
  GaussianState g(1.0, 0.4, 1.0);
  GridState psi = sample_gaussian(g, grid, p);
  // p psi via the spectral multiplier hbar k (momentum acts as
  // multiplication by hbar k on Fourier coefficients)
  std::vector<cplx> want(grid.n), dpsi = psi.amp;
  fft_forward(dpsi);
  for (int j = 0; j < grid.n; ++j)
    dpsi[j] *= p.hbar * fft_wavenumber(j, grid.n, grid.dx());
  fft_backward(dpsi);
  for (int j = 0; j < grid.n; ++j)
    want[j] = grid.x(j) * psi.amp[j] + 0.5 * p.horizon / p.mass * dpsi[j];
  double err = 0.0;
  for (int c = 0; c < grid.n; ++c) {
    cplx acc = 0.0;
    for (int r = 0; r < grid.n; ++r) acc += xb.matrix(c, r) * psi.amp[r];
    err += std::norm(acc - want[c]);
  }
  err = std::sqrt(err * grid.dx());
  printf("[xbar free] action error = %.3g\n", err);
  CHECK(err < 1e-8);
}

TEST_CASE("xbar operator, harmonic: known linear combination of X and P") {
  double omega = 8.0;
  SystemParams p(1.0, 1.0, omega, 0.125);
  GridSpec grid(-14.0, 14.0, 1024);
  EvolutionPlan plan{grid, 256, true};
  XbarOperator xb = build_xbar_operator(p, PotentialSpec::harmonic(omega),
                                        plan);
  double u = 1.0;
  double cx = std::sin(u) / u;
  double cp = (1.0 - std::cos(u)) / (u * u) * p.horizon / p.mass;
  GaussianState g(1.0, 0.4, 1.0);
  GridState psi = sample_gaussian(g, grid, p);
  std::vector<cplx> dpsi = psi.amp;
  fft_forward(dpsi);
  for (int j = 0; j < grid.n; ++j)
    dpsi[j] *= p.hbar * fft_wavenumber(j, grid.n, grid.dx());
  fft_backward(dpsi);
  double err = 0.0;
  for (int c = 0; c < grid.n; ++c) {
    cplx acc = 0.0;
    for (int r = 0; r < grid.n; ++r) acc += xb.matrix(c, r) * psi.amp[r];
    cplx want = cx * grid.x(c) * psi.amp[c] + cp * dpsi[c];
    err += std::norm(acc - want);
  }
  err = std::sqrt(err * grid.dx());
  printf("[xbar harmonic] action error = %.3g\n", err);
  CHECK(err < 1e-8);
}

TEST_CASE("projection machinery: orthogonality, completeness, audit") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GridSpec grid(-12.0, 12.0, 512);
  EvolutionPlan plan{grid, 32, true};
  XbarOperator xb =
      build_xbar_operator(p, PotentialSpec::free_particle(), plan);
  GaussianState g(1.0, 0.0, 0.0);
  GridState psi = sample_gaussian(g, grid, p);

  Interval d1(-2.0, 4.0), d2(4.0, 8.0);  // disjoint [ -4,0 ) and [0,8)
  GridState p1 = project_only(xb, d1, psi);
  GridState p2 = project_only(xb, d2, p1);
  CHECK(p2.norm() < 1e-10);  // P_D P_D' = 0 on the grid

  // idempotence and completeness
  GridState p11 = project_only(xb, d1, p1);
  CHECK(l2_distance(p11, p1) < 1e-10);
  Interval whole(0.0, 1e6);
  GridState pw = project_only(xb, whole, psi);
  CHECK(l2_distance(pw, psi) < 1e-10);

  // sum over a partition of the spectrum = identity
  double lo = xb.eigenvalues.front() - 1.0, hi = xb.eigenvalues.back() + 1.0;
  Partition part = make_partition(lo, hi, 5);
  GridState sum(grid);
  for (const Interval& c : part.cells) {
    GridState pc = project_only(xb, c, psi);
    for (int j = 0; j < grid.n; ++j) sum.amp[j] += pc.amp[j];
  }
  CHECK(l2_distance(sum, psi) < 1e-10);

  // edge-eigenvalue audit triggers when an edge hits an eigenvalue
  Interval edgy = Interval::from_bounds(xb.eigenvalues[100],
                                        xb.eigenvalues[200]);
  ProjectionAudit audit;
  (void)project_only(xb, edgy, psi, &audit);
  CHECK(audit.edge_eigenvalues.size() >= 2);
}

TEST_CASE("projection with whole-spectrum range equals plain evolution") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GridSpec grid(-12.0, 12.0, 1024);
  EvolutionPlan plan{grid, 64, true};
  XbarOperator xb =
      build_xbar_operator(p, PotentialSpec::free_particle(), plan);
  GaussianState g(1.0, 0.0, 0.0);
  GridState psi = sample_gaussian(g, grid, p);
  Interval whole(0.0, 1e6);
  GridState got = projection_apply(xb, whole, p, PotentialSpec::free_particle(),
                                   psi, plan);
  GridState want = analytic::evolved_gaussian(p, g, grid);
  CHECK(l2_distance(got, want) < 1e-10);
}

TEST_CASE("projection route vs closed form, free particle fig parameters") {
  SystemParams p(1.0, 1.0, 0.0, 0.125);
  GridSpec grid(-12.0, 12.0, 2048);
  EvolutionPlan plan{grid, 64, true};
  XbarOperator xb =
      build_xbar_operator(p, PotentialSpec::free_particle(), plan);
  GaussianState g(1.0, 0.0, 0.0);
  GridState psi = sample_gaussian(g, grid, p);
  for (double width : {1.0, 10.0}) {
    Interval delta(0.0, width);
    GridState got = projection_apply(xb, delta, p,
                                     PotentialSpec::free_particle(), psi,
                                     plan);
    GridState want = analytic::apply_kernel_to_gaussian(
                         analytic::KernelKind::Projection, p, delta, g, grid)
                         .out;
    double rel = l2_distance(got, want) / want.norm();
    printf("[free P oracle] delta=%g rel=%.3g\n", width, rel);
    if (width > 1.5) {
      // cut in the packet tail: every route agrees with the continuum
      CHECK(rel < 1e-6);
    } else {
      // a width-d cut slices the xbar spectrum where the state has O(1)
      // weight; the projected state carries ~0.4% of its mass in c/x
      // tails beyond any feasible grid, which the grid projection folds
      // back. The L2 shape floor is at the percent level; the projected
      // probability still matches the continuum closely.
      CHECK(rel < 0.05);
    }
    // independent probability oracle: p = integral over Delta of
    // |<xbar|psi>|^2 with <xbar|psi> by direct quadrature
    double p_ind = 0.0;
    int nb = 4000;
    double bw = width / nb;
    for (int ib = 0; ib < nb; ++ib) {
      double xb_val = delta.a() + (ib + 0.5) * bw;
      cplx amp = 0.0;
      for (int j = 0; j < grid.n; ++j)
        amp += std::conj(analytic::xbar_eigenfunction(p, xb_val, grid.x(j))) *
               psi.amp[j];
      amp *= grid.dx();
      p_ind += std::norm(amp) * bw;
    }
    double p_eig = project_only(xb, delta, psi).norm2();
    printf("[free P oracle] delta=%g p_eig=%.8f p_independent=%.8f\n",
           width, p_eig, p_ind);
    // at width d the spectral cut passes through O(1) state weight and
    // edge-level assignment granularity limits the probability agreement
    CHECK(std::fabs(p_eig - p_ind) < (width > 1.5 ? 1e-8 : 5e-3));
  }
}

TEST_CASE("quartic demo: probabilities bounded and self-consistent") {
  SystemParams p(1.0, 1.0, 0.0, 0.5);
  GaussianState g(1.0, 0.0, 0.0);
  GridSpec grid(-14.0, 14.0, 1024);
  GridState psi = sample_gaussian(g, grid, p);
  EvolutionPlan plan = default_plan(grid, 512, true);
  KQuadSpec kq;
  kq.rel_tol = 1e-5;
  kq.slices_at_kmax = 512;
  std::vector<Interval> cells;
  Partition part = make_partition(-3.0, 3.0, 3);
  for (const Interval& c : part.cells) cells.push_back(c);
  KQuadDiagnostics diag;
  std::vector<GridState> out = class_operator_apply_many(
      p, PotentialSpec::quartic(0.02), cells, psi, plan, kq, &diag);
  double sum = 0.0, cross = 0.0;
  for (const GridState& s : out) {
    double prob = s.norm2();
    CHECK(prob >= 0.0);
    // |E| overshoots 1 near its edges (Fresnel ringing), so single-cell
    // probabilities may exceed 1 by a small overshoot margin
    CHECK(prob <= 1.0 + 0.05);
    sum += prob;
  }
  for (size_t a = 0; a < out.size(); ++a)
    for (size_t b = a + 1; b < out.size(); ++b)
      cross += std::abs(inner_product(out[a], out[b]));
  printf("[quartic] sum=%.6f cross=%.6f (panels=%d, evol=%d)\n", sum, cross,
         diag.panels, diag.evolutions);
  // self-consistency: the excess over 1 is bounded by the interference
  CHECK(sum <= 1.0 + 2.0 * cross + 1e-6);
  CHECK(sum > 0.5);  // the partition covers most of the packet
}
