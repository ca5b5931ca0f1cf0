#include "sta/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sta/analytic.hpp"
#include "sta/specfun.hpp"

namespace sta::decoherence {

namespace {

using analytic::ApplyResult;
using analytic::KernelKind;

// tail cells as finite intervals wide enough that everything beyond is
// below double underflow for Gaussian amplitudes
std::vector<Interval> cells_with_tails(const Partition& partition,
                                       const GaussianState& psi,
                                       const SystemParams& params) {
  double drift =
      std::fabs(psi.momentum) * params.horizon / params.mass;
  double extent = 80.0 * psi.width + drift + 10.0 * params.lambda() +
                  (partition.x_max - partition.x_min);
  std::vector<Interval> cells;
  cells.emplace_back(partition.x_min - 0.5 * extent, extent);
  for (const Interval& c : partition.cells) cells.push_back(c);
  cells.emplace_back(partition.x_max + 0.5 * extent, extent);
  return cells;
}

void check_tail_mass(const Partition& partition, const GaussianState& psi,
                     const SystemParams& params) {
  // |psi|^2 ~ exp(-2(x-x0)^2/d^2): mass beyond a distance s of the center
  // is erfc(sqrt(2) s / d) / 2
  auto tail = [&](double edge) {
    return 0.5 * std::erfc(std::sqrt(2.0) * std::fabs(edge - psi.center) /
                           psi.width);
  };
  double mass = 0.0;
  if (psi.center > partition.x_min) mass += tail(partition.x_min);
  if (psi.center < partition.x_max) mass += tail(partition.x_max);
  if (mass > 1e-8) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", mass);
    throw std::invalid_argument(
        std::string("decoherence_matrix: partition leaves tail probability ") +
        buf + " > 1e-8; extend [x_min, x_max)");
  }
}

Matrix gram(const std::vector<GridState>& states) {
  int m = static_cast<int>(states.size());
  Matrix D(m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      cplx v = inner_product(states[a], states[b]);
      D(a, b) = v;
      D(b, a) = std::conj(v);
    }
  return D;
}

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double DecoherenceMatrix::eps_max() const {
  double worst = 0.0;
  int m = entries.n;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      double da = entries(a, a).real(), db = entries(b, b).real();
      if (da <= 0.0 || db <= 0.0) continue;
      worst = std::max(worst, std::abs(entries(a, b)) / std::sqrt(da * db));
    }
  return worst;
}

std::vector<double> DecoherenceMatrix::probabilities() const {
  std::vector<double> p(entries.n);
  for (int a = 0; a < entries.n; ++a) p[a] = entries(a, a).real();
  return p;
}

double DecoherenceMatrix::sum_defect() const {
  double s = 0.0;
  for (double p : probabilities()) s += p;
  return std::fabs(s - 1.0);
}

DecoherenceMatrix decoherence_matrix(Representation rep,
                                     const SystemParams& params,
                                     const Partition& partition,
                                     const GaussianState& psi,
                                     const GridSpec& grid) {
  check_tail_mass(partition, psi, params);
  std::vector<Interval> cells = cells_with_tails(partition, psi, params);

  DecoherenceMatrix out;
  out.partition = partition;
  out.rep = rep;

  if (rep == Representation::Projection) {
    // P_Delta = U(T/2)^dag e_{Delta/c} U(T/2): the Gram matrix of the
    // projected states is diagonal with cell masses of the half-evolved
    // packet, and off-diagonals vanish identically. Masses by composite
    // Gauss-Legendre over the scaled cells with the analytic density.
    SystemParams half(params.mass, params.hbar, params.omega,
                      0.5 * params.horizon);
    double u = params.omega_T();
    double c_mid =
        params.free_particle() ? 1.0 : std::sin(0.5 * u) / (0.5 * u);
    static const double gl_x[4] = {0.3399810435848563, 0.8611363115940526,
                                   0.0, 0.0};
    static const double gl_w[4] = {0.6521451548625461, 0.3478548451374538,
                                   0.0, 0.0};
    auto cell_mass = [&](double lo, double hi) {
      // clip to the region where the density is above underflow
      double reach = psi.center + std::fabs(psi.momentum) * params.horizon /
                                      params.mass;
      double support = 14.0 * psi.width;
      lo = std::max(lo, psi.center - support - std::fabs(reach));
      hi = std::min(hi, psi.center + support + std::fabs(reach));
      if (!(lo < hi)) return 0.0;
      int pieces = 64 + static_cast<int>((hi - lo) / (0.05 * psi.width));
      pieces = std::min(pieces, 4096);
      double dx = (hi - lo) / pieces, mass = 0.0;
      for (int i = 0; i < pieces; ++i) {
        double c = lo + (i + 0.5) * dx, h = 0.5 * dx;
        for (int q = 0; q < 2; ++q)
          for (int s = -1; s <= 1; s += 2) {
            double y = c + s * h * gl_x[q];
            mass += h * gl_w[q] *
                    std::norm(analytic::evolved_gaussian_amplitude(half, psi,
                                                                   y));
          }
      }
      return mass;
    };
    int m = static_cast<int>(cells.size());
    out.entries = Matrix(m);
    for (int a = 0; a < m; ++a)
      out.entries(a, a) =
          cell_mass(cells[a].a() / c_mid, cells[a].b() / c_mid);
    return out;
  }

  std::vector<GridState> states;
  states.reserve(cells.size());
  for (const Interval& c : cells)
    states.push_back(
        analytic::apply_kernel_to_gaussian(KernelKind::ClassOp, params, c,
                                           psi, grid)
            .out);
  out.entries = gram(states);
  return out;
}

DecoherenceMatrix decoherence_matrix_oracle(
    Representation rep, const SystemParams& params, const Partition& partition,
    const GridState& psi, const oracle::PotentialSpec& potential,
    const oracle::EvolutionPlan& plan, const oracle::KQuadSpec& kq) {
  // tails sized from the grid: reachable time-average values are bounded
  // by the grid span, so moderate tail cells capture all real mass without
  // making the Fourier weights wildly oscillatory in k
  double half = 0.65 * (psi.grid.x_max - psi.grid.x_min);
  std::vector<Interval> cells;
  cells.push_back(Interval::from_bounds(-half, partition.x_min));
  for (const Interval& c : partition.cells) cells.push_back(c);
  cells.push_back(Interval::from_bounds(partition.x_max, half));

  DecoherenceMatrix out;
  out.partition = partition;
  out.rep = rep;

  if (rep == Representation::Projection) {
    oracle::XbarOperator xb =
        oracle::build_xbar_operator(params, potential, plan);
    std::vector<GridState> states;
    GridState embedded =
        (psi.grid == xb.grid) ? psi : embed(psi, xb.grid);
    for (const Interval& c : cells)
      states.push_back(oracle::project_only(xb, c, embedded));
    out.entries = gram(states);  // norms preserved by the final evolution
    return out;
  }

  std::vector<GridState> states = oracle::class_operator_apply_many(
      params, potential, cells, psi, plan, kq);
  out.entries = gram(states);
  return out;
}

cplx freepart_decoherence_kernel(const SystemParams& params,
                                 const Interval& delta1,
                                 const Interval& delta2, double x,
                                 double xprime, double abs_tol) {
  if (!params.free_particle())
    throw std::invalid_argument(
        "freepart_decoherence_kernel: free particle only");
  double hb = params.hbar, m = params.mass, T = params.horizon;
  double lam = params.lambda();
  double ell = lam / std::sqrt(3.0);
  double freq = m * (x - xprime) / (hb * T);
  cplx pref = m / (2.0 * M_PI * hb * T) *
              std::exp(cplx(0.0, 0.5 * m * (xprime * xprime - x * x) /
                                     (hb * T)));

  auto integrand = [&](double y) -> cplx {
    cplx e1 = specfun::e_delta_smeared(0.5 * (y + x), ell, delta1);
    cplx e2 = specfun::e_delta_smeared(0.5 * (y + xprime), ell, delta2);
    return std::exp(cplx(0.0, freq * y)) * std::conj(e1) * e2;
  };

  // The E tails fall like ell/(sqrt(pi) z) with a Fresnel chirp, so the
  // |...|^2-type remainder has a 1/Y envelope; pick Y so the residual after
  // the analytic tail correction (next order, ~ ell^4/Y^3) is within tol.
  double span = std::max(std::fabs(delta1.center) + delta1.width,
                         std::fabs(delta2.center) + delta2.width) +
                std::fabs(x) + std::fabs(xprime);
  double scale = m / (2.0 * M_PI * hb * T);
  double tol_inner = std::max(abs_tol / std::max(std::abs(pref), 1e-300),
                              1e-14);
  double Y = 2.0 * span + 30.0 * ell +
             std::cbrt(ell * ell * ell * ell / tol_inner);

  constexpr double xgk[8] = {0.9914553711208126, 0.9491079123427585,
                             0.8648644233597691, 0.7415311855993944,
                             0.5860872354676911, 0.4058451513773972,
                             0.2077849550078985, 0.0};
  constexpr double wgk[8] = {0.0229353220105292, 0.0630920926299786,
                             0.1047900103222502, 0.1406532597155259,
                             0.1690047266392679, 0.1903505780647854,
                             0.2044329400752989, 0.2094821410847278};
  constexpr double wg[4] = {0.1294849661688697, 0.2797053914892767,
                            0.3818300505051189, 0.4179591836734694};
  struct Seg {
    double lo, hi, err;
    cplx val;
  };
  auto eval = [&](double lo, double hi) -> Seg {
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    cplx r15 = 0.0, r7 = 0.0;
    for (int i = 0; i < 8; ++i) {
      if (i == 7) {
        cplx f = integrand(c);
        r15 += h * wgk[7] * f;
        r7 += h * wg[3] * f;
        continue;
      }
      cplx fp = integrand(c + h * xgk[i]);
      cplx fm = integrand(c - h * xgk[i]);
      r15 += h * wgk[i] * (fp + fm);
      if (i % 2 == 1) r7 += h * wg[(i - 1) / 2] * (fp + fm);
    }
    return {lo, hi, std::abs(r15 - r7), r15};
  };

  // seed segments with a bounded oscillation count each: the local phase
  // rate is |freq| plus the Fresnel chirps (z - edge)/ell^2 with z = y/2
  auto rate = [&](double y) {
    return std::fabs(freq) +
           (0.5 * std::fabs(y) + span) / (ell * ell);
  };
  std::vector<Seg> segs;
  double y_cur = -Y;
  while (y_cur < Y) {
    double w = std::max(6.0 / rate(y_cur), 1e-4 * Y);
    double y_next = std::min(y_cur + w, Y);
    segs.push_back(eval(y_cur, y_next));
    y_cur = y_next;
  }
  for (int iter = 0; iter < 20000; ++iter) {
    double total_err = 0.0;
    size_t worst = 0;
    for (size_t i = 0; i < segs.size(); ++i) {
      total_err += segs[i].err;
      if (segs[i].err > segs[worst].err) worst = i;
    }
    if (total_err <= tol_inner) break;
    if (iter == 19999)
      throw std::runtime_error(
          "freepart_decoherence_kernel: unconverged oscillatory quadrature "
          "(hbar=" + std::to_string(hb) +
          ", |x-x'|=" + std::to_string(std::fabs(x - xprime)) + ")");
    Seg s = segs[worst];
    segs[worst] = eval(s.lo, 0.5 * (s.lo + s.hi));
    segs.push_back(eval(0.5 * (s.lo + s.hi), s.hi));
  }
  std::sort(segs.begin(), segs.end(),
            [](const Seg& a, const Seg& b) { return a.lo < b.lo; });
  cplx sum = 0.0;
  for (const Seg& s : segs) sum += s.val;

  // analytic correction for the non-oscillatory part of the truncated
  // tails (only present for x = x' and equal ranges, where conj(E) E'
  // has |tail|^2 pieces ~ (ell^2/4pi) / (z - edge)^2 )
  if (x == xprime && delta1.a() == delta2.a() && delta1.b() == delta2.b()) {
    double zp = 0.5 * (Y + x), zm = 0.5 * (-Y + x);
    double corr = 0.0;
    for (double edge : {delta1.a(), delta1.b()}) {
      corr += 1.0 / (zp - edge);
      corr += 1.0 / (edge - zm);
    }
    // dy = 2 dz when substituting z = (y + x)/2
    sum += ell * ell / (4.0 * M_PI) * corr * 2.0;
  }
  (void)scale;
  return pref * sum;
}

SweepResult hbar_sweep(const SystemParams& base, const Partition& partition,
                       const GaussianState& psi, const GridSpec& grid,
                       const std::vector<double>& hbars) {
  for (size_t i = 1; i < hbars.size(); ++i)
    if (!(hbars[i] > 0.0) || hbars[i] >= hbars[i - 1])
      throw std::invalid_argument("hbar_sweep: list must be positive "
                                  "decreasing");
  SweepResult res;
  std::vector<double> eps;
  for (double hb : hbars) {
    SystemParams p(base.mass, hb, base.omega, base.horizon);
    DecoherenceMatrix dc = decoherence_matrix(Representation::ClassOperator,
                                              p, partition, psi, grid);
    DecoherenceMatrix dp = decoherence_matrix(Representation::Projection, p,
                                              partition, psi, grid);
    res.class_rows.push_back(
        {hb, dc.eps_max(), dc.probabilities(), dc.sum_defect()});
    res.projection_rows.push_back(
        {hb, dp.eps_max(), dp.probabilities(), dp.sum_defect()});
    eps.push_back(dc.eps_max());
  }
  res.class_decay_exponent = fit_loglog_slope(hbars, eps);
  return res;
}

}  // namespace sta::decoherence
