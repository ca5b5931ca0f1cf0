#include "sta/core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sta {

SystemParams::SystemParams(double m, double hb, double om, double T)
    : mass(m), hbar(hb), omega(om), horizon(T) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::invalid_argument("SystemParams: mass must be positive");
  if (!(hb > 0.0) || !std::isfinite(hb))
    throw std::invalid_argument("SystemParams: hbar must be positive");
  if (!(T > 0.0) || !std::isfinite(T))
    throw std::invalid_argument("SystemParams: horizon must be positive");
  if (!(om >= 0.0) || !std::isfinite(om))
    throw std::invalid_argument("SystemParams: omega must be >= 0");
  if (om > 0.0) {
    double u = om * T;
    double frac = std::fabs(u / M_PI - std::round(u / M_PI));
    if (frac < 1e-12)
      throw std::invalid_argument(
          "SystemParams: omega*T at a propagator caustic (multiple of pi)");
  }
}

double SystemParams::lambda() const {
  return std::sqrt(hbar * horizon / (2.0 * mass));
}

Interval::Interval(double x_c, double delta) : center(x_c), width(delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("Interval: width must be positive");
  if (!std::isfinite(x_c) || !std::isfinite(delta))
    throw std::invalid_argument("Interval: non-finite bounds");
  a_ = x_c - 0.5 * delta;
  b_ = x_c + 0.5 * delta;
}

Interval Interval::from_bounds(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("Interval: need finite a < b");
  Interval iv(0.5 * (a + b), b - a);
  iv.a_ = a;
  iv.b_ = b;
  return iv;
}

int Partition::locate(double x) const {
  if (x < x_min) return 0;
  if (x >= x_max) return static_cast<int>(cells.size()) + 1;
  // cells are equal width and contiguous
  double w = cells.front().width;
  int idx = static_cast<int>((x - x_min) / w);
  if (idx >= static_cast<int>(cells.size()))
    idx = static_cast<int>(cells.size()) - 1;
  // guard against rounding at the shared edges
  if (!cells[idx].contains(x)) {
    if (idx > 0 && cells[idx - 1].contains(x)) --idx;
    else if (idx + 1 < static_cast<int>(cells.size()) &&
             cells[idx + 1].contains(x)) ++idx;
  }
  return idx + 1;
}

Partition make_partition(double x_min, double x_max, int n_cells) {
  if (n_cells < 1) throw std::invalid_argument("make_partition: n_cells >= 1");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
    throw std::invalid_argument("make_partition: need finite x_min < x_max");
  Partition p;
  p.x_min = x_min;
  p.x_max = x_max;
  double w = (x_max - x_min) / n_cells;
  p.cells.reserve(n_cells);
  for (int i = 0; i < n_cells; ++i) {
    // construct so that b_i == a_{i+1} exactly
    double a = x_min + i * w;
    double b = (i + 1 == n_cells) ? x_max : x_min + (i + 1) * w;
    p.cells.push_back(Interval::from_bounds(a, b));
  }
  return p;
}

GaussianState::GaussianState(double d, double x0, double p0)
    : width(d), center(x0), momentum(p0) {
  if (!(d > 0.0)) throw std::invalid_argument("GaussianState: width > 0");
}

cplx GaussianState::amplitude(double x, double hbar) const {
  double u = (x - center) / width;
  double norm = std::pow(2.0 / (M_PI * width * width), 0.25);
  return norm * std::exp(cplx(-u * u, momentum * x / hbar));
}

double GaussianState::t_spread(const SystemParams& params) const {
  return width * width * params.mass / (2.0 * params.hbar);
}

GridSpec::GridSpec(double lo, double hi, int npts)
    : x_min(lo), x_max(hi), n(npts) {
  if (!(lo < hi)) throw std::invalid_argument("GridSpec: x_min < x_max");
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("GridSpec: n must be a power of two");
}

GridState::GridState(const GridSpec& g) : grid(g), amp(g.n, cplx(0.0, 0.0)) {}

double GridState::norm2() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return s * dx();
}

double GridState::norm() const { return std::sqrt(norm2()); }

double l2_distance(const GridState& u, const GridState& v) {
  if (!(u.grid == v.grid))
    throw std::invalid_argument("l2_distance: grids differ");
  double s = 0.0;
  for (int j = 0; j < u.n(); ++j) s += std::norm(u.amp[j] - v.amp[j]);
  return std::sqrt(s * u.dx());
}

cplx inner_product(const GridState& u, const GridState& v) {
  if (!(u.grid == v.grid))
    throw std::invalid_argument("inner_product: grids differ");
  cplx s = 0.0;
  for (int j = 0; j < u.n(); ++j) s += std::conj(u.amp[j]) * v.amp[j];
  return s * u.dx();
}

bool grid_extent_ok(const GridSpec& grid, const GaussianState& state,
                    const SystemParams& params, std::string* why) {
  double drift = std::fabs(state.momentum) * params.horizon / params.mass;
  double support = 4.0 * state.width;
  double margin = 8.0 * state.width;
  double lo_need = state.center - support - margin - (drift > 0 ? 0 : drift);
  double hi_need = state.center + support + margin + (drift > 0 ? drift : 0);
  if (grid.x_min <= lo_need && grid.x_max >= hi_need) return true;
  if (why) {
    std::ostringstream os;
    os << "grid [" << grid.x_min << ", " << grid.x_max << ") too small; need ["
       << lo_need << ", " << hi_need << "] (support + drift + 8 widths)";
    *why = os.str();
  }
  return false;
}

GridState sample_gaussian(const GaussianState& state, const GridSpec& grid,
                          const SystemParams& params) {
  std::string why;
  if (!grid_extent_ok(grid, state, params, &why))
    throw std::invalid_argument("sample_gaussian: " + why);
  GridState out(grid);
  for (int j = 0; j < grid.n; ++j)
    out.amp[j] = state.amplitude(grid.x(j), params.hbar);
  double n2 = out.norm2();
  if (std::fabs(n2 - 1.0) > 1e-12)
    throw std::runtime_error("sample_gaussian: discrete norm " +
                             std::to_string(n2) + " deviates from 1");
  return out;
}

GridState embed(const GridState& s, const GridSpec& target) {
  double rdx = s.dx() / target.dx();
  if (std::fabs(rdx - 1.0) > 1e-12)
    throw std::invalid_argument("embed: target must share dx");
  double off = (s.grid.x_min - target.x_min) / target.dx();
  long o = std::lround(off);
  if (std::fabs(off - o) > 1e-9 || o < 0 || o + s.n() > target.n)
    throw std::invalid_argument("embed: grids not commensurate");
  GridState out(target);
  for (int j = 0; j < s.n(); ++j) out.amp[o + j] = s.amp[j];
  return out;
}

GridState restrict_to(const GridState& s, const GridSpec& target) {
  double rdx = target.dx() / s.dx();
  if (std::fabs(rdx - 1.0) > 1e-12)
    throw std::invalid_argument("restrict_to: target must share dx");
  double off = (target.x_min - s.grid.x_min) / s.dx();
  long o = std::lround(off);
  if (std::fabs(off - o) > 1e-9 || o < 0 || o + target.n > s.n())
    throw std::invalid_argument("restrict_to: target not contained");
  GridState out(target);
  for (int j = 0; j < target.n; ++j) out.amp[j] = s.amp[o + j];
  return out;
}

double lambda_cgs_cm(double mass_g, double horizon_s) {
  const double hbar_cgs = 1.054571817e-27;  // erg s
  return std::sqrt(hbar_cgs * horizon_s / (2.0 * mass_g));
}

}  // namespace sta
