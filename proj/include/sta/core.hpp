#pragma once

#include <complex>
#include <string>
#include <vector>

namespace sta {

using cplx = std::complex<double>;

/// Physical parameters of the one-dimensional system H = p^2/2m + V(x).
/// omega = 0 selects the free particle. All checks happen at construction;
/// instances are immutable afterwards.
struct SystemParams {
  double mass;
  double hbar;
  double omega;    // >= 0; 0 means free particle
  double horizon;  // total time T > 0

  SystemParams(double m, double hb, double om, double T);

  double omega_T() const { return omega * horizon; }
  bool free_particle() const { return omega == 0.0; }

  /// lambda = sqrt(hbar T / 2 m), the quantum smearing length.
  double lambda() const;
};

/// Coarse-graining range Delta = [a, b) of width delta centered on x_c.
/// Membership is half-open so partitions are exactly exhaustive and
/// exclusive; the endpoint convention only affects sets of measure zero.
/// The bounds are stored explicitly so adjacent partition cells share an
/// edge bit-exactly.
struct Interval {
  double center;
  double width;

  Interval(double x_c, double delta);
  static Interval from_bounds(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }
  bool contains(double x) const { return a_ <= x && x < b_; }

 private:
  double a_, b_;
};

/// Exhaustive partition of the line: contiguous half-open cells covering
/// [x_min, x_max) plus the two unbounded tails.
struct Partition {
  std::vector<Interval> cells;
  double x_min;
  double x_max;

  /// Number of cells including the two tails.
  int size_with_tails() const { return static_cast<int>(cells.size()) + 2; }

  /// Index of the cell containing x: 0 = left tail, 1..n = cells,
  /// n+1 = right tail.
  int locate(double x) const;
};

Partition make_partition(double x_min, double x_max, int n_cells);

/// Normalized Gaussian packet psi(x) = (2/pi d^2)^(1/4)
/// exp(-(x-x0)^2/d^2 + i p0 x / hbar).
struct GaussianState {
  double width;     // d > 0
  double center;    // x0
  double momentum;  // p0

  GaussianState(double d, double x0, double p0);

  cplx amplitude(double x, double hbar) const;
  double t_spread(const SystemParams& params) const;  // d^2 m / 2 hbar
};

/// Uniform grid descriptor for [x_min, x_max) with n a power of two.
struct GridSpec {
  double x_min;
  double x_max;
  int n;

  GridSpec(double lo, double hi, int npts);

  double dx() const { return (x_max - x_min) / n; }
  double x(int j) const { return x_min + j * dx(); }
  bool operator==(const GridSpec& o) const {
    return x_min == o.x_min && x_max == o.x_max && n == o.n;
  }
};

/// Complex amplitudes sampled on a GridSpec. The discrete L2 norm is
/// tracked explicitly; nothing in the library renormalizes silently.
struct GridState {
  GridSpec grid;
  std::vector<cplx> amp;

  explicit GridState(const GridSpec& g);

  int n() const { return grid.n; }
  double dx() const { return grid.dx(); }
  double x(int j) const { return grid.x(j); }

  double norm2() const;  // sum |amp|^2 dx
  double norm() const;
};

double l2_distance(const GridState& u, const GridState& v);
cplx inner_product(const GridState& u, const GridState& v);  // <u|v>

/// Required grid extent for a state and planned evolution: support of psi
/// plus the classical drift plus an 8-width margin against wrap-around.
/// Returns false (with a message) when the grid is too small.
bool grid_extent_ok(const GridSpec& grid, const GaussianState& state,
                    const SystemParams& params, std::string* why = nullptr);

/// Sample a Gaussian onto a grid. Throws if the extent rule fails or the
/// discrete norm deviates from 1 by more than 1e-12.
GridState sample_gaussian(const GaussianState& state, const GridSpec& grid,
                          const SystemParams& params);

/// Embed a state into a finer/larger commensurate grid (same or halved dx,
/// containing span) and restrict back. Both are exact index operations plus,
/// for refinement, band-limited interpolation.
GridState embed(const GridState& s, const GridSpec& target);
GridState restrict_to(const GridState& s, const GridSpec& target);

/// lambda in centimeters for mass in grams and horizon in seconds (CGS hbar).
double lambda_cgs_cm(double mass_g, double horizon_s);

}  // namespace sta
