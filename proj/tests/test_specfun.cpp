#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_utils.hpp"
#include "sta/specfun.hpp"

using namespace sta;
using namespace sta::specfun;
using testoracle::oracle_cerf;

namespace {
double sat_err(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}
}  // namespace

TEST_CASE("cerf at the origin and on the real axis") {
  CHECK(cerf(cplx(0.0, 0.0)).value == cplx(0.0, 0.0));
  for (double x : {-6.0, -2.5, -1.0, -0.3, 0.2, 0.9, 1.7, 3.0, 4.5, 9.0}) {
    cplx v = cerf(cplx(x, 0.0)).value;
    CHECK(std::abs(v.imag()) < 1e-15);
    CHECK(std::abs(v.real() - std::erf(x)) < 1e-14);
  }
}

TEST_CASE("cerf against frozen high-precision references") {
  // values computed with 40-digit arithmetic
  struct Ref {
    double x, y, re, im;
  };
  const Ref refs[] = {
      {1.0, 1.0, 1.316151281697947644880271, 0.1904534692378346862841089},
      {3.0, 4.0, -120.186991395079444098145, -27.75033729362390249813368},
      {2.2, -1.3, 0.9909499913788879212109583,
       0.0007731662685681152266045921},
      {6.0, 0.5, 0.9999999999999999730175325, -5.531039405270453813454399e-18},
      {0.1, 3.0, 857.7364278874745096857376, 1365.138009964957704139646},
      {29.0, 29.0, 0.9938652377501452440410247, -0.01231298044132737272460775},
      {0.25, 2.9, 855.9436892841588406337301, 193.9718900206213749395971},
  };
  for (const Ref& r : refs) {
    cplx v = cerf(cplx(r.x, r.y)).value;
    CHECK(sat_err(v, cplx(r.re, r.im)) < 1e-13);
  }
}

TEST_CASE("cerf odd and conjugate symmetry") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-8.0, 8.0);
  for (int i = 0; i < 500; ++i) {
    cplx z(U(rng), U(rng));
    cplx v = cerf(z).value;
    CHECK(sat_err(cerf(-z).value, -v) < 1e-13);
    CHECK(sat_err(cerf(std::conj(z)).value, std::conj(v)) < 1e-13);
  }
}

TEST_CASE("cerf matches the series/continued-fraction oracle on a lattice") {
  // the acceptance criterion runs the full 1e4-point lattice; this is a
  // faster randomized version of the same check
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-30.0, 30.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    cplx z(U(rng), U(rng));
    cplx got = cerf(z).value;
    cplx want = oracle_cerf(z);
    if (std::abs(want) > 1e280) continue;  // saturated double range
    worst = std::max(worst, sat_err(got, want));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("cerf error estimate honors the saturation metric bound") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-30.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    cplx z(U(rng), U(rng));
    CHECK(cerf(z).estimated_abs_error <= 1e-12 * std::max(1.0, std::abs(cerf(z).value)));
  }
}

TEST_CASE("cerf never returns NaN for finite input, including blow-up zone") {
  for (double y : {10.0, 20.0, 30.0}) {
    cplx v = cerf(cplx(1e-3, y)).value;
    CHECK(!std::isnan(v.real()));
    CHECK(!std::isnan(v.imag()));
  }
}

TEST_CASE("cerfc_scaled equals exp(u^2) erfc(u)") {
  for (double x : {0.0, 0.3, 1.0, 2.7, 4.0, 8.0}) {
    for (double y : {-3.0, -0.5, 0.0, 0.8, 5.0}) {
      cplx u(x, y);
      // the subtraction 1 - erf only carries information while erf is not
      // saturated in double precision
      if (x * x - y * y > 26.0) continue;
      // reference assembled in double: exp(u^2) amplifies its rounding
      cplx direct = std::exp(u * u) * (1.0 - oracle_cerf(u));
      double ref_noise = std::abs(std::exp(u * u)) * 1e-15;
      CHECK(std::abs(cerfc_scaled(u) - direct) <
            1e-12 * std::max(1.0, std::abs(direct)) + ref_noise);
    }
  }
}

TEST_CASE("cerfc_scaled against frozen high-precision references") {
  struct Ref {
    double x, y, re, im;
  };
  const Ref refs[] = {
      {8.0, -3.0, 0.06161253847677021608246, 0.02279664217705449748911},
      {3.0, 0.5, 0.1751052126231580127574, -0.02663616844623088308},
      {0.3, 5.0, 0.007193662383676471861384, -0.1147839655114892683126},
      {0.0, 2.0, 0.01831563888873418029372, -0.3400262170660662012805},
      {12.0, 7.0, 0.03507984959961944575996, -0.02035803190718325340881},
      {1.1, -0.7, 0.3433753981224882646706, 0.1506811973597740791034},
  };
  for (const Ref& r : refs) {
    cplx w = cerfc_scaled(cplx(r.x, r.y));
    CHECK(std::abs(w - cplx(r.re, r.im)) < 1e-13);
  }
}

TEST_CASE("top-hat values and edge convention") {
  Interval delta(0.0, 2.0);  // [-1, 1)
  CHECK(e_delta(0.0, delta) == 1.0);
  CHECK(e_delta(2.0, delta) == 0.0);
  CHECK(e_delta(-1.0, delta) == 0.5);
  CHECK(e_delta(1.0, delta) == 0.5);
  CHECK(e_delta(-5.0, delta) == 0.0);
}

TEST_CASE("smeared top-hat limits: center -> 1, edge -> 1/2") {
  Interval delta(0.0, 2.0);
  // the approach to both limits is algebraic, O(ell/width): erf along the
  // sqrt(i) ray saturates like 1/R, not exponentially
  double prev_c = 1.0, prev_e = 1.0;
  for (double ell : {1e-2, 1e-3, 1e-4, 1e-5}) {
    double dev_c = std::abs(e_delta_smeared(0.0, ell, delta) - 1.0);
    double dev_e = std::abs(e_delta_smeared(-1.0, ell, delta) - 0.5);
    CHECK(dev_c < 2.0 * ell / delta.width);
    CHECK(dev_e < 2.0 * ell / delta.width);
    CHECK(dev_c < prev_c);
    CHECK(dev_e < prev_e);
    prev_c = dev_c;
    prev_e = dev_e;
  }
  CHECK_THROWS_AS(e_delta_smeared(0.0, 0.0, delta), std::invalid_argument);
}

TEST_CASE("smeared top-hat converges to the top-hat away from edges") {
  Interval delta(0.5, 3.0);
  for (double z : {-2.0, 0.4, 0.5, 1.2, 3.0, 4.8}) {
    double prev = 1e9;
    for (double ell : {0.3, 0.15, 0.075, 0.0375}) {
      double dist = std::min(std::fabs(z - delta.a()),
                             std::fabs(z - delta.b()));
      if (dist < 3.0 * ell) continue;
      double err = std::abs(e_delta_smeared(z, ell, delta) -
                            e_delta(z, delta));
      CHECK(err <= prev + 1e-15);
      prev = err;
    }
  }
}

TEST_CASE("complement/additivity identity for adjacent intervals") {
  Interval left(-1.0, 2.0);   // [-2, 0)
  Interval right(1.0, 2.0);   // [0, 2)
  Interval both(0.0, 4.0);    // [-2, 2)
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    double z = U(rng);
    for (double ell : {0.1, 0.5, 2.0}) {
      cplx sum = e_delta_smeared(z, ell, left) +
                 e_delta_smeared(z, ell, right);
      cplx whole = e_delta_smeared(z, ell, both);
      CHECK(std::abs(sum - whole) < 1e-13);
    }
  }
}

TEST_CASE("erf(1+1i) against the 60-term Maclaurin oracle") {
  cplx want = cplx(testoracle::erf_series_ld({1.0L, 1.0L}).real(),
                   testoracle::erf_series_ld({1.0L, 1.0L}).imag());
  CHECK(std::abs(cerf(cplx(1.0, 1.0)).value - want) < 1e-14);
}

TEST_CASE("exp_quadratic_integral against brute-force quadrature") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int trial = 0; trial < 40; ++trial) {
    cplx q2(-std::abs(U(rng)) - 0.1, U(rng));
    cplx q1(U(rng), U(rng));
    cplx q0(U(rng) * 0.2, U(rng));
    double a = U(rng), b = a + std::abs(U(rng)) + 0.2;
    // Simpson reference
    int n = 20000;
    cplx acc = 0.0;
    double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
      double y = a + i * h;
      cplx f = std::exp(q2 * y * y + q1 * y + q0);
      double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * f;
    }
    acc *= h / 3.0;
    cplx got = exp_quadratic_integral(q2, q1, q0, a, b);
    CHECK(std::abs(got - acc) < 1e-9 * std::max(1.0, std::abs(acc)));
  }
}

TEST_CASE("exp_quadratic_integral saturation regime stays stable") {
  // strongly damped Gaussian far from the window: result is tiny but finite
  cplx v = exp_quadratic_integral(cplx(-4.0, 30.0), cplx(80.0, -3.0),
                                  cplx(-400.0, 1.0), -1.0, 1.0);
  CHECK(std::isfinite(v.real()));
  CHECK(std::isfinite(v.imag()));
  // interval covering the peak of a sharp Gaussian: full mass
  cplx w = exp_quadratic_integral(cplx(-900.0, 0.0), cplx(0.0, 0.0),
                                  cplx(0.0, 0.0), -5.0, 5.0);
  CHECK(std::abs(w - std::sqrt(M_PI / 900.0)) < 1e-12);
}
