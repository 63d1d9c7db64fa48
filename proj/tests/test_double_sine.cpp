#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "rslab/double_sine.hpp"
#include "rslab/extended.hpp"

using rslab::cplx;
using rslab::double_sine;
using rslab::LatticePoint;
using rslab::Periods;

namespace {

const double kPi = 3.14159265358979323846;

double rel_err(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// (1/2 pi i) * contour integral of f around z0, periodic trapezoid rule.
template <class F>
cplx contour_residue(F&& f, cplx z0, double radius, int n = 96) {
  cplx acc(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * kPi * j / n;
    const cplx e(std::cos(th), std::sin(th));
    acc += f(z0 + radius * e) * e;
  }
  return acc * (radius / n);
}

}  // namespace

TEST_CASE("quadratic asymptotic polynomial at pinned rational points") {
  const Periods w(cplx(1.0, 0.0), cplx(1.0, 0.0));
  CHECK(rslab::bernoulli_b22(cplx(0.0, 0.0), w) == cplx(5.0 / 6.0, 0.0));
  CHECK(std::abs(rslab::bernoulli_b22(cplx(1.0, 0.0), w) - cplx(-1.0 / 6.0, 0.0)) <
        1e-15);
}

TEST_CASE("special values of the double sine") {
  const std::vector<Periods> omegas = {
      Periods(cplx(1.0, 0.0), cplx(1.0, 0.0)),
      Periods(cplx(1.0, 0.0), cplx(1.36, 0.0)),
      Periods(cplx(0.8, 0.3), cplx(1.1, -0.2)),
  };
  for (const auto& w : omegas) {
    // the self-dual point is an exact fixed point of the representation
    CHECK(rel_err(double_sine(w.sum() / 2.0, w), cplx(1.0, 0.0)) < 1e-12);
    // S2(w2) = sqrt(w1/w2)
    CHECK(rel_err(double_sine(w.omega2, w), std::sqrt(w.omega1 / w.omega2)) <
          1e-11);
  }

  const Periods unit(cplx(1.0, 0.0), cplx(1.0, 0.0));
  CHECK(rel_err(double_sine(cplx(0.5, 0.0), unit), cplx(std::sqrt(2.0), 0.0)) <
        1e-11);
  CHECK(rel_err(double_sine(cplx(1.5, 0.0), unit),
                cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-11);
  CHECK(rel_err(double_sine(cplx(1.0, 0.0), unit), cplx(1.0, 0.0)) < 1e-11);

  // small-argument behavior S2(z) ~ 2 pi z / sqrt(w1 w2)
  const cplx z(1e-6, 0.0);
  CHECK(rel_err(double_sine(z, unit), 2.0 * kPi * z) < 1e-5);
}

TEST_CASE("shift, reflection and homogeneity identities at spot points") {
  const Periods w(cplx(0.9, 0.1), cplx(1.3, -0.25));
  const std::vector<cplx> pts = {{0.37, 0.0}, {1.9, 0.7}, {-1.2, -0.4},
                                 {3.1, 1.1}, {0.05, -2.3}};
  for (const cplx& z : pts) {
    const cplx s2z = double_sine(z, w);

    // S2(z)/S2(z+w1) = 2 sin(pi z / w2), and the twin
    CHECK(rel_err(s2z / double_sine(z + w.omega1, w),
                  2.0 * std::sin(kPi * z / w.omega2)) < 1e-10);
    CHECK(rel_err(s2z / double_sine(z + w.omega2, w),
                  2.0 * std::sin(kPi * z / w.omega1)) < 1e-10);

    // reflection S2(z) S2(w1+w2-z) = 1
    CHECK(rel_err(s2z * double_sine(w.sum() - z, w), cplx(1.0, 0.0)) < 1e-10);

    // S2(z) S2(-z) = -4 sin(pi z/w1) sin(pi z/w2)
    CHECK(rel_err(s2z * double_sine(-z, w),
                  -4.0 * std::sin(kPi * z / w.omega1) *
                      std::sin(kPi * z / w.omega2)) < 1e-10);

    // homogeneity: S2(c z | c w) = S2(z | w)
    const cplx c(1.7, 0.0);
    const Periods cw(c * w.omega1, c * w.omega2);
    CHECK(rel_err(double_sine(c * z, cw), s2z) < 1e-10);
  }
}

TEST_CASE("period swap is exactly symmetric") {
  const Periods w(cplx(1.0, 0.0), cplx(1.36, 0.0));
  const Periods ws(w.omega2, w.omega1);
  const cplx z(0.63, 0.41);
  const cplx a = double_sine(z, w);
  const cplx b = double_sine(z, ws);
  CHECK(a.real() == b.real());
  CHECK(a.imag() == b.imag());
}

TEST_CASE("integral and product representations agree off the real ratio") {
  const Periods w(cplx(1.0, 0.0), cplx(1.0, 1.0));
  const std::vector<cplx> pts = {{0.31, 0.11}, {1.15, 0.6}, {0.8, -0.35},
                                 {-0.6, 0.9}, {2.3, 0.2}};
  for (const cplx& z : pts) {
    const cplx vi = double_sine(z, w);
    const cplx vp = rslab::double_sine_product(z, w);
    CHECK(rel_err(vp, vi) < 1e-10);
  }

  const Periods wr(cplx(1.0, 0.0), cplx(1.36, 0.0));
  CHECK_THROWS_AS(rslab::double_sine_product(cplx(0.3, 0.1), wr),
                  rslab::RealPeriodRatio);
}

TEST_CASE("lattice hits, zeros and poles") {
  const Periods unit(cplx(1.0, 0.0), cplx(1.0, 0.0));
  CHECK(double_sine(cplx(0.0, 0.0), unit) == cplx(0.0, 0.0));
  CHECK(double_sine(cplx(-1.0, 0.0), unit) == cplx(0.0, 0.0));
  CHECK_THROWS_AS(double_sine(cplx(2.0, 0.0), unit), rslab::PoleHit);
  CHECK_THROWS_AS(double_sine(cplx(3.0, 1e-10), unit), rslab::PoleHit);

  auto hit = rslab::pole_lattice_hit(cplx(2.0, 0.0), unit, 1e-8);
  REQUIRE(hit.has_value());
  CHECK(hit->m == 1);
  CHECK(hit->k == 1);

  const Periods skew(cplx(1.0, 0.0), cplx(1.0, 1.0));
  auto h2 = rslab::pole_lattice_hit(cplx(3.0, 2.0), skew, 1e-8);
  REQUIRE(h2.has_value());
  CHECK(h2->m == 1);
  CHECK(h2->k == 2);
  CHECK(!rslab::pole_lattice_hit(cplx(3.0, 2.2), skew, 1e-8).has_value());

  auto z0 = rslab::zero_lattice_hit(cplx(-2.0, -1.0), skew, 1e-8);
  REQUIRE(z0.has_value());
  CHECK(z0->m == 1);
  CHECK(z0->k == 1);
}

TEST_CASE("contour integrals pin the residue formulas") {
  // simple pole of S2 at w1 + w2
  const Periods unit(cplx(1.0, 0.0), cplx(1.0, 0.0));
  {
    auto f = [&](cplx z) { return double_sine(z, unit); };
    const cplx numeric = contour_residue(f, cplx(2.0, 0.0), 0.25);
    const cplx formula = rslab::s2_residue(LatticePoint{1, 1}, unit);
    CHECK(rel_err(formula, cplx(-1.0 / (2.0 * kPi), 0.0)) < 1e-13);
    CHECK(rel_err(numeric, formula) < 1e-10);
  }
  // simple zero of S2 at 0: residue of 1/S2
  {
    auto f = [&](cplx z) { return 1.0 / double_sine(z, unit); };
    const cplx numeric = contour_residue(f, cplx(0.0, 0.0), 0.25);
    const cplx formula = rslab::s2_inv_residue(LatticePoint{0, 0}, unit);
    CHECK(rel_err(formula, cplx(1.0 / (2.0 * kPi), 0.0)) < 1e-13);
    CHECK(rel_err(numeric, formula) < 1e-10);
  }

  // incommensurate periods: multi-index residues on both lattices
  const Periods w(cplx(1.0, 0.0), cplx(1.36, 0.0));
  const std::vector<LatticePoint> poles = {{1, 1}, {2, 1}, {1, 2}};
  for (const auto& p : poles) {
    const cplx z0 = static_cast<double>(p.m) * w.omega1 +
                    static_cast<double>(p.k) * w.omega2;
    auto f = [&](cplx z) { return double_sine(z, w); };
    const cplx numeric = contour_residue(f, z0, 0.11);
    CHECK(rel_err(numeric, rslab::s2_residue(p, w)) < 1e-9);
  }
  const std::vector<LatticePoint> zeros = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (const auto& p : zeros) {
    const cplx z0 = -(static_cast<double>(p.m) * w.omega1 +
                      static_cast<double>(p.k) * w.omega2);
    auto f = [&](cplx z) { return 1.0 / double_sine(z, w); };
    const cplx numeric = contour_residue(f, z0, 0.11);
    CHECK(rel_err(numeric, rslab::s2_inv_residue(p, w)) < 1e-9);
  }

  // at equal periods the double lattice points are flagged, not mispriced
  CHECK_THROWS_AS(rslab::s2_inv_residue(LatticePoint{1, 0}, unit),
                  rslab::DegenerateLattice);
}

TEST_CASE("far-field asymptotic branch matches the strip integral") {
  const Periods unit(cplx(1.0, 0.0), cplx(1.0, 0.0));
  for (double y : {6.5, 9.0, -7.2}) {
    const cplx z(0.4, y);
    const cplx via_strip = std::exp(rslab::log_double_sine_strip(z, unit));
    const cplx via_full = double_sine(z, unit);
    CHECK(rel_err(via_full, via_strip) < 1e-11);
  }
  // explicit asymptotic helper agrees in the far field
  const cplx z(0.4, 9.0);
  CHECK(std::abs(rslab::log_s2_asymptotic(z, unit) -
                 rslab::log_double_sine_strip(z, unit)) < 1e-11);
  CHECK_THROWS_AS(rslab::log_s2_asymptotic(cplx(5.0, 0.2), unit),
                  rslab::InsideCone);
}

TEST_CASE("multiprecision engine agrees with the double one") {
  using rslab::ext::to_double;
  using rslab::ext::to_mp;
  const Periods w(cplx(1.0, 0.0), cplx(1.36, 0.0));
  const std::vector<cplx> pts = {{0.4, 0.0}, {1.1, 0.85}, {-0.7, 0.3}};
  for (const cplx& z : pts) {
    const cplx vd = double_sine(z, w);
    const cplx vm = to_double(
        rslab::ext::double_sine(to_mp(z), to_mp(w.omega1), to_mp(w.omega2)));
    CHECK(rel_err(vd, vm) < 1e-12);
  }

  // the policy switch routes through the same engine
  rslab::PrecisionPolicy ext_pol = rslab::PrecisionPolicy::extended();
  const cplx z(0.62, 0.17);
  CHECK(rel_err(double_sine(z, w, ext_pol), double_sine(z, w)) < 1e-12);
}

TEST_CASE("hyperbolic gamma is the shifted double sine") {
  const Periods w(cplx(1.0, 0.0), cplx(1.36, 0.0));
  const cplx z(0.21, -0.4);
  const cplx lhs = rslab::hyperbolic_gamma(z, w);
  const cplx rhs = double_sine(cplx(0.0, 1.0) * z + w.sum() / 2.0, w);
  CHECK(lhs == rhs);
}
