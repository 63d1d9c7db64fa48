// The closed-form residue coefficients are checked against contour
// integrals of the bare integrand (trapezoid rule on small circles; the
// oracle knows nothing about the closed forms), then against their own
// unsimplified double-sine route, and finally against the complement
// pairing and the coincidence double zeros.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "doctest.h"
#include "rslab/kernels.hpp"
#include "rslab/q_identities.hpp"
#include "rslab/residue_series.hpp"

using rslab::CoincidenceConfig;
using rslab::CoincidencePair;
using rslab::cplx;
using rslab::ModelParams;
using rslab::Periods;
using rslab::ResidueIndex;
using rslab::SeriesOrder;

namespace {

const double kPi = 3.14159265358979323846;

double rel_err(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

ModelParams skew_model() {
  return ModelParams(Periods(cplx(1.0, 0.0), cplx(1.36, 0.0)),
                     cplx(0.55, 0.0));
}

// 1/(2 pi i) of f around center, trapezoid rule; geometric convergence in
// the point count for f analytic in an annulus around the circle.
cplx circle_integral(const std::function<cplx(cplx)>& f, cplx center,
                     double radius, int points) {
  cplx acc(0.0, 0.0);
  for (int j = 0; j < points; ++j) {
    const double th = 2.0 * kPi * double(j) / double(points);
    const cplx e = std::exp(cplx(0.0, th));
    acc += f(center + radius * e) * e;
  }
  return acc * (radius / double(points));
}

// Bare n=1 integrand: K(y - z_0) K(y - z_1), no exponential.
cplx bare_n1(const ModelParams& m, const std::vector<cplx>& z, cplx y) {
  return rslab::kernel_product(m, z, {y});
}

}  // namespace

TEST_CASE("single-variable residue coefficients match a contour oracle") {
  const ModelParams m = skew_model();
  const std::vector<cplx> z = {cplx(0.31, 0.0), cplx(-0.17, 0.0)};
  const cplx iu(0.0, 1.0);

  struct Probe {
    long m1, m2;
  };
  for (const Probe pr : {Probe{0, 0}, Probe{1, 0}, Probe{1, 1}}) {
    const ResidueIndex idx{{0}, {pr.m1}, {pr.m2}};
    const cplx shift = m.gstar() / 2.0 + double(pr.m1) * m.omega.omega1 +
                       double(pr.m2) * m.omega.omega2;
    const cplx center = z[0] - iu * shift;
    const cplx oracle = circle_integral(
        [&](cplx y) { return bare_n1(m, z, y); }, center, 0.04, 64);
    const cplx closed = rslab::residue_L_term(idx, z, m);
    CAPTURE(pr.m1);
    CAPTURE(pr.m2);
    CHECK(rel_err(closed, oracle) < 1e-9);
  }

  for (const Probe pr : {Probe{0, 0}, Probe{0, 1}}) {
    const ResidueIndex idx{{0}, {pr.m1}, {pr.m2}};
    const cplx shift = m.gstar() / 2.0 + double(pr.m1) * m.omega.omega1 +
                       double(pr.m2) * m.omega.omega2;
    const cplx center = z[0] + iu * shift;
    const cplx oracle = circle_integral(
        [&](cplx y) { return bare_n1(m, z, y); }, center, 0.04, 64);
    const cplx closed = rslab::residue_R_term(idx, z, m);
    CAPTURE(pr.m1);
    CAPTURE(pr.m2);
    CHECK(rel_err(closed, oracle) < 1e-9);
  }
}

TEST_CASE("single-variable base coefficient in elementary double sines") {
  const ModelParams m = skew_model();
  const std::vector<cplx> z = {cplx(0.31, 0.0), cplx(-0.17, 0.0)};
  const cplx iu(0.0, 1.0);
  const cplx zs = iu * z[0], xs = iu * z[1];
  const cplx want = std::sqrt(m.omega.omega1 * m.omega.omega2) /
                    (cplx(0.0, -2.0 * kPi) *
                     rslab::double_sine(m.gstar(), m.omega)) /
                    rslab::double_sine(zs - xs + m.gstar(), m.omega) /
                    rslab::double_sine(xs - zs, m.omega);
  const cplx got = rslab::residue_L_term({{0}, {0}, {0}}, z, m);
  CHECK(rel_err(got, want) < 1e-11);
}

TEST_CASE("two-variable residue coefficient matches a double contour oracle") {
  const ModelParams m = skew_model();
  const std::vector<cplx> z = {cplx(0.41, 0.0), cplx(-0.33, 0.0),
                               cplx(0.17, 0.0), cplx(-0.09, 0.0)};
  const cplx iu(0.0, 1.0);

  auto bare = [&](cplx y1, cplx y2) {
    return rslab::kernel_product(m, z, {y1, y2}) *
           rslab::measure_product(m, {y1, y2});
  };

  struct Probe {
    long m1a, m2a, m1b, m2b;
  };
  for (const Probe pr : {Probe{0, 0, 0, 0}, Probe{1, 0, 0, 0}}) {
    const ResidueIndex idx{{0, 1}, {pr.m1a, pr.m1b}, {pr.m2a, pr.m2b}};
    const cplx c1 = z[0] - iu * (m.gstar() / 2.0 +
                                 double(pr.m1a) * m.omega.omega1 +
                                 double(pr.m2a) * m.omega.omega2);
    const cplx c2 = z[1] - iu * (m.gstar() / 2.0 +
                                 double(pr.m1b) * m.omega.omega1 +
                                 double(pr.m2b) * m.omega.omega2);
    const cplx oracle = circle_integral(
        [&](cplx y2) {
          return circle_integral([&](cplx y1) { return bare(y1, y2); }, c1,
                                 0.04, 32);
        },
        c2, 0.04, 32);
    const cplx closed = rslab::residue_L_term(idx, z, m);
    CAPTURE(pr.m1a);
    CHECK(rel_err(closed, oracle) < 1e-8);
  }
}

TEST_CASE("raw and telescoped coefficient routes agree") {
  const ModelParams m = skew_model();
  const std::vector<cplx> z2 = {cplx(0.31, 0.0), cplx(-0.17, 0.0)};
  for (long m1 = 0; m1 <= 2; ++m1) {
    for (long m2 = 0; m2 <= 2; ++m2) {
      const ResidueIndex idx{{0}, {m1}, {m2}};
      CAPTURE(m1);
      CAPTURE(m2);
      CHECK(rel_err(rslab::residue_L_term(idx, z2, m),
                    rslab::residue_L_term_raw(idx, z2, m)) < 1e-9);
      CHECK(rel_err(rslab::residue_R_term(idx, z2, m),
                    rslab::residue_R_term_raw(idx, z2, m)) < 1e-9);
    }
  }

  const std::vector<cplx> z4 = {cplx(0.41, 0.0), cplx(-0.33, 0.0),
                                cplx(0.17, 0.0), cplx(-0.09, 0.0)};
  struct Probe {
    std::vector<int> subset;
    std::vector<long> m1, m2;
  };
  for (const Probe& pr :
       {Probe{{0, 1}, {1, 0}, {0, 1}}, Probe{{0, 2}, {1, 1}, {0, 0}},
        Probe{{1, 3}, {0, 2}, {1, 0}}}) {
    const ResidueIndex idx{pr.subset, pr.m1, pr.m2};
    CHECK(rel_err(rslab::residue_L_term(idx, z4, m),
                  rslab::residue_L_term_raw(idx, z4, m)) < 1e-9);
    CHECK(rel_err(rslab::residue_R_term(idx, z4, m),
                  rslab::residue_R_term_raw(idx, z4, m)) < 1e-9);
  }
}

TEST_CASE("downward and upward series pair off across complementary subsets") {
  const ModelParams m = skew_model();
  const std::vector<cplx> z2 = {cplx(0.31, 0.0), cplx(-0.17, 0.0)};

  // One variable: blocks are single terms and the pairing is coefficient
  // by coefficient, L^{{0}} = -R^{{1}}.
  for (long m1 = 0; m1 <= 2; ++m1) {
    for (long m2 = 0; m2 <= 2; ++m2) {
      const cplx lhs = rslab::residue_L_term({{0}, {m1}, {m2}}, z2, m);
      const cplx rhs = rslab::residue_R_term({{1}, {m1}, {m2}}, z2, m);
      CAPTURE(m1);
      CAPTURE(m2);
      CHECK(rel_err(lhs, -rhs) < 1e-8);
    }
  }

  for (int M = 0; M <= 2; ++M)
    for (int K = 0; K <= 2; ++K)
      CHECK(rslab::verify_LR_equality(1, M, K, z2, m).pass);

  const std::vector<cplx> z4 = {cplx(0.41, 0.0), cplx(-0.33, 0.0),
                                cplx(0.17, 0.0), cplx(-0.09, 0.0)};
  for (int M = 0; M <= 2; ++M) {
    for (int K = 0; K <= 2; ++K) {
      const rslab::Report rep = rslab::verify_LR_equality(2, M, K, z4, m);
      CHECK(rep.pass);
      CHECK(rep.cases.size() == 6);  // all two-element subsets of four
    }
  }
}

TEST_CASE("coefficients respect relabeling of hosts and spectators") {
  const ModelParams m = skew_model();
  const std::vector<cplx> z = {cplx(0.41, 0.0), cplx(-0.33, 0.0),
                               cplx(0.17, 0.0), cplx(-0.09, 0.0)};
  const ResidueIndex idx{{0, 1}, {1, 0}, {0, 1}};

  // swap the two hosts together with their lattice counts
  const std::vector<cplx> z_swap_host = {z[1], z[0], z[2], z[3]};
  const ResidueIndex idx_swap{{0, 1}, {0, 1}, {1, 0}};
  CHECK(rel_err(rslab::residue_L_term(idx, z, m),
                rslab::residue_L_term(idx_swap, z_swap_host, m)) < 1e-10);

  // swap the two spectators
  const std::vector<cplx> z_swap_spect = {z[0], z[1], z[3], z[2]};
  CHECK(rel_err(rslab::residue_L_term(idx, z, m),
                rslab::residue_L_term(idx, z_swap_spect, m)) < 1e-10);
}

TEST_CASE("series assembly, truncation tail, and divergence guard") {
  const ModelParams m = skew_model();
  const std::vector<cplx> z = {cplx(0.31, 0.0), cplx(-0.17, 0.0)};
  const cplx lambda(-1.0, 0.0);

  // order (0,0): two subsets, one coefficient each
  const rslab::SeriesValue s0 = rslab::series_Q_sum(z, lambda, {0, 0}, m);
  cplx manual(0.0, 0.0);
  const cplx orient = cplx(0.0, -2.0 * kPi);
  for (int host = 0; host < 2; ++host) {
    const std::vector<int> sub = {host};
    const cplx expo = std::exp(2.0 * kPi * lambda *
                               (m.gstar() / 2.0 + cplx(0.0, 1.0) * z[host]));
    manual += expo * orient *
              rslab::residue_L_term({sub, {0}, {0}}, z, m);
  }
  CHECK(rel_err(s0.value, manual) < 1e-11);

  // deeper truncations converge and the reported tail shrinks
  const rslab::SeriesValue s8 = rslab::series_Q_sum(z, lambda, {8, 8}, m);
  const rslab::SeriesValue s12 = rslab::series_Q_sum(z, lambda, {12, 12}, m);
  CHECK(std::abs(s8.value - s12.value) <=
        std::max(1e-13, 10.0 * s8.tail_estimate));
  CHECK(s12.tail_estimate < s8.tail_estimate);
  CHECK(s12.tail_estimate < 1e-8 * std::abs(s12.value));

  CHECK_THROWS_AS(rslab::series_Q_sum(z, cplx(0.5, 0.0), {4, 4}, m),
                  rslab::NonconvergentSeries);
}

TEST_CASE("integrand assembles phase, kernels, and weight") {
  const ModelParams m = skew_model();
  const std::vector<cplx> z = {cplx(0.41, 0.0), cplx(-0.33, 0.0),
                               cplx(0.17, 0.0), cplx(-0.09, 0.0)};
  const std::vector<cplx> y = {cplx(0.12, -0.4), cplx(-0.27, 0.31)};
  const cplx lambda(0.23, 0.11);
  const cplx want =
      std::exp(cplx(0.0, 2.0 * kPi) * lambda * (y[0] + y[1])) *
      rslab::kernel_product(m, z, y) * rslab::measure_product(m, y);
  CHECK(rel_err(rslab::q_integrand_F(y, z, lambda, m), want) < 1e-13);

  CHECK_THROWS_AS(rslab::q_integrand_F(y, {z[0], z[1]}, lambda, m),
                  rslab::ConfigError);
}

TEST_CASE("degenerate coordinate layouts are rejected") {
  const ModelParams m = skew_model();
  // z0 - z1 equals z2 - z3 exactly
  const std::vector<cplx> bad = {cplx(0.4, 0.0), cplx(0.1, 0.0),
                                 cplx(-0.2, 0.0), cplx(-0.5, 0.0)};
  CHECK_THROWS_AS(rslab::residue_L_term({{0, 1}, {0, 0}, {0, 0}}, bad, m),
                  rslab::DegenerateConfiguration);
  CHECK_THROWS_AS(rslab::verify_LR_equality(2, 0, 0, bad, m),
                  rslab::DegenerateConfiguration);

  const std::vector<cplx> coincident = {cplx(0.3, 0.0), cplx(0.3, 0.0)};
  CHECK_THROWS_AS(rslab::series_Q_sum(coincident, cplx(-1.0, 0.0), {2, 2}, m),
                  rslab::DegenerateConfiguration);

  CHECK_THROWS_AS(
      rslab::residue_L_term({{0, 1}, {0}, {0, 0}},
                            {cplx(0.4, 0.0), cplx(0.1, 0.0), cplx(-0.2, 0.0),
                             cplx(-0.45, 0.0)},
                            m),
      rslab::ConfigError);
  CHECK_THROWS_AS(
      rslab::residue_L_term({{0, 1}, {-1, 0}, {0, 0}},
                            {cplx(0.4, 0.0), cplx(0.1, 0.0), cplx(-0.2, 0.0),
                             cplx(-0.45, 0.0)},
                            m),
      rslab::ConfigError);
}

TEST_CASE("pair coincidence sum vanishes to second order") {
  const ModelParams m = skew_model();
  CoincidenceConfig cfg;
  cfg.n = 2;
  cfg.pairs = {CoincidencePair{cplx(0.08, 0.07), 1, 1, 0, 0}};
  cfg.spectators = {};
  cfg.z = {cplx(0.41, 0.0), cplx(-0.33, 0.0), cplx(0.17, 0.0),
           cplx(-0.09, 0.0)};
  cfg.lambda = cplx(0.13, 0.2);

  const rslab::Report rep =
      rslab::double_zero_check(cfg, {1e-2, 1e-3, 1e-4}, m);
  CHECK(rep.pass);
  REQUIRE(rep.cases.size() == 2);
  CHECK(rep.cases[0].label.find("control") == 0);
}

TEST_CASE("ratio-accelerated coincidence sum matches direct summation") {
  // At eps = 1e-2 the 16-term cancellation still leaves ~5 clean digits in
  // double, enough to pin the sine-ratio route against a direct sum of the
  // integrand over all shift states.
  const ModelParams m = skew_model();
  CoincidenceConfig cfg;
  cfg.n = 4;
  cfg.pairs = {CoincidencePair{cplx(0.08, 0.07), 1, 1, 0, 0},
               CoincidencePair{cplx(-0.23, -0.11), 1, 1, 0, 0}};
  cfg.spectators = {};
  cfg.z = {cplx(0.41, 0.0),  cplx(-0.33, 0.0), cplx(0.17, 0.0),
           cplx(-0.09, 0.0), cplx(0.57, 0.0),  cplx(-0.51, 0.0),
           cplx(0.29, 0.0),  cplx(-0.45, 0.0)};
  cfg.lambda = cplx(0.13, 0.2);
  const double eps = 1e-2;

  const cplx iu(0.0, 1.0);
  const cplx w1 = m.omega.omega1, w2 = m.omega.omega2;
  cplx direct(0.0, 0.0);
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<cplx> y;
    for (std::size_t j = 0; j < cfg.pairs.size(); ++j) {
      const CoincidencePair& pr = cfg.pairs[j];
      const bool sw1 = (mask >> (2 * j)) & 1u;
      const bool sw2 = (mask >> (2 * j + 1)) & 1u;
      const double a1 = sw1 ? pr.q1 : pr.p1;
      const double a2 = sw2 ? pr.q2 : pr.p2;
      const double b1 = sw1 ? pr.p1 : pr.q1;
      const double b2 = sw2 ? pr.p2 : pr.q2;
      y.push_back(-iu * (pr.base + eps + a1 * w1 + a2 * w2));
      y.push_back(-iu * (pr.base + b1 * w1 + b2 * w2));
    }
    direct += rslab::q_integrand_F(y, cfg.z, cfg.lambda, m);
  }
  const double fast = rslab::coincidence_sum_magnitude(cfg, eps, m);
  CHECK(std::abs(fast - std::abs(direct)) / std::abs(direct) < 1e-4);
}

TEST_CASE("two-pair coincidence sum vanishes to fourth order") {
  const ModelParams m = skew_model();
  CoincidenceConfig cfg;
  cfg.n = 4;
  cfg.pairs = {CoincidencePair{cplx(0.08, 0.07), 1, 1, 0, 0},
               CoincidencePair{cplx(-0.23, -0.11), 1, 1, 0, 0}};
  cfg.spectators = {};
  cfg.z = {cplx(0.41, 0.0),  cplx(-0.33, 0.0), cplx(0.17, 0.0),
           cplx(-0.09, 0.0), cplx(0.57, 0.0),  cplx(-0.51, 0.0),
           cplx(0.29, 0.0),  cplx(-0.45, 0.0)};
  cfg.lambda = cplx(0.13, 0.2);

  const rslab::Report rep =
      rslab::double_zero_check(cfg, {1e-2, 1e-3, 1e-4}, m);
  CHECK(rep.pass);
}

TEST_CASE("coincidence configuration validation") {
  const ModelParams m = skew_model();
  CoincidenceConfig cfg;
  cfg.n = 2;
  cfg.pairs = {CoincidencePair{cplx(0.08, 0.07), 1, 1, 0, 0}};
  cfg.z = {cplx(0.41, 0.0), cplx(-0.33, 0.0), cplx(0.17, 0.0),
           cplx(-0.09, 0.0)};

  CHECK_THROWS_AS(rslab::double_zero_check(cfg, {1e-2}, m),
                  rslab::ConfigError);
  CHECK_THROWS_AS(rslab::double_zero_check(cfg, {1e-2, -1e-3}, m),
                  rslab::ConfigError);

  CoincidenceConfig short_z = cfg;
  short_z.z.pop_back();
  CHECK_THROWS_AS(rslab::double_zero_check(short_z, {1e-2, 1e-3}, m),
                  rslab::ConfigError);

  CoincidenceConfig bad_spect = cfg;
  bad_spect.n = 3;
  bad_spect.z.resize(6, cplx(0.61, 0.0));
  CHECK_THROWS_AS(rslab::double_zero_check(bad_spect, {1e-2, 1e-3}, m),
                  rslab::ConfigError);
}
