#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "rslab/difference_ops.hpp"
#include "rslab/errors.hpp"
#include "rslab/kernels.hpp"
#include "rslab/rng.hpp"

using namespace rslab;

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;
const cplx I{0.0, 1.0};

ModelParams skew_model() { return ModelParams(Periods(1.0, 1.36), 0.55); }

AnalyticTestFunction gaussian(double a, std::vector<double> centers) {
  AnalyticTestFunction f;
  f.evaluator = [a, centers](const std::vector<cplx>& x) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const cplx d = x[i] - centers[i];
      s += d * d;
    }
    return std::exp(-a * s);
  };
  return f;
}

double rel_err(cplx a, cplx b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("subset enumeration is lexicographic and complete") {
  auto s = subsets_of_size(3, 2);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == std::vector<int>{0, 1});
  CHECK(s[1] == std::vector<int>{0, 2});
  CHECK(s[2] == std::vector<int>{1, 2});
  CHECK(subsets_of_size(5, 0).size() == 1);
  CHECK(subsets_of_size(5, 5).size() == 1);
  CHECK(subsets_of_size(6, 3).size() == 20);
}

TEST_CASE("elementary symmetric polynomials") {
  const cplx a{2.0, 1.0}, b{-0.5, 3.0}, c{4.0, -2.0};
  CHECK(elementary_symmetric(0, {a, b}) == cplx(1.0));
  CHECK(std::abs(elementary_symmetric(1, {a, b}) - (a + b)) < 1e-15);
  CHECK(std::abs(elementary_symmetric(2, {a, b}) - a * b) < 1e-15);
  CHECK(std::abs(elementary_symmetric(2, {a, b, c}) - (a * b + a * c + b * c)) <
        1e-13);
  CHECK_THROWS_AS(elementary_symmetric(3, {a, b}), ConfigError);
}

TEST_CASE("top operator is the pure full shift") {
  const auto m = skew_model();
  auto f = gaussian(0.3, {0.1, -0.2});
  const std::vector<cplx> x{0.37, -0.51};
  std::vector<cplx> xs{x[0] - I * m.omega.omega1, x[1] - I * m.omega.omega1};
  const cplx direct = f.evaluator(xs);
  CHECK(std::abs(macdonald_apply(2, f, x, m) - direct) < 1e-14);
  // the weight product depends only on coordinate differences, so the gauge
  // factors cancel exactly for the full shift
  CHECK(rel_err(ruijsenaars_apply(2, f, x, m), direct) < 1e-10);
  CHECK(rel_err(ruijsenaars_apply_direct(2, f, x, m), direct) < 1e-12);
}

TEST_CASE("plane wave is an eigenfunction in one variable") {
  const auto m = skew_model();
  const cplx lambda{0.4, 0.0};
  AnalyticTestFunction f;
  f.evaluator = [lambda](const std::vector<cplx>& x) {
    return std::exp(2.0 * pi * I * lambda * x[0]);
  };
  const cplx x0{0.23, 0.0};
  const cplx got = macdonald_apply(1, f, {x0}, m);
  const cplx eig = std::exp(2.0 * pi * lambda * m.omega.omega1);
  CHECK(rel_err(got, eig * f.evaluator({x0})) < 1e-14);
  // one-variable Ruijsenaars operator coincides with the Macdonald one
  CHECK(rel_err(ruijsenaars_apply(1, f, {x0}, m), got) < 1e-14);
  CHECK(rel_err(ruijsenaars_apply_direct(1, f, {x0}, m), got) < 1e-14);
}

TEST_CASE("coupling zero reduces to a plain shift sum") {
  ModelParams m;
  m.omega = Periods(1.0, 1.36);
  m.g = 0.0;
  auto f = gaussian(0.2, {0.0, 0.1, -0.3});
  const std::vector<cplx> x{0.4, -0.15, 0.9};
  for (int r = 1; r <= 3; ++r) {
    cplx expect = 0.0;
    for (const auto& sub : subsets_of_size(3, r)) {
      std::vector<cplx> xs = x;
      for (int i : sub) xs[i] -= I * m.omega.omega1;
      expect += f.evaluator(xs);
    }
    CHECK(rel_err(macdonald_apply(r, f, x, m), expect) < 1e-13);
  }
}

TEST_CASE("guard rails: coinciding coordinates and strip limits") {
  const auto m = skew_model();
  auto f = gaussian(0.3, {0.0, 0.0});
  CHECK_THROWS_AS(macdonald_apply(1, f, {cplx(0.4), cplx(0.4)}, m),
                  CoincidingCoordinates);
  auto narrow = gaussian(0.3, {0.0, 0.0});
  narrow.strip_halfwidth = 0.5;  //  less than Re omega1
  CHECK_THROWS_AS(macdonald_apply(1, narrow, {cplx(0.2), cplx(0.9)}, m),
                  StripExceeded);
  CHECK_THROWS_AS(sqrt_measure_product({cplx(0.3), cplx(0.3)}, m),
                  GaugeSingular);
}

TEST_CASE("gauge and direct Ruijsenaars routes agree at real points") {
  const auto m = skew_model();
  SplitMix64 rng(20260816u);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<cplx> x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    if (std::abs(x[0] - x[1]) < 0.15) x[1] += 0.4;
    auto f = gaussian(0.25, {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
    for (int r = 1; r <= 2; ++r) {
      const cplx gauge = ruijsenaars_apply(r, f, x, m);
      const cplx direct = ruijsenaars_apply_direct(r, f, x, m);
      CAPTURE(trial);
      CAPTURE(r);
      CHECK(rel_err(gauge, direct) < 1e-9);
    }
  }
}

TEST_CASE("gauge and direct routes agree in three variables") {
  const auto m = skew_model();
  auto f = gaussian(0.2, {0.1, -0.25, 0.05});
  const std::vector<cplx> x{0.55, -0.4, 1.1};
  for (int r = 1; r <= 3; ++r) {
    const cplx gauge = ruijsenaars_apply(r, f, x, m);
    const cplx direct = ruijsenaars_apply_direct(r, f, x, m);
    CHECK(rel_err(gauge, direct) < 1e-8);
  }
}

TEST_CASE("Macdonald operators commute on Gaussians") {
  const auto m = skew_model();

  auto compose = [&](int r1, int r2, const AnalyticTestFunction& f,
                     const std::vector<cplx>& x) {
    AnalyticTestFunction inner;
    inner.strip_halfwidth = f.strip_halfwidth;
    inner.evaluator = [&](const std::vector<cplx>& y) {
      return macdonald_apply(r2, f, y, m);
    };
    return macdonald_apply(r1, inner, x, m);
  };

  {
    auto f = gaussian(0.3, {0.1, -0.2});
    const std::vector<cplx> x{0.45, -0.3};
    const cplx ab = compose(1, 2, f, x);
    const cplx ba = compose(2, 1, f, x);
    CHECK(std::abs(ab - ba) / std::abs(ab) < 1e-8);
  }
  {
    auto f = gaussian(0.2, {0.1, -0.2, 0.3});
    const std::vector<cplx> x{0.45, -0.3, 1.05};
    for (auto [r1, r2] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
      const cplx ab = compose(r1, r2, f, x);
      const cplx ba = compose(r2, r1, f, x);
      CAPTURE(r1);
      CAPTURE(r2);
      CHECK(std::abs(ab - ba) / std::abs(ab) < 1e-8);
    }
  }
}

TEST_CASE("kernel product is annihilated by the operator difference") {
  // (M_r acting in z) K(z,y) equals (M_r acting in -y) K(z,y); needs the
  // shifted contour window, i.e. Re g < Re omega2.
  const auto m = skew_model();
  REQUIRE(m.contour_window_nonempty());
  const std::vector<cplx> z{0.31, -0.47};
  const std::vector<cplx> y{0.12, 0.83};

  AnalyticTestFunction in_z;
  in_z.evaluator = [&](const std::vector<cplx>& u) {
    return kernel_product(m, u, y);
  };
  AnalyticTestFunction in_my;
  in_my.evaluator = [&](const std::vector<cplx>& u) {
    std::vector<cplx> neg(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) neg[i] = -u[i];
    return kernel_product(m, z, neg);
  };
  const std::vector<cplx> my{-y[0], -y[1]};

  for (int r = 1; r <= 2; ++r) {
    const cplx a = macdonald_apply(r, in_z, z, m);
    const cplx b = macdonald_apply(r, in_my, my, m);
    CAPTURE(r);
    CHECK(std::abs(a - b) / std::abs(a) < 1e-8);
  }
}

TEST_CASE("kernel identity: one-variable closed form and binomial limit") {
  const cplx z{0.37, 0.11}, y{-0.21, 0.05}, alpha{0.4, -0.13};
  auto [lhs, rhs] = check_kernel_identity({z}, {y}, alpha, 1);
  const cplx expect = std::sin(z - y + alpha) / std::sin(z - y);
  CHECK(std::abs(lhs - expect) < 1e-14);
  CHECK(std::abs(rhs - expect) < 1e-14);

  // alpha = 0 turns every factor into 1, leaving the subset count
  const std::vector<cplx> z3{0.3, -0.8, 1.2}, y3{0.9, -0.1, 0.5};
  for (int r = 0; r <= 3; ++r) {
    auto [l0, r0] = check_kernel_identity(z3, y3, cplx(0.0), r);
    double binom = (r == 0 || r == 3) ? 1.0 : 3.0;
    CHECK(std::abs(l0 - binom) < 1e-12);
    CHECK(std::abs(r0 - binom) < 1e-12);
  }
}

TEST_CASE("kernel identity: two-variable term-by-term oracle") {
  const std::vector<cplx> z{cplx(0.3, 0.0), cplx(-0.6, 0.0)};
  const std::vector<cplx> y{cplx(0.15, 0.0), cplx(0.95, 0.0)};
  const cplx a{0.27, 0.0};
  auto cross = [&](cplx zi) {
    return std::sin(zi - y[0] + a) / std::sin(zi - y[0]) *
           std::sin(zi - y[1] + a) / std::sin(zi - y[1]);
  };
  const cplx lhs_manual =
      std::sin(z[0] - z[1] - a) / std::sin(z[0] - z[1]) * cross(z[0]) +
      std::sin(z[1] - z[0] - a) / std::sin(z[1] - z[0]) * cross(z[1]);
  auto [lhs, rhs] = check_kernel_identity(z, y, a, 1);
  CHECK(std::abs(lhs - lhs_manual) < 1e-13);
  CHECK(std::abs(lhs - rhs) < 1e-11);
}

TEST_CASE("kernel identity battery over random tuples") {
  SplitMix64 rng(77001u);
  int checked = 0;
  while (checked < 50) {
    const int n = 1 + int(rng.next() % 3);
    std::vector<cplx> z(n), y(n);
    for (auto& v : z) v = cplx(rng.uniform(-1.0, 1.0), 0.0);
    for (auto& v : y) v = cplx(rng.uniform(-1.0, 1.0), 0.0);
    const cplx alpha(rng.uniform(0.1, 0.7), rng.uniform(-0.3, 0.3));
    // generic-position guard on every sine denominator
    double sep = 1e9;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i != j) sep = std::min(sep, std::abs(std::sin(z[i] - z[j])));
        if (i != j) sep = std::min(sep, std::abs(std::sin(y[i] - y[j])));
        sep = std::min(sep, std::abs(std::sin(z[i] - y[j])));
      }
    if (sep < 1e-3) continue;
    for (int r = 1; r <= n; ++r) {
      auto [lhs, rhs] = check_kernel_identity(z, y, alpha, r);
      CAPTURE(n);
      CAPTURE(r);
      CHECK(rel_err(lhs, rhs) < 1e-11);
    }
    ++checked;
  }
}

TEST_CASE("hyperbolic dressings agree with each other") {
  const auto m = skew_model();
  const std::vector<cplx> z{0.3, -0.45, 0.7};
  const std::vector<cplx> y{0.05, 0.52, -0.6};
  for (int r = 1; r <= 3; ++r) {
    const cplx s = dressing_S(r, z, y, m);
    const cplx st = dressing_S_tilde(r, z, y, m);
    CAPTURE(r);
    CHECK(rel_err(s, st) < 1e-10);
  }
}

TEST_CASE("dressings are the substituted trigonometric identity") {
  // substituting z -> (i pi / w2) z, y -> (i pi / w2)(y + i g*/2 + i g),
  // alpha -> (i pi / w2)(i g) into the sine identity reproduces the
  // hyperbolic dressing sums factor by factor
  const auto m = skew_model();
  const cplx scale = I * pi / m.omega.omega2;
  const std::vector<cplx> z{0.42, -0.31};
  const std::vector<cplx> y{0.11, 0.77};
  std::vector<cplx> Z(2), Y(2);
  for (int i = 0; i < 2; ++i) {
    Z[i] = scale * z[i];
    Y[i] = scale * (y[i] + I * (m.gstar() / 2.0) + I * m.g);
  }
  const cplx A = scale * (I * m.g);
  for (int r = 1; r <= 2; ++r) {
    auto [lhs, rhs] = check_kernel_identity(Z, Y, A, r);
    CAPTURE(r);
    CHECK(rel_err(lhs, dressing_S(r, z, y, m)) < 1e-11);
    CHECK(rel_err(rhs, dressing_S_tilde(r, z, y, m)) < 1e-11);
  }
}
