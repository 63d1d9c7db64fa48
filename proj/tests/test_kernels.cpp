#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "rslab/detail/kernels_impl.hpp"
#include "rslab/errors.hpp"
#include "rslab/extended.hpp"
#include "rslab/kernels.hpp"

using rslab::cplx;
using rslab::kernel_K;
using rslab::measure_mu;
using rslab::ModelParams;
using rslab::Periods;

namespace {

const double kPi = 3.14159265358979323846;

double rel_err(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

ModelParams unit_model() {
  return ModelParams(Periods(cplx(1.0, 0.0), cplx(1.0, 0.0)), cplx(1.0, 0.0));
}

ModelParams skew_model() {
  return ModelParams(Periods(cplx(1.0, 0.0), cplx(1.36, 0.0)),
                     cplx(0.55, 0.0));
}

}  // namespace

TEST_CASE("parameter bundle: dual coupling, rates, regime flags") {
  const ModelParams m = skew_model();
  CHECK(rel_err(m.gstar(), cplx(1.81, 0.0)) < 1e-15);
  CHECK(std::abs(m.nu_g() - 0.55 / 1.36) < 1e-15);
  CHECK(m.decay_positive());
  CHECK(m.contour_window_nonempty());
  CHECK(m.eigenfunction_regime());

  // the dual of the dual is the original coupling
  const ModelParams md(m.omega, m.gstar());
  CHECK(rel_err(md.gstar(), m.g) < 1e-15);

  CHECK_THROWS_AS(ModelParams(m.omega, cplx(-0.1, 0.0)),
                  rslab::RegimeViolation);
  CHECK_THROWS_AS(ModelParams(m.omega, cplx(2.5, 0.0)),
                  rslab::RegimeViolation);
}

TEST_CASE("kernel value at the origin and evenness") {
  const ModelParams m = unit_model();
  CHECK(rel_err(kernel_K(m, cplx(0.0, 0.0)), cplx(0.5, 0.0)) < 1e-12);

  const ModelParams ms = skew_model();
  for (const cplx z : {cplx(0.7, 0.2), cplx(-1.3, 0.4), cplx(2.1, -0.6)}) {
    CHECK(rel_err(kernel_K(ms, z), kernel_K(ms, -z)) < 1e-11);
  }
}

TEST_CASE("both kernel routes agree") {
  const ModelParams m = skew_model();
  for (const cplx z : {cplx(0.0, 0.0), cplx(0.8, 0.0), cplx(-0.5, 0.3),
                       cplx(1.7, -0.25)}) {
    CHECK(rel_err(kernel_K(m, z), rslab::kernel_K_via_gamma(m, z)) < 1e-10);
  }
}

TEST_CASE("exponential envelopes of kernel and weight on the real line") {
  const ModelParams m = skew_model();
  const double rate = rslab::kernel_decay_rate(m);
  CHECK(std::abs(rate - kPi * 0.55 / 1.36) < 1e-14);

  const double y1 = 6.0;
  const double y2 = 10.0;
  const double slope_K =
      std::log(std::abs(kernel_K(m, cplx(y2, 0.0)))) -
      std::log(std::abs(kernel_K(m, cplx(y1, 0.0))));
  CHECK(std::abs(slope_K + rate * (y2 - y1)) < 1e-8);

  const double slope_mu =
      std::log(std::abs(measure_mu(m, cplx(y2, 0.0)))) -
      std::log(std::abs(measure_mu(m, cplx(y1, 0.0))));
  CHECK(std::abs(slope_mu - rate * (y2 - y1)) < 1e-8);
}

TEST_CASE("weight vanishes on the diagonal; kernel pole is flagged") {
  const ModelParams m = skew_model();
  CHECK(measure_mu(m, cplx(0.0, 0.0)) == cplx(0.0, 0.0));
  const cplx pole = cplx(0.0, 1.0) * m.gstar() / 2.0;
  CHECK_THROWS_AS(kernel_K(m, pole), rslab::PoleHit);
}

TEST_CASE("line-shift identity moves the kernel one period down") {
  const ModelParams m = skew_model();
  for (const cplx w : {cplx(0.45, 0.1), cplx(-1.2, -0.05), cplx(2.8, 0.2)}) {
    const cplx lhs = kernel_K(m, w - cplx(0.0, 1.0) * m.omega.omega1);
    const cplx rhs = kernel_K(m, w) * rslab::kernel_line_shift_factor(m, w);
    CHECK(rel_err(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("tuple products decompose as expected") {
  const ModelParams m = skew_model();
  const std::vector<cplx> zs = {cplx(0.4, 0.0), cplx(-0.9, 0.1)};
  const std::vector<cplx> ys = {cplx(0.15, -0.2)};
  const cplx kp = rslab::kernel_product(m, zs, ys);
  CHECK(rel_err(kp, kernel_K(m, zs[0] - ys[0]) * kernel_K(m, zs[1] - ys[0])) <
        1e-11);

  CHECK(rslab::measure_product(m, ys) == cplx(1.0, 0.0));
  const std::vector<cplx> xs = {cplx(0.3, 0.0), cplx(-0.6, 0.0)};
  const cplx mp = rslab::measure_product(m, xs);
  CHECK(rel_err(mp, measure_mu(m, xs[0] - xs[1]) * measure_mu(m, xs[1] - xs[0])) <
        1e-11);

  const cplx lam(0.3, 0.0);
  const cplx qk = rslab::q_kernel(m, zs, ys, lam);
  const cplx manual =
      std::exp(2.0 * kPi * cplx(0.0, 1.0) * lam * (zs[0] + zs[1] - ys[0])) *
      kp;
  CHECK(rel_err(qk, manual) < 1e-11);
}

TEST_CASE("layer normalization constant at the pinned point") {
  const Periods w(cplx(1.0, 0.0), cplx(1.0, 0.0));
  CHECK(rel_err(rslab::d_const(2, w, cplx(1.0, 0.0)), cplx(1.0, 0.0)) < 1e-11);
  CHECK(rslab::d_const(1, w, cplx(1.0, 0.0)) == cplx(1.0, 0.0));
}

TEST_CASE("rectangular layer kernel at zero spectral parameter") {
  const ModelParams m = skew_model();
  const std::vector<cplx> xs = {cplx(0.4, 0.0), cplx(-0.9, 0.0)};
  const std::vector<cplx> ys = {cplx(0.15, -0.2)};
  const cplx lk = rslab::lambda_kernel(m, xs, ys, cplx(0.0, 0.0));
  CHECK(rel_err(lk, kernel_K(m, xs[0] - ys[0]) * kernel_K(m, xs[1] - ys[0])) <
        1e-11);
  // unit modulus of the pure phase part: |Lambda / Lambda(lambda = 0)| = 1
  // for real coordinates and real lambda
  const std::vector<cplx> yr = {cplx(0.15, 0.0)};
  const cplx ratio = rslab::lambda_kernel(m, xs, yr, cplx(0.3, 0.0)) /
                     rslab::lambda_kernel(m, xs, yr, cplx(0.0, 0.0));
  CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-12);

  CHECK_THROWS_AS(rslab::lambda_kernel(m, ys, ys, cplx(0.0, 0.0)),
                  rslab::ConfigError);  // needs |x| = |y| + 1, |x| >= 2
}

TEST_CASE("multiprecision kernel agrees with the double one") {
  using rslab::ext::mcplx;
  using rslab::ext::mreal;
  using rslab::ext::to_double;
  using rslab::ext::to_mp;
  const ModelParams m = skew_model();
  const rslab::detail::ModelT<mcplx> mm{to_mp(m.omega.omega1),
                                        to_mp(m.omega.omega2), to_mp(m.g)};
  for (const cplx z : {cplx(0.35, 0.0), cplx(-0.8, 0.25)}) {
    const cplx vd = kernel_K(m, z);
    const cplx vm = to_double(
        rslab::detail::kernel_K_t(mm, to_mp(z), mreal(1e-30), true));
    CHECK(rel_err(vd, vm) < 1e-12);
    const cplx md_ = measure_mu(m, z);
    const cplx mm_ = to_double(
        rslab::detail::measure_mu_t(mm, to_mp(z), mreal(1e-30), true));
    CHECK(rel_err(md_, mm_) < 1e-12);
  }
}
