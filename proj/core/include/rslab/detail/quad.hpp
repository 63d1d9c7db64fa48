#pragma once

// Adaptive 1D Gauss-Kronrod quadrature for complex-valued integrands on a
// finite real interval. Node/weight tables come from Boost.Math; the
// recursion is ours so that complex integrands, deterministic evaluation
// order and explicit error accounting all work the same way in double and
// multiprecision builds.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstddef>

#include "rslab/errors.hpp"

namespace rslab::detail {

// In Boost's tables the (2n+1)-point Kronrod abscissas are stored ascending
// starting at 0, and the embedded n-point Gauss abscissas sit at the even
// indices. gk_panel relies on that layout; layout_check() verifies it once.
template <class Real>
bool gk31_layout_ok() {
  const auto& kx = boost::math::quadrature::gauss_kronrod<Real, 31>::abscissa();
  const auto& gx = boost::math::quadrature::gauss<Real, 15>::abscissa();
  using std::abs;
  for (std::size_t j = 0; j < gx.size(); ++j) {
    if (abs(kx[2 * j] - gx[j]) > Real(1e-10)) return false;
  }
  return true;
}

// One 31-point Kronrod panel on [a,b] with the embedded 15-point Gauss rule
// as error reference. Returns the Kronrod value; *err gets |K - G|.
template <class Complex, class Real, class F>
Complex gk31_panel(F&& f, Real a, Real b, Real* err) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& kx = gauss_kronrod<Real, 31>::abscissa();
  const auto& kw = gauss_kronrod<Real, 31>::weights();
  const auto& gw = gauss<Real, 15>::weights();

  const Real mid = (a + b) / 2;
  const Real half = (b - a) / 2;

  Complex fk[16];
  // abscissa 0 appears once; the rest come in +/- pairs.
  fk[0] = f(mid);
  Complex kron = kw[0] * fk[0];
  for (std::size_t i = 1; i < kx.size(); ++i) {
    const Complex fp = f(mid + half * kx[i]);
    const Complex fm = f(mid - half * kx[i]);
    fk[i] = fp + fm;
    kron += kw[i] * fk[i];
  }
  Complex gaussv = gw[0] * fk[0];
  for (std::size_t j = 1; j < gw.size(); ++j) gaussv += gw[j] * fk[2 * j];

  using std::abs;
  *err = static_cast<Real>(abs(kron - gaussv)) * half;
  return kron * half;
}

template <class Complex, class Real, class F>
void adaptive_gk_rec(F& f, Real a, Real b, Real tol, int depth,
                     Complex* acc, Real* errs) {
  Real err;
  const Complex v = gk31_panel<Complex>(f, a, b, &err);
  if (err <= tol || depth <= 0) {
    *acc += v;
    *errs += err;
    return;
  }
  const Real mid = (a + b) / 2;
  adaptive_gk_rec<Complex>(f, a, mid, tol / 2, depth - 1, acc, errs);
  adaptive_gk_rec<Complex>(f, mid, b, tol / 2, depth - 1, acc, errs);
}

// Integrate f over [a,b] to absolute tolerance abs_tol. Throws
// QuadratureFailure if the accumulated error estimate ends up more than
// 50x the request (the estimate itself is conservative).
template <class Complex, class Real, class F>
Complex adaptive_gk(F&& f, Real a, Real b, Real abs_tol, int max_depth,
                    Real* err_out = nullptr) {
  Complex acc{};
  Real errs{};
  adaptive_gk_rec<Complex>(f, a, b, abs_tol, max_depth, &acc, &errs);
  if (err_out) *err_out = errs;
  if (!(errs <= abs_tol * 50)) {
    throw QuadratureFailure("adaptive quadrature did not reach tolerance");
  }
  return acc;
}

// Fixed uniform panels, no recursion. Used by the multiprecision paths where
// the integrands are smooth and a predictable node count beats adaptivity.
template <class Complex, class Real, class F>
Complex fixed_gk(F&& f, Real a, Real b, int panels, Real* err_out = nullptr) {
  Complex acc{};
  Real errs{};
  const Real h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    Real err;
    acc += gk31_panel<Complex>(f, a + i * h, a + (i + 1) * h, &err);
    errs += err;
  }
  if (err_out) *err_out = errs;
  return acc;
}

}  // namespace rslab::detail
