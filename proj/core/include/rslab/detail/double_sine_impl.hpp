#pragma once

// Templated evaluation core for the double sine function, instantiated for
// std::complex<double> and for the multiprecision complex type. Everything
// here assumes periods with positive real part.
//
// Strategy for log S2 on the strip 0 < Re z < Re(w1+w2):
//   substitute t = e^u in the integral representation
//     log S2(z) = int_0^inf dt/(2t) [ sinh(a t)/(sinh(w1 t) sinh(w2 t))
//                                     - a/(w1 w2 t) ],   a = 2z - w1 - w2,
//   integrate the smooth u-integrand over a finite window [L,U] and add
//   closed-form tail corrections. Small t uses the series of
//   log(sinh x / x); large t an overflow-safe exponential form.
//
// Outside the strip, shift by whole periods using
//   S2(z) = 2 sin(pi z / w2) S2(z + w1)   (and the w1 <-> w2 twin),
// accumulating logs of the sine multipliers. Far from the real axis the
// integral is skipped entirely: log S2 = +/- (i pi/2) B22(z) up to errors
// below tolerance once |Im(z/w1)|, |Im(z/w2)| are large enough.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include <boost/math/constants/constants.hpp>

#include "rslab/detail/quad.hpp"
#include "rslab/errors.hpp"

namespace rslab::detail {

template <class C>
C b22_t(const C& z, const C& w1, const C& w2) {
  using R = typename C::value_type;
  const C ww = w1 * w2;
  return z * z / ww - z * (w1 + w2) / ww +
         (w1 * w1 + R(3) * w1 * w2 + w2 * w2) / (R(6) * ww);
}

// exp(w) - 1 without cancellation for small |w|.
template <class C>
C expm1_t(const C& w) {
  using R = typename C::value_type;
  using std::abs;
  using std::exp;
  if (abs(w) > R(0.25)) return exp(w) - R(1);
  C term = w;
  C sum = w;
  const R eps = std::numeric_limits<R>::epsilon();
  for (int k = 2; k < 80; ++k) {
    term *= w / R(k);
    sum += term;
    if (abs(term) <= eps * abs(sum)) break;
  }
  return sum;
}

// log(1 + w), principal branch, stable for small |w|.
template <class C>
C log1p_t(const C& w) {
  using R = typename C::value_type;
  using std::abs;
  using std::log;
  if (abs(w) > R(1e-4)) return log(C(R(1), R(0)) + w);
  // alternating series through w^8; remainder < |w|^9
  C s = -w / R(8);
  for (int k = 7; k >= 1; --k) s = (s + R(1) / R(k)) * (-w);
  return -s;
}

// log(sinh x / x) for |x| <= 1/2, from the zeta-value series.
template <class C>
C log_sinhc_t(const C& x) {
  using R = typename C::value_type;
  const C x2 = x * x;
  C s = C(R(-3617) / R(2605132530000.0), R(0));
  s = s * x2 + R(2) / R(127702575.0);
  s = s * x2 - R(691) / R(3831077250.0);
  s = s * x2 + R(1) / R(467775.0);
  s = s * x2 - R(1) / R(37800.0);
  s = s * x2 + R(1) / R(2835.0);
  s = s * x2 - R(1) / R(180.0);
  s = s * x2 + R(1) / R(6.0);
  return s * x2;
}

// log(2 sin w), principal value mod 2 pi i, safe for large |Im w|.
template <class C>
C log_2sin_t(const C& w) {
  using R = typename C::value_type;
  using std::exp;
  const R pi = boost::math::constants::pi<R>();
  const C i(R(0), R(1));
  if (w.imag() >= R(0)) {
    // 2 sin w = i e^{-iw} (1 - e^{2iw})
    return C(R(0), pi / R(2)) - i * w + log1p_t(-exp(R(2) * i * w));
  }
  return C(R(0), -pi / R(2)) + i * w + log1p_t(-exp(R(-2) * i * w));
}

// Bracketed integrand of the strip representation at t > 0.
template <class C>
C s2_integrand_t(const C& a, const C& w1, const C& w2,
                 const typename C::value_type& t,
                 const typename C::value_type& x_small) {
  using R = typename C::value_type;
  using std::abs;
  using std::exp;
  using std::max;
  const C xa = a * t;
  const C x1 = w1 * t;
  const C x2 = w2 * t;
  const C sub = a / (w1 * w2 * t);
  const R m = max(abs(xa), max(abs(x1), abs(x2)));
  if (m <= x_small) {
    const C lr = log_sinhc_t(xa) - log_sinhc_t(x1) - log_sinhc_t(x2);
    return sub * expm1_t(lr);
  }
  const C s = w1 + w2;
  const C num = exp((a - s) * t) - exp(-(a + s) * t);
  const C den = expm1_t(R(-2) * x1) * expm1_t(R(-2) * x2);
  return R(2) * num / den - sub;
}

// log S2 on the strip 0 < Re z < Re(w1+w2). `mp` selects fixed-panel
// integration instead of the adaptive scheme.
template <class C>
C log_s2_strip_t(const C& z, const C& w1, const C& w2,
                 const typename C::value_type& tol, bool mp) {
  using R = typename C::value_type;
  using std::abs;
  using std::cbrt;
  using std::exp;
  using std::log;
  using std::max;
  using std::min;

  const C s = w1 + w2;
  const C a = R(2) * z - s;
  const R delta = s.real() - abs(a.real());
  if (!(delta > R(0))) {
    throw OutOfStrip("log_double_sine_strip: Re z outside (0, Re(w1+w2))");
  }
  const R x_small = mp ? R(0.05) : R(0.5);
  const R bigM = max(abs(a), max(abs(w1), abs(w2)));

  // Lower cutoff: integrand ~ c_lin * t, correction added in closed form;
  // the cutoff keeps the neglected cubic term under tolerance.
  const C clin = a * (a * a - w1 * w1 - w2 * w2) / (R(6) * w1 * w2);
  const R cubic = abs(a) * bigM * bigM * bigM * bigM / abs(w1 * w2) + R(1e-300);
  R r = min(R(0.2) * x_small / bigM, cbrt(R(0.02) * tol / cubic));
  const R L = log(r);

  // Upper cutoff: the sinh ratio decays like e^{-delta t}.
  R X = log(R(40) / tol);
  X += log(max(X, R(1)));
  R U = log(X / delta);
  if (!(L < U)) U = L + R(1);

  auto f = [&](const R& u) {
    return s2_integrand_t(a, w1, w2, exp(u), x_small) / R(2);
  };
  C integral;
  if (mp) {
    int panels = static_cast<int>(static_cast<double>(U - L) * 3.0) + 1;
    panels = std::max(panels, 16);
    integral = fixed_gk<C>(f, L, U, panels);
  } else {
    integral = adaptive_gk<C>(f, L, U, tol * R(0.5), 13);
  }
  integral += clin * (exp(L) / R(2));
  integral += -a * exp(-U) / (R(2) * w1 * w2);
  return integral;
}

// Full log S2: far-field asymptotics, else shift-reduction into the strip
// followed by the integral. Assumes z is not on either lattice.
template <class C>
C log_s2_full(C z, const C& w1, const C& w2,
              const typename C::value_type& tol, int max_shift, bool mp) {
  using R = typename C::value_type;
  using std::log;
  const R pi = boost::math::constants::pi<R>();

  const R thr = log(R(800) / tol) / (R(2) * pi);
  const R i1 = (z / w1).imag();
  const R i2 = (z / w2).imag();
  if (i1 >= thr && i2 >= thr) return C(R(0), pi / R(2)) * b22_t(z, w1, w2);
  if (i1 <= -thr && i2 <= -thr) return C(R(0), -pi / R(2)) * b22_t(z, w1, w2);

  const C s = w1 + w2;
  const double re_s = static_cast<double>(s.real());
  // step with the shorter period so the centering window is always reachable
  const bool step1 = static_cast<double>(w1.real()) <= static_cast<double>(w2.real());
  const C wstep = step1 ? w1 : w2;
  const C wother = step1 ? w2 : w1;

  C logmul(R(0), R(0));
  int steps = 0;
  double rho = static_cast<double>(z.real()) / re_s;
  while (rho < 0.25 || rho > 0.75) {
    if (++steps > max_shift) {
      throw ShiftDepthExceeded("double_sine: argument too far from the strip");
    }
    if (rho < 0.25) {
      logmul += log_2sin_t(pi * z / wother);
      z += wstep;
    } else {
      z -= wstep;
      logmul -= log_2sin_t(pi * z / wother);
    }
    rho = static_cast<double>(z.real()) / re_s;
  }
  return logmul + log_s2_strip_t(z, w1, w2, tol, mp);
}

}  // namespace rslab::detail
