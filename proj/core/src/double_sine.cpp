#include "rslab/double_sine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "rslab/detail/double_sine_impl.hpp"
#include "rslab/extended.hpp"

namespace rslab {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Fixed period ordering, so evaluation is exactly symmetric under swapping.
Periods canonical(const Periods& w) {
  cplx a = w.omega1;
  cplx b = w.omega2;
  if (b.real() < a.real() ||
      (b.real() == a.real() && b.imag() < a.imag())) {
    std::swap(a, b);
  }
  Periods c;
  c.omega1 = a;
  c.omega2 = b;
  return c;
}

// Search for integers (m,k), m >= mmin and k >= kmin when constrained, with
// |z - (m w1 + k w2)| <= tol_abs.
std::optional<LatticePoint> lattice_solve(cplx z, cplx w1, cplx w2,
                                          double tol_abs, long mmin, long kmin,
                                          bool constrained) {
  auto accept = [&](long m, long k) -> std::optional<LatticePoint> {
    if (constrained && (m < mmin || k < kmin)) return std::nullopt;
    const cplx d =
        z - (static_cast<double>(m) * w1 + static_cast<double>(k) * w2);
    if (std::abs(d) <= tol_abs) return LatticePoint{m, k};
    return std::nullopt;
  };

  const double det = w1.real() * w2.imag() - w1.imag() * w2.real();
  if (std::abs(det) > 1e-9 * std::abs(w1) * std::abs(w2)) {
    // genuinely 2D lattice: invert the coefficient map and probe the
    // surrounding integer corners
    const double m0 = (z.real() * w2.imag() - w2.real() * z.imag()) / det;
    const double k0 = (w1.real() * z.imag() - w1.imag() * z.real()) / det;
    if (std::abs(m0) > 1e15 || std::abs(k0) > 1e15) return std::nullopt;
    const long mf = static_cast<long>(std::floor(m0));
    const long kf = static_cast<long>(std::floor(k0));
    for (long m = mf; m <= mf + 1; ++m) {
      for (long k = kf; k <= kf + 1; ++k) {
        if (auto h = accept(m, k)) return h;
      }
    }
    return std::nullopt;
  }

  // Nearly collinear periods: scan k, recover m by rounding. Both real
  // parts are positive, so constrained scans terminate.
  const double rw1 = w1.real();
  const double rw2 = w2.real();
  long klo;
  long khi;
  if (constrained) {
    klo = kmin;
    const double top = (z.real() - static_cast<double>(mmin) * rw1) / rw2 + 2.0;
    if (top < static_cast<double>(klo)) return std::nullopt;
    khi = static_cast<long>(std::min(top, 1e5));
  } else {
    const long kb = static_cast<long>(
        std::min(2e4, std::abs(z.real()) / std::min(rw1, rw2) + 4.0));
    klo = -kb;
    khi = kb;
  }
  for (long k = klo; k <= khi; ++k) {
    const cplx rem = z - static_cast<double>(k) * w2;
    const double m0 = (rem / w1).real();
    if (std::abs(m0) > 1e15) continue;
    if (auto h = accept(std::lround(m0), k)) return h;
  }
  return std::nullopt;
}

double pole_tol(const Periods& w, const PrecisionPolicy& pol) {
  return pol.pole_proximity_rel * std::abs(w.sum());
}

// Angular distance from direction t to the sector [lo, hi] (radians).
double sector_distance(double t, double lo, double hi) {
  auto wrap = [](double x) {
    while (x > kPi) x -= 2.0 * kPi;
    while (x <= -kPi) x += 2.0 * kPi;
    return x;
  };
  const double c = wrap(t - (lo + hi) / 2.0);
  const double halfwidth = (hi - lo) / 2.0;
  return std::max(0.0, std::abs(c) - halfwidth);
}

}  // namespace

cplx bernoulli_b22(cplx z, const Periods& w) {
  return detail::b22_t(z, w.omega1, w.omega2);
}

std::optional<LatticePoint> lattice_coordinates(cplx z, const Periods& w,
                                                double tol_abs) {
  return lattice_solve(z, w.omega1, w.omega2, tol_abs, 0, 0, false);
}

std::optional<LatticePoint> pole_lattice_hit(cplx z, const Periods& w,
                                             double tol_abs) {
  return lattice_solve(z, w.omega1, w.omega2, tol_abs, 1, 1, true);
}

std::optional<LatticePoint> zero_lattice_hit(cplx z, const Periods& w,
                                             double tol_abs) {
  return lattice_solve(-z, w.omega1, w.omega2, tol_abs, 0, 0, true);
}

cplx log_double_sine_strip(cplx z, const Periods& w,
                           const PrecisionPolicy& pol) {
  const Periods cw = canonical(w);
  if (pol.working_digits > 16) {
    using ext::mcplx;
    using ext::to_mp;
    const mcplx v = detail::log_s2_strip_t(
        to_mp(z), to_mp(cw.omega1), to_mp(cw.omega2),
        ext::mreal(pol.quadrature_tol), true);
    return ext::to_double(v);
  }
  return detail::log_s2_strip_t(z, cw.omega1, cw.omega2, pol.quadrature_tol,
                                false);
}

cplx double_sine(cplx z, const Periods& w, const PrecisionPolicy& pol) {
  const Periods cw = canonical(w);
  const double tol_abs = pole_tol(cw, pol);
  if (zero_lattice_hit(z, cw, tol_abs)) return cplx(0.0, 0.0);
  if (pole_lattice_hit(z, cw, tol_abs)) {
    throw PoleHit("double_sine: argument on the pole lattice", z);
  }
  if (pol.working_digits > 16) {
    return ext::to_double(ext::double_sine(ext::to_mp(z), ext::to_mp(cw.omega1),
                                           ext::to_mp(cw.omega2),
                                           ext::mreal(pol.quadrature_tol)));
  }
  return std::exp(detail::log_s2_full(z, cw.omega1, cw.omega2,
                                      pol.quadrature_tol, pol.max_shift_depth,
                                      false));
}

cplx log_double_sine(cplx z, const Periods& w, const PrecisionPolicy& pol) {
  const Periods cw = canonical(w);
  const double tol_abs = pole_tol(cw, pol);
  if (zero_lattice_hit(z, cw, tol_abs)) {
    throw PoleHit("log_double_sine: argument on the zero lattice", z);
  }
  if (pole_lattice_hit(z, cw, tol_abs)) {
    throw PoleHit("log_double_sine: argument on the pole lattice", z);
  }
  if (pol.working_digits > 16) {
    return ext::to_double(ext::log_double_sine(
        ext::to_mp(z), ext::to_mp(cw.omega1), ext::to_mp(cw.omega2),
        ext::mreal(pol.quadrature_tol)));
  }
  return detail::log_s2_full(z, cw.omega1, cw.omega2, pol.quadrature_tol,
                             pol.max_shift_depth, false);
}

cplx double_sine_product(cplx z, const Periods& w, const PrecisionPolicy& pol) {
  cplx W1 = w.omega1;
  cplx W2 = w.omega2;
  const cplx ratio = W1 / W2;
  if (std::abs(ratio.imag()) <= 1e-12 * std::abs(ratio)) {
    throw RealPeriodRatio(
        "double_sine_product: period ratio is (numerically) real");
  }
  if (ratio.imag() < 0.0) std::swap(W1, W2);  // now Im(W1/W2) > 0

  const cplx i(0.0, 1.0);
  const cplx q2 = std::exp(2.0 * i * kPi * W1 / W2);   // q^2, |q2| < 1
  const cplx qt2 = std::exp(-2.0 * i * kPi * W2 / W1);  // qtilde^2, |qt2| < 1
  const cplx e2 = std::exp(2.0 * kPi * i * z / W2);
  const cplx e1 = std::exp(2.0 * kPi * i * z / W1);
  if (!std::isfinite(std::abs(e1)) || !std::isfinite(std::abs(e2))) {
    throw NonconvergentProduct("double_sine_product: argument too far out");
  }

  const double tol = pol.quadrature_tol;
  const double cut_num = 0.05 * tol * (1.0 - std::abs(q2));
  const double cut_den = 0.05 * tol * (1.0 - std::abs(qt2));
  const long cap = 500000;

  cplx num(1.0, 0.0);
  cplx p = e2;  // q^{2m} e^{2 pi i z / W2}, m = 0, 1, ...
  for (long m = 0;; ++m) {
    if (m > cap) {
      throw NonconvergentProduct("double_sine_product: numerator stalled");
    }
    num *= (1.0 - p);
    p *= q2;
    if (std::abs(p) < cut_num) break;
  }

  cplx den(1.0, 0.0);
  p = qt2 * e1;  // qtilde^{2m} e^{2 pi i z / W1}, m = 1, 2, ...
  for (long m = 1;; ++m) {
    if (m > cap) {
      throw NonconvergentProduct("double_sine_product: denominator stalled");
    }
    const cplx fac = 1.0 - p;
    if (std::abs(fac) < 1e-14) {
      throw PoleHit("double_sine_product: argument at a pole", z);
    }
    den *= fac;
    p *= qt2;
    if (std::abs(p) < cut_den) break;
  }

  const cplx b = detail::b22_t(z, W1, W2);
  return std::exp(i * (kPi / 2.0) * b) * num / den;
}

cplx s2_residue(LatticePoint p, const Periods& w) {
  if (p.m < 1 || p.k < 1) {
    throw ConfigError("s2_residue: pole indices must satisfy m,k >= 1");
  }
  const cplx w1 = w.omega1;
  const cplx w2 = w.omega2;
  cplx denom(1.0, 0.0);
  for (long s = 1; s < p.m; ++s) {
    const cplx f = 2.0 * std::sin(kPi * static_cast<double>(s) * w1 / w2);
    if (std::abs(f) < 1e-10) {
      throw DegenerateLattice("s2_residue: resonant period ratio");
    }
    denom *= f;
  }
  for (long l = 1; l < p.k; ++l) {
    const cplx f = 2.0 * std::sin(kPi * static_cast<double>(l) * w2 / w1);
    if (std::abs(f) < 1e-10) {
      throw DegenerateLattice("s2_residue: resonant period ratio");
    }
    denom *= f;
  }
  const double sign = ((p.m * p.k) % 2 != 0) ? -1.0 : 1.0;
  return sign * std::sqrt(w1 * w2) / (2.0 * kPi) / denom;
}

cplx s2_inv_residue(LatticePoint p, const Periods& w) {
  if (p.m < 0 || p.k < 0) {
    throw ConfigError("s2_inv_residue: zero indices must satisfy m,k >= 0");
  }
  const cplx w1 = w.omega1;
  const cplx w2 = w.omega2;
  cplx denom(1.0, 0.0);
  for (long s = 1; s <= p.m; ++s) {
    const cplx f = 2.0 * std::sin(kPi * static_cast<double>(s) * w1 / w2);
    if (std::abs(f) < 1e-10) {
      throw DegenerateLattice("s2_inv_residue: resonant period ratio");
    }
    denom *= f;
  }
  for (long l = 1; l <= p.k; ++l) {
    const cplx f = 2.0 * std::sin(kPi * static_cast<double>(l) * w2 / w1);
    if (std::abs(f) < 1e-10) {
      throw DegenerateLattice("s2_inv_residue: resonant period ratio");
    }
    denom *= f;
  }
  const double sign = ((p.m * p.k + p.m + p.k) % 2 != 0) ? -1.0 : 1.0;
  return sign * std::sqrt(w1 * w2) / (2.0 * kPi) / denom;
}

cplx log_s2_asymptotic(cplx z, const Periods& w, double cone_margin) {
  if (std::abs(z) == 0.0) {
    throw InsideCone("log_s2_asymptotic: z at the cone apex");
  }
  const double a1 = std::arg(w.omega1);
  const double a2 = std::arg(w.omega2);
  const double lo = std::min(a1, a2);
  const double hi = std::max(a1, a2);
  const double t = std::arg(z);
  const double d_pole = sector_distance(t, lo, hi);
  const double d_zero = sector_distance(t + kPi, lo, hi);
  if (std::min(d_pole, d_zero) <= cone_margin) {
    throw InsideCone("log_s2_asymptotic: direction too close to a period cone");
  }
  const cplx bis = w.omega1 / std::abs(w.omega1) + w.omega2 / std::abs(w.omega2);
  const double side = std::imag(z * std::conj(bis));
  const cplx b = detail::b22_t(z, w.omega1, w.omega2);
  return cplx(0.0, side > 0.0 ? kPi / 2.0 : -kPi / 2.0) * b;
}

cplx hyperbolic_gamma(cplx z, const Periods& w, const PrecisionPolicy& pol) {
  return double_sine(cplx(0.0, 1.0) * z + w.sum() / 2.0, w, pol);
}

namespace ext {

namespace {

void mp_guards(const mcplx& z, const mcplx& w1, const mcplx& w2,
               bool* on_zero, bool* on_pole) {
  if (!(w1.real() > 0 && w2.real() > 0)) {
    throw ConfigError("double_sine(mp): periods must have positive real part");
  }
  const Periods wd(to_double(w1), to_double(w2));
  const cplx zd = to_double(z);
  const double tol_abs = 1e-8 * std::abs(wd.sum());
  *on_zero = zero_lattice_hit(zd, wd, tol_abs).has_value();
  *on_pole = pole_lattice_hit(zd, wd, tol_abs).has_value();
}

void mp_canonical(mcplx* a, mcplx* b) {
  if (b->real() < a->real() ||
      (b->real() == a->real() && b->imag() < a->imag())) {
    std::swap(*a, *b);
  }
}

}  // namespace

mcplx log_double_sine(const mcplx& z, const mcplx& w1, const mcplx& w2,
                      const mreal& tol) {
  mcplx a = w1;
  mcplx b = w2;
  mp_canonical(&a, &b);
  bool on_zero = false;
  bool on_pole = false;
  mp_guards(z, a, b, &on_zero, &on_pole);
  if (on_zero || on_pole) {
    throw PoleHit("log_double_sine(mp): argument on a lattice", to_double(z));
  }
  return detail::log_s2_full(z, a, b, tol, 64, true);
}

mcplx double_sine(const mcplx& z, const mcplx& w1, const mcplx& w2,
                  const mreal& tol) {
  mcplx a = w1;
  mcplx b = w2;
  mp_canonical(&a, &b);
  bool on_zero = false;
  bool on_pole = false;
  mp_guards(z, a, b, &on_zero, &on_pole);
  if (on_zero) return mcplx(0, 0);
  if (on_pole) {
    throw PoleHit("double_sine(mp): argument on the pole lattice",
                  to_double(z));
  }
  return exp(detail::log_s2_full(z, a, b, tol, 64, true));
}

}  // namespace ext
}  // namespace rslab
