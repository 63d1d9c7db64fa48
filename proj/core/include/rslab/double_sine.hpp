#pragma once

// Double sine function S2(z | w1, w2) and companions.
//
// Conventions: S2 has poles at m*w1 + k*w2 (m,k >= 1), zeros at
// -(m*w1 + k*w2) (m,k >= 0), S2((w1+w2)/2) = 1, and satisfies the shift
// relations S2(z)/S2(z+w1) = 2 sin(pi z / w2) (and with the periods
// swapped). Both periods must have positive real part.

#include <complex>
#include <optional>

#include "rslab/errors.hpp"

namespace rslab {

using cplx = std::complex<double>;

struct Periods {
  cplx omega1{1.0, 0.0};
  cplx omega2{1.0, 0.0};

  Periods() = default;
  Periods(cplx w1, cplx w2) : omega1(w1), omega2(w2) {
    if (!(omega1.real() > 0.0) || !(omega2.real() > 0.0)) {
      throw ConfigError("periods must have positive real part");
    }
  }
  cplx sum() const { return omega1 + omega2; }
};

// Lattice index (m,k) labelling m*omega1 + k*omega2.
struct LatticePoint {
  long m = 0;
  long k = 0;
};

struct PrecisionPolicy {
  // >16 routes evaluation through the multiprecision engine and rounds
  // the result back to double.
  int working_digits = 15;
  // absolute tolerance on log S2 from the quadrature
  double quadrature_tol = 1e-13;
  int max_shift_depth = 64;
  // pole/zero detection threshold, relative to |w1 + w2|
  double pole_proximity_rel = 1e-8;

  static PrecisionPolicy standard() { return {}; }
  static PrecisionPolicy extended() {
    PrecisionPolicy p;
    p.working_digits = 30;
    p.quadrature_tol = 1e-28;
    return p;
  }
};

// Quadratic polynomial B22 appearing in the asymptotics of log S2.
cplx bernoulli_b22(cplx z, const Periods& w);

// Nearest lattice decomposition z ~ m*w1 + k*w2 within tol_abs, if any.
std::optional<LatticePoint> lattice_coordinates(cplx z, const Periods& w,
                                                double tol_abs);
// Hit tests against the pole lattice {m*w1 + k*w2 : m,k >= 1} and the zero
// lattice {-(m*w1 + k*w2) : m,k >= 0}.
std::optional<LatticePoint> pole_lattice_hit(cplx z, const Periods& w,
                                             double tol_abs);
std::optional<LatticePoint> zero_lattice_hit(cplx z, const Periods& w,
                                             double tol_abs);

// log S2 via the integral representation; requires 0 < Re z < Re(w1+w2).
cplx log_double_sine_strip(cplx z, const Periods& w,
                           const PrecisionPolicy& pol = {});

// S2 anywhere: returns exactly 0 on the zero lattice, throws PoleHit on the
// pole lattice, otherwise shift-reduces into the fundamental strip.
cplx double_sine(cplx z, const Periods& w, const PrecisionPolicy& pol = {});

// log S2 with the same reduction; throws PoleHit on either lattice.
cplx log_double_sine(cplx z, const Periods& w, const PrecisionPolicy& pol = {});

// Infinite-product representation; requires Im(w1/w2) != 0 (throws
// RealPeriodRatio otherwise).
cplx double_sine_product(cplx z, const Periods& w,
                         const PrecisionPolicy& pol = {});

// Residue of S2 at the pole m*w1 + k*w2 (m,k >= 1).
cplx s2_residue(LatticePoint p, const Periods& w);
// Residue of 1/S2 at the zero -(m*w1 + k*w2) (m,k >= 0).
cplx s2_inv_residue(LatticePoint p, const Periods& w);

// Leading asymptotic term +/- (i pi / 2) B22(z), valid away from the period
// cones; throws InsideCone if z is within cone_margin (radians) of them.
cplx log_s2_asymptotic(cplx z, const Periods& w, double cone_margin = 0.05);

// Hyperbolic gamma function G(z) = S2(i z + (w1+w2)/2).
cplx hyperbolic_gamma(cplx z, const Periods& w, const PrecisionPolicy& pol = {});

}  // namespace rslab
