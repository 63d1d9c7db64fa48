#pragma once

// Truncated adaptive quadrature of the Baxter Q-operator integrals at
// n = 1, 2 and the operator-level identities built on them: the symmetric
// commutativity integral in 2n external coordinates, the operator applied
// to analytic test functions, the Macdonald commutation check, and the
// two-variable eigenfunction check.

#include <complex>
#include <vector>

#include "rslab/difference_ops.hpp"
#include "rslab/kernels.hpp"
#include "rslab/report.hpp"

namespace rslab {

// Plan for one truncated box integration.
//
// The integrand of the commutativity integral is bounded by
// C exp(2 pi (|Im lambda| - nu_g) sum_i |y_i|), so a finite box suffices
// once |Im lambda| < nu_g; the radii must be large enough that the fitted
// envelope is below panel_tolerance at the cutoff (integrate_Q rejects
// plans that are not). Plans are immutable while an integration runs;
// panel evaluations touch only const state.
struct IntegrationPlan {
  // half-width of the truncated box, one entry per integration axis
  // (a single entry is broadcast to all axes)
  std::vector<double> truncation_radius;
  // absolute error target for the panel sums of one integral
  double panel_tolerance = 1e-9;
  // adaptive bisection depth per axis
  int max_depth = 12;
  // oscillation rate of the phase factor e^{2 pi i lambda y} along the
  // contour, |Im(2 pi i lambda)| = 2 pi |Re lambda|; used to pre-segment
  // panels so that no panel spans more than a few wavelengths
  double oscillation_hint = 0.0;
};

// Plan factory for the symmetric 2n-coordinate integral: radii from the
// exponential envelope with the constant fitted from measured integrand
// values (origin plus axis probes, with an 8x safety factor).
IntegrationPlan plan_for_Q_integral(const std::vector<cplx>& z2n, cplx lambda,
                                    const ModelParams& m,
                                    double panel_tolerance = 1e-9,
                                    int max_depth = 12,
                                    const PrecisionPolicy& pol = {});

// Plan factory for operator applications Q f: the kernel part alone decays
// like exp(pi nu_g (2 - n)|y_i|) per axis, which is neutral at n = 2, so
// the radii come from probing the magnitude of the actual integrand
// (including f) outward along each axis until it stays below
// panel_tolerance / 1000.
IntegrationPlan plan_for_operator(const AnalyticTestFunction& f,
                                  const std::vector<cplx>& z, cplx lambda,
                                  const ModelParams& m,
                                  double panel_tolerance = 1e-9,
                                  int max_depth = 12,
                                  const PrecisionPolicy& pol = {});

// Cone of aperture sigma around the real line together with the data
// entering the near-real-line exponential bound: with
// g/(w1 w2) = nu_g (1 + i tan phi_g) and alpha = |tan phi_g tan sigma|,
// the integrand decays along the cone like e^{-margin |y|} with
//   margin = 2 pi nu_g (1 - (2n-1) alpha) - |theta|,  theta = Im(2 pi lambda).
// The spec of this bound demands margin > epsilon.
struct ConeSpec {
  double sigma = 0.0;    // cone half-angle, 0 <= sigma < pi/2
  double epsilon = 1e-3; // required decay margin

  double alpha(const ModelParams& m) const;
  double decay_margin(int n, double theta, const ModelParams& m) const;
  // throws RegimeViolation unless decay_margin(n, theta, m) > epsilon
  void require_valid(int n, double theta, const ModelParams& m) const;
};

// Integral value together with its accumulated error estimate: panel error
// sums, the truncation-tail envelope, and (for table-accelerated paths) an
// interpolation allowance.
struct QuadratureValue {
  cplx value{0.0, 0.0};
  double error = 0.0;
};

// The commutativity integral over the truncated box: integral over y in
// R^n of e^{2 pi i lambda sum y} prod_{a<=2n, i<=n} K(z_a - y_i) mu(y).
// z2n holds the 2n real external coordinates. Throws RegimeViolation if
// nu_g <= |Im lambda|, ConfigError for bad shapes or non-real z, and
// ToleranceNotMet if the requested tolerance could not be reached.
QuadratureValue integrate_Q(const std::vector<cplx>& z2n, cplx lambda,
                            const ModelParams& m, const IntegrationPlan& plan,
                            const PrecisionPolicy& pol = {});

// Direct-evaluation reference path of integrate_Q: identical truncation and
// panel logic but every kernel value computed from its double-sine
// definition instead of the acceleration tables. Used to pin the table
// interpolation error; orders of magnitude slower at n = 2.
namespace qdetail {
QuadratureValue integrate_Q_reference(const std::vector<cplx>& z2n,
                                      cplx lambda, const ModelParams& m,
                                      const IntegrationPlan& plan,
                                      const PrecisionPolicy& pol = {});
// max relative deviation, over `samples` seeded points, between the line
// table for K (or the mu pair product) on the horizontal line Im = level
// and direct evaluation
double line_table_max_rel_error(const ModelParams& m, double level, double lo,
                                double hi, int samples, unsigned seed,
                                bool measure_pair,
                                const PrecisionPolicy& pol = {});
}  // namespace qdetail

// Checks Q_n(z; lambda) = e^{2 pi i lambda sum z} Q_n(z; -lambda) by
// evaluating both sides with the given plan. rel_tol <= 0 selects the
// documented default (1e-6 at n = 1, 1e-4 at n = 2). The returned report
// records both values, the relative residual, and whether the absolute
// residual lies within 8x the combined quadrature error estimates; throws
// ToleranceExceeded (carrying both values) when the check fails.
Report verify_commutativity(const std::vector<cplx>& z2n, cplx lambda,
                            const ModelParams& m, const IntegrationPlan& plan,
                            double rel_tol = 0.0,
                            const PrecisionPolicy& pol = {});

// (Q_n(lambda) f)(z) = integral over y in R^n of
// e^{2 pi i lambda (sum z - sum y)} prod_{j,i<=n} K(z_j - y_i) mu(y) f(y).
// z may be complex within the kernel analyticity strip: the y-contour
// stays on the real line, which remains valid while
// |Im z_j| < 0.9 * Re(g*)/2; beyond that StripExceeded is thrown.
QuadratureValue apply_Q_operator(const AnalyticTestFunction& f,
                                 const std::vector<cplx>& z, cplx lambda,
                                 const ModelParams& m,
                                 const IntegrationPlan& plan,
                                 const PrecisionPolicy& pol = {});

// Checks M_r (Q_n(lambda) f) = Q_n(lambda) (M_r f) at the real point z.
// Requires Re g < Re w2 (the shifted-contour window) and f analytic on a
// strip wider than Re w1 (plus the 0.01 Re w1 contour stagger used at
// n = 2 to keep tensor quadrature nodes off the coefficient diagonal).
// The M o Q side evaluates (Q f) at z_i - i w1 on the straight contour
// Im y = -Re(w1)/2, which lies inside the pole-separation window whenever
// Re g < Re w2; the Q o M side integrates on the real line.
Report verify_MQ_commutation(int r, const AnalyticTestFunction& f,
                             const std::vector<cplx>& z, cplx lambda,
                             const ModelParams& m, double rel_tol = 1e-5,
                             const PrecisionPolicy& pol = {});

// Builds Psi_{l1,l2}(x1,x2) = d_1(g) * integral over y of
// Lambda((x1,x2), y; l2) e^{2 pi i l1 y} and checks both Macdonald
// eigenrelations M_1 Psi = (e^{2 pi l1 w1} + e^{2 pi l2 w1}) Psi and
// M_2 Psi = e^{2 pi l1 w1} e^{2 pi l2 w1} Psi at the real point x.
// Requires real periods, real g < Re w2, and real x.
Report eigenfunction_check_n2(cplx lambda1, cplx lambda2,
                              const std::vector<cplx>& x, const ModelParams& m,
                              double rel_tol = 1e-5,
                              const PrecisionPolicy& pol = {});

}  // namespace rslab
