#pragma once

// Residue expansion of the Q-operator commutativity integral.
//
// For strongly negative Re lambda the 2n-point integral collapses into a
// sum over n-element subsets I of [2n] of double power series in
// u = e^{2 pi lambda w1}, v = e^{2 pi lambda w2}, whose coefficients are
// multiple residues of mu(y) prod K(y_j - z_a) at simple lattice poles.
// This module evaluates those coefficients in closed form (two independent
// routes each: the raw product of double sines and the simplified
// hyperbolic-Pochhammer form), verifies the complement pairing
// L^I_{M,K} = (-1)^n R^{complement I}_{M,K} that encodes commutativity,
// assembles the truncated series, and checks the double-zero cancellation
// lemmas that justify dropping all higher-order poles.

#include <complex>
#include <vector>

#include "rslab/kernels.hpp"
#include "rslab/report.hpp"

namespace rslab {

// One multiple-residue term. `subset` lists the coordinates of z (0-based,
// strictly increasing, n out of 2n) that host the n one-dimensional
// residues; m1[a], m2[a] count the lattice shifts of the a-th residue point
// in the two periods.
struct ResidueIndex {
  std::vector<int> subset;
  std::vector<long> m1, m2;
};

// Truncation order of the double series: powers u^M v^K with M <= m_max,
// K <= k_max are kept.
struct SeriesOrder {
  int m_max = 8;
  int k_max = 8;
};

// Truncated series value together with a geometric estimate of the dropped
// tail (outer-shell magnitude times r/(1-r), r = max(|u|,|v|)). The tail
// number is an estimate, not a certified bound: the paper proves
// convergence without quantifying the threshold, so the honest output is
// the value plus this measure of truncation quality.
struct SeriesValue {
  cplx value{0.0, 0.0};
  double tail_estimate = 0.0;
};

// Coefficient of the downward (left) residue series attached to idx.subset:
// the simplified closed form, a product of hyperbolic Pochhammer ratios
// against the m-independent double-sine prefactor. Equals the plain
// y-residue of mu(y) prod K(y_j - z_a) at
// i y_a = i z_{subset[a]} + g*/2 + m1[a] w1 + m2[a] w2.
cplx residue_L_term(const ResidueIndex& idx, const std::vector<cplx>& z,
                    const ModelParams& m, const PrecisionPolicy& pol = {});

// Same coefficient through the raw route: double sines with shifted
// arguments and explicit sine denominators, no Pochhammer regrouping.
// Kept as an independent cross-check of residue_L_term; do not fold the
// two together.
cplx residue_L_term_raw(const ResidueIndex& idx, const std::vector<cplx>& z,
                        const ModelParams& m, const PrecisionPolicy& pol = {});

// Coefficient of the upward (right) residue series: residues at
// i y_a = i z_{subset[a]} - g*/2 - m1[a] w1 - m2[a] w2, opposite contour
// orientation. Simplified closed form.
cplx residue_R_term(const ResidueIndex& idx, const std::vector<cplx>& z,
                    const ModelParams& m, const PrecisionPolicy& pol = {});

// Raw route for residue_R_term.
cplx residue_R_term_raw(const ResidueIndex& idx, const std::vector<cplx>& z,
                        const ModelParams& m, const PrecisionPolicy& pol = {});

// Verifies, for every n-element subset I of [2n], the block identity
//   sum_{|m1|=M, |m2|=K} L^I = (-1)^n sum_{|m1|=M, |m2|=K} R^{[2n] \ I}
// at relative tolerance rel_tol. Throws ToleranceExceeded naming the worst
// subset on failure.
Report verify_LR_equality(int n, int M, int K, const std::vector<cplx>& z,
                          const ModelParams& m, double rel_tol = 1e-8,
                          const PrecisionPolicy& pol = {});

// Truncated residue series of the commutativity integral:
//   sum_I e^{2 pi lambda (n g*/2 + i sum_{i in I} z_i)}
//         n! (-2 pi i)^n sum_{M,K} L^I_{M,K} u^M v^K.
// Requires |u|, |v| < 1 (else NonconvergentSeries).
SeriesValue series_Q_sum(const std::vector<cplx>& z, cplx lambda,
                         const SeriesOrder& ord, const ModelParams& m,
                         const PrecisionPolicy& pol = {});

// The integrand of the commutativity integral itself,
//   F(y, z) = e^{2 pi i lambda sum y} prod_{a<=2n, i<=n} K(y_i - z_a)
//             prod_{i != j} mu(y_i - y_j),
// exposed for the pole-structure checks below. y has n entries, z has 2n.
cplx q_integrand_F(const std::vector<cplx>& y, const std::vector<cplx>& z,
                   cplx lambda, const ModelParams& m,
                   const PrecisionPolicy& pol = {});

// One coincident pair of integration variables, parametrised in the i*y
// plane: i y_first = base + eps + p1 w1 + p2 w2, i y_second = base
// + q1 w1 + q2 w2. The probed hyperplane is
// i(y_first - y_second) = (p1-q1) w1 + (p2-q2) w2.
struct CoincidencePair {
  cplx base;
  int p1 = 0, p2 = 0;
  int q1 = 0, q2 = 0;
};

// Configuration of the double-zero check: pairs occupy y_1..y_{2k},
// spectators fill the remaining n - 2k slots, z supplies the 2n external
// coordinates.
struct CoincidenceConfig {
  int n = 2;
  std::vector<CoincidencePair> pairs;
  std::vector<cplx> spectators;
  std::vector<cplx> z;
  cplx lambda{0.0, 0.0};
};

// Magnitude of the 4^k-term shift-symmetrised sum of F at one separation
// eps. k = 1 sums the integrand directly in double precision. For k >= 2
// the eps^{2k} cancellation sits below double resolution at small eps, so
// each term is factored as the base term times a ratio; the ratio collapses
// to elementary sine products through the period-shift identity of the
// double sine and is carried at extended precision, while the base term
// only sets the overall scale.
double coincidence_sum_magnitude(const CoincidenceConfig& cfg, double eps,
                                 const ModelParams& m);

// Double-zero cancellation check. For each eps the 4^k-term shift-symmetrised
// sum of F over the k pairs is evaluated (see coincidence_sum_magnitude) and
// the log-log slope in eps is fitted by least squares; the slope must equal
// 2k within 5%. A control case first verifies the fitter on the known simple
// pole of F at i y_1 = i y_2 + g (slope -1). Throws SlopeMismatch on a
// failed fit.
Report double_zero_check(const CoincidenceConfig& cfg,
                         const std::vector<double>& eps_list,
                         const ModelParams& m);

}  // namespace rslab
