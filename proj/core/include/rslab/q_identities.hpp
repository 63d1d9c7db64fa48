#pragma once

// Exact big-rational verification of the q-hypergeometric duality identity
// and its supporting Pochhammer lemmas. Everything here is exact: no
// floating point, no tolerances, equality means equality in Q.

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <vector>

#include "rslab/kernels.hpp"
#include "rslab/report.hpp"

namespace rslab {

using ExactRational = boost::multiprecision::cpp_rational;

// One evaluation point of the identity: scalars q, t and variable tuples
// u, v of equal length n, all nonzero rationals with q not in {0, 1}.
struct HypSample {
  ExactRational q, t;
  std::vector<ExactRational> u, v;
};

struct Composition {
  std::vector<int> parts;
  int total = 0;
};

// (z;q)_k for any integer k; negative indices use the standard extension
// (z;q)_{-n} = prod_{j=1..n} 1/(1 - z q^{-j}).
ExactRational q_pochhammer(const ExactRational& z, const ExactRational& q,
                           int k);

// Hyperbolic analog <x>_{m,k} = (-1)^{mk} S2(x) / S2(x + m w1 + k w2).
cplx hyp_pochhammer(cplx x, long m, long k, const ModelParams& p,
                    const PrecisionPolicy& pol = {});

// Sine-product form of the same symbol for m, k >= 0:
//   prod_{s<m} 2 sin(pi (x + s w1)/w2) * prod_{l<k} 2 sin(pi (x + l w2)/w1).
// Continues the ratio form through points where numerator and denominator
// double sines degenerate together (notably x = w1 + w2), and costs only
// sines instead of two quadratures.
cplx hyp_pochhammer_product(cplx x, long m, long k, const ModelParams& p);

// All n-part compositions of K, first part descending from K (so (2,2)
// yields (2,0),(1,1),(0,2)); exactly C(K+n-1, n-1) of them.
std::vector<Composition> compositions(int n, int K);

enum class IdentitySide { left, right };

// The chosen side of the duality identity at the sample, summed over all
// n-part compositions of K. Exact value.
ExactRational theorem2_side(IdentitySide side, const HypSample& s, int K);

// Draws `trials` random small-rational samples (resampling when a
// denominator vanishes) and asserts exact equality of the two sides.
Report verify_theorem2(int n, int K, int trials, std::uint64_t seed);

// Exact checks of the symmetric-bracket shift identities
//   [q^p u;q]_m [u;q]_n     = [q^p u;q]_{n-p} [u;q]_{m+p}
//   [qu;q]_m [q^{-(m+p)}/u;q]_n = (-1)^p [qu;q]_{m+p} [q^{-m}/u;q]_{n-p}
// for any integers m, n, p, in normal form with tracked half-power
// prefactors.
Report verify_pochhammer_lemmas(const ExactRational& u,
                                const ExactRational& q, int m, int n, int p);

// Residue-pair cancellation of the left-hand summands at u1 = u2 q^p (and
// of the right-hand summands at v2 = v1 q^p): for every composition k in
// I_p the residues of the k and phi_p(k) terms sum to zero exactly.
Report verify_lemma_p1(int n, int K, int p, const HypSample& s);

// Exact residue recursion at the mixed diagonal v1 = q^{p-1} u1:
//   Res (1/v1) V_{k1,k'}(u;v) = phi_p(u;v) V_{k1-p,k'}(q v1, u'; q^{-1}u1, v')
// together with its U twin, for all k' with |k'| <= 2.
Report verify_lemma_2p(int n, int k1, int p, const HypSample& s);

// The substitution u_i -> 1/v_i, v_i -> 1/u_i carries each left summand to
// the corresponding right summand; checked exactly per composition.
Report verify_involution(int n, int K, const HypSample& s);

}  // namespace rslab
