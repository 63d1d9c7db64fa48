#pragma once

// Macdonald and Ruijsenaars difference operators acting on black-box
// analytic evaluators, the trigonometric kernel identity behind them, and
// its hyperbolic dressing.

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "rslab/kernels.hpp"

namespace rslab {

// A function of n complex variables, analytic on |Im x_i| < strip_halfwidth.
// The halfwidth is the caller's analyticity contract: operators refuse to
// shift outside it.
struct AnalyticTestFunction {
  std::function<cplx(const std::vector<cplx>&)> evaluator;
  double strip_halfwidth = 1e9;
};

// All r-element subsets of {0,...,n-1} in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(int n, int r);

// (M_r f)(x) = sum_{|I|=r} prod_{i in I, j notin I}
//     sh(pi (x_i - x_j - i g)/w2) / sh(pi (x_i - x_j)/w2)
//   * f(x with x_i -> x_i - i w1 for i in I).
cplx macdonald_apply(int r, const AnalyticTestFunction& f,
                     const std::vector<cplx>& x, const ModelParams& p);

// Ruijsenaars operator through the gauge form sqrt(mu) M_r (1/sqrt(mu)).
// The square root of the weight product is taken with the branch continuous
// along the vertical segment from the real projection of the point (the
// weight is positive there for real parameters).
cplx ruijsenaars_apply(int r, const AnalyticTestFunction& f,
                       const std::vector<cplx>& x, const ModelParams& p,
                       const PrecisionPolicy& pol = {});

// Independent direct evaluation with half-power coefficient products; the
// square root of each subset's coefficient product is branched by
// continuity in the coupling from g = 0 (where every coefficient is 1).
cplx ruijsenaars_apply_direct(int r, const AnalyticTestFunction& f,
                              const std::vector<cplx>& x,
                              const ModelParams& p);

// sqrt of measure_product(x) with the branch policy described above;
// exposed because both gauge routes and tests need the same convention.
cplx sqrt_measure_product(const std::vector<cplx>& x, const ModelParams& p,
                          const PrecisionPolicy& pol = {});

cplx elementary_symmetric(int r, const std::vector<cplx>& vals);

// Both sides of the trigonometric kernel identity
//   sum_{|I|=r} prod_{i in I} ( prod_{j notin I} sin(z_i-z_j-a)/sin(z_i-z_j)
//                               prod_b sin(z_i-y_b+a)/sin(z_i-y_b) )
//   = same with the roles of z and y swapped and +a throughout.
std::pair<cplx, cplx> check_kernel_identity(const std::vector<cplx>& z,
                                            const std::vector<cplx>& y,
                                            cplx alpha, int r);

// Hyperbolic dressings of the identity: S_r sums over z-subsets,
// the tilde variant over y-subsets; they are equal for all r.
cplx dressing_S(int r, const std::vector<cplx>& z, const std::vector<cplx>& y,
                const ModelParams& p);
cplx dressing_S_tilde(int r, const std::vector<cplx>& z,
                      const std::vector<cplx>& y, const ModelParams& p);

}  // namespace rslab
