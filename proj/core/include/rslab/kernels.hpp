#pragma once

// Kernel function K, weight mu, and the model parameter bundle of the
// hyperbolic Ruijsenaars system.
//
//   K(z)  = 1 / ( S2(iz + g*/2) S2(-iz + g*/2) ),   g* = w1 + w2 - g,
//   mu(z) = S2(iz) S2(-iz + g*),
//
// with the gamma-ratio form K(z) = G(z - ig/2)/G(z + ig/2),
// G(z) = S2(iz + (w1+w2)/2) kept as an independent cross-check route.

#include <complex>
#include <vector>

#include "rslab/double_sine.hpp"

namespace rslab {

struct ModelParams {
  Periods omega;
  cplx g{0.5, 0.0};

  ModelParams() = default;
  ModelParams(const Periods& w, cplx coupling) : omega(w), g(coupling) {
    if (!(g.real() > 0.0) || !(g.real() < omega.sum().real())) {
      throw RegimeViolation(
          "ModelParams: need 0 < Re g < Re(omega1 + omega2)");
    }
  }

  cplx gstar() const { return omega.sum() - g; }
  // exponential rate nu_g = Re(g / (w1 w2)) controlling kernel decay
  double nu_g() const { return (g / (omega.omega1 * omega.omega2)).real(); }

  bool decay_positive() const { return nu_g() > 0.0; }
  // the shifted-contour window used by the difference operators is
  // nonempty iff Re g < Re omega2 (equivalently Re g* > Re omega1)
  bool contour_window_nonempty() const {
    return g.real() < omega.omega2.real();
  }
  bool real_periods() const {
    return omega.omega1.imag() == 0.0 && omega.omega2.imag() == 0.0;
  }
  bool eigenfunction_regime() const {
    return real_periods() && g.imag() == 0.0 && contour_window_nonempty();
  }
};

cplx kernel_K(const ModelParams& m, cplx z, const PrecisionPolicy& pol = {});
// same function through the hyperbolic gamma ratio (cross-check route)
cplx kernel_K_via_gamma(const ModelParams& m, cplx z,
                        const PrecisionPolicy& pol = {});
cplx measure_mu(const ModelParams& m, cplx z, const PrecisionPolicy& pol = {});

// prod_{i,j} K(z_i - y_j) (tuple sizes may differ) and
// prod_{i != j} mu(x_i - x_j) (ordered pairs; 1 for a single coordinate).
cplx kernel_product(const ModelParams& m, const std::vector<cplx>& zs,
                    const std::vector<cplx>& ys,
                    const PrecisionPolicy& pol = {});
cplx measure_product(const ModelParams& m, const std::vector<cplx>& xs,
                     const PrecisionPolicy& pol = {});

// Integral kernel e^{2 pi i lambda (sum z - sum y)} K(z,y) mu(y); used both
// for the square (n,n) operator kernel and the rectangular (k, k-1) layer.
cplx q_kernel(const ModelParams& m, const std::vector<cplx>& zs,
              const std::vector<cplx>& ys, cplx lambda,
              const PrecisionPolicy& pol = {});

// The rectangular layer kernel under its own name: Lambda(x_n, y_{n-1}; l)
// with |x| = n >= 2 and |y| = n - 1. Same value as q_kernel at those shapes.
cplx lambda_kernel(const ModelParams& m, const std::vector<cplx>& xs,
                   const std::vector<cplx>& ys, cplx lambda,
                   const PrecisionPolicy& pol = {});

// Normalization d_{n-1}(g) = ((n-1)!)^{-1} [sqrt(w1 w2) S2(g)]^{-(n-1)}.
cplx d_const(int n, const Periods& w, cplx g, const PrecisionPolicy& pol = {});

// Exponential decay rate of K along the real line: |K(y)| ~ e^{-pi nu_g |y|}.
double kernel_decay_rate(const ModelParams& m);

// Ratio K(w - i w1) / K(w): a plain ratio of hyperbolic sines, letting
// shifted-line kernel values be produced from real-line ones.
cplx kernel_line_shift_factor(const ModelParams& m, cplx w);

}  // namespace rslab
