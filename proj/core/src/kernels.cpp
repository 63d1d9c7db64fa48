#include "rslab/kernels.hpp"

#include <cmath>
#include <numeric>

#include "rslab/detail/kernels_impl.hpp"

namespace rslab {
namespace {

constexpr double kPi = 3.14159265358979323846;

detail::ModelT<cplx> as_model(const ModelParams& m) {
  return {m.omega.omega1, m.omega.omega2, m.g};
}

cplx tuple_sum(const std::vector<cplx>& v) {
  return std::accumulate(v.begin(), v.end(), cplx(0.0, 0.0));
}

}  // namespace

cplx kernel_K(const ModelParams& m, cplx z, const PrecisionPolicy& pol) {
  return detail::kernel_K_t(as_model(m), z, pol.quadrature_tol,
                            pol.working_digits > 16);
}

cplx kernel_K_via_gamma(const ModelParams& m, cplx z,
                        const PrecisionPolicy& pol) {
  const cplx ihg = cplx(0.0, 1.0) * m.g / 2.0;
  const cplx num = hyperbolic_gamma(z - ihg, m.omega, pol);
  const cplx den = hyperbolic_gamma(z + ihg, m.omega, pol);
  if (den == cplx(0.0, 0.0)) {
    throw PoleHit("kernel_K_via_gamma: argument at a kernel pole", z);
  }
  return num / den;
}

cplx measure_mu(const ModelParams& m, cplx z, const PrecisionPolicy& pol) {
  return detail::measure_mu_t(as_model(m), z, pol.quadrature_tol,
                              pol.working_digits > 16);
}

cplx kernel_product(const ModelParams& m, const std::vector<cplx>& zs,
                    const std::vector<cplx>& ys, const PrecisionPolicy& pol) {
  return detail::kernel_product_t(as_model(m), zs, ys, pol.quadrature_tol,
                                  pol.working_digits > 16);
}

cplx measure_product(const ModelParams& m, const std::vector<cplx>& xs,
                     const PrecisionPolicy& pol) {
  return detail::measure_product_t(as_model(m), xs, pol.quadrature_tol,
                                   pol.working_digits > 16);
}

cplx q_kernel(const ModelParams& m, const std::vector<cplx>& zs,
              const std::vector<cplx>& ys, cplx lambda,
              const PrecisionPolicy& pol) {
  const cplx i(0.0, 1.0);
  const cplx phase = std::exp(2.0 * kPi * i * lambda *
                              (tuple_sum(zs) - tuple_sum(ys)));
  return phase * kernel_product(m, zs, ys, pol) * measure_product(m, ys, pol);
}

cplx lambda_kernel(const ModelParams& m, const std::vector<cplx>& xs,
                   const std::vector<cplx>& ys, cplx lambda,
                   const PrecisionPolicy& pol) {
  if (xs.size() < 2 || ys.size() + 1 != xs.size())
    throw ConfigError("lambda_kernel: need |x| = n >= 2 and |y| = n - 1");
  return q_kernel(m, xs, ys, lambda, pol);
}

cplx d_const(int n, const Periods& w, cplx g, const PrecisionPolicy& pol) {
  if (n < 1) throw ConfigError("d_const: n must be >= 1");
  double fact = 1.0;
  for (int j = 2; j <= n - 1; ++j) fact *= j;
  const cplx base = std::sqrt(w.omega1 * w.omega2) * double_sine(g, w, pol);
  return std::pow(base, -(n - 1)) / fact;
}

double kernel_decay_rate(const ModelParams& m) { return kPi * m.nu_g(); }

cplx kernel_line_shift_factor(const ModelParams& m, cplx w) {
  const cplx i(0.0, 1.0);
  const cplx w2 = m.omega.omega2;
  const cplx num = std::sinh(kPi * (w - i * m.gstar() / 2.0) / w2);
  const cplx den = std::sinh(kPi * (w - i * (m.gstar() / 2.0 + m.g)) / w2);
  if (std::abs(den) < 1e-300) {
    throw SingularDenominator("kernel_line_shift_factor: sinh zero in ratio");
  }
  return num / den;
}

}  // namespace rslab
