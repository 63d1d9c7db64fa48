#pragma once

// Templated kernel/measure evaluation shared by the double-precision API
// and the multiprecision checks.

#include <utility>
#include <vector>

#include "rslab/detail/double_sine_impl.hpp"
#include "rslab/double_sine.hpp"
#include "rslab/errors.hpp"

namespace rslab::detail {

template <class C>
struct ModelT {
  C w1, w2, g;
  C gstar() const { return w1 + w2 - g; }
};

template <class C>
cplx to_cplx(const C& z) {
  return cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
}

// S2 value with lattice guards (exact zero on the zero lattice, PoleHit on
// the pole lattice) and exact period-swap symmetry.
template <class C>
C s2_value_t(const C& z, C a, C b, const typename C::value_type& tol,
             bool mp) {
  if (b.real() < a.real() ||
      (b.real() == a.real() && b.imag() < a.imag())) {
    std::swap(a, b);
  }
  const Periods wd(to_cplx(a), to_cplx(b));
  const cplx zd = to_cplx(z);
  const double tol_abs = 1e-8 * std::abs(wd.sum());
  if (zero_lattice_hit(zd, wd, tol_abs)) return C(0, 0);
  if (pole_lattice_hit(zd, wd, tol_abs)) {
    throw PoleHit("double sine evaluated on its pole lattice", zd);
  }
  using std::exp;
  return exp(log_s2_full(z, a, b, tol, 64, mp));
}

// K(z) = 1 / ( S2(i z + g*/2) S2(-i z + g*/2) )
template <class C>
C kernel_K_t(const ModelT<C>& m, const C& z,
             const typename C::value_type& tol, bool mp) {
  using R = typename C::value_type;
  const C i(0, 1);
  const C h = m.gstar() / R(2);
  const C d = s2_value_t(i * z + h, m.w1, m.w2, tol, mp) *
              s2_value_t(-i * z + h, m.w1, m.w2, tol, mp);
  if (d == C(0, 0)) {
    throw PoleHit("kernel_K: argument at a kernel pole", to_cplx(z));
  }
  return C(1, 0) / d;
}

// mu(z) = S2(i z) S2(-i z + g*); vanishes at z = 0.
template <class C>
C measure_mu_t(const ModelT<C>& m, const C& z,
               const typename C::value_type& tol, bool mp) {
  const C i(0, 1);
  return s2_value_t(i * z, m.w1, m.w2, tol, mp) *
         s2_value_t(-i * z + m.gstar(), m.w1, m.w2, tol, mp);
}

// prod_{i,j} K(z_i - y_j); tuple sizes may differ.
template <class C>
C kernel_product_t(const ModelT<C>& m, const std::vector<C>& zs,
                   const std::vector<C>& ys,
                   const typename C::value_type& tol, bool mp) {
  C acc(1, 0);
  for (const C& z : zs) {
    for (const C& y : ys) acc *= kernel_K_t(m, z - y, tol, mp);
  }
  return acc;
}

// prod_{i != j} mu(x_i - x_j) over ordered pairs; equals 1 for n = 1.
template <class C>
C measure_product_t(const ModelT<C>& m, const std::vector<C>& xs,
                    const typename C::value_type& tol, bool mp) {
  C acc(1, 0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (i != j) acc *= measure_mu_t(m, xs[i] - xs[j], tol, mp);
    }
  }
  return acc;
}

}  // namespace rslab::detail
