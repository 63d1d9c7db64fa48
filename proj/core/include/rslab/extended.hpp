#pragma once

// Multiprecision variants (about 50 decimal digits) of the double sine
// evaluation, for checks that sit behind heavy cancellation.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "rslab/double_sine.hpp"

namespace rslab::ext {

using mreal = boost::multiprecision::cpp_bin_float_50;
using mcplx = boost::multiprecision::cpp_complex_50;

inline mcplx to_mp(cplx z) { return mcplx(z.real(), z.imag()); }
inline cplx to_double(const mcplx& z) {
  return cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
}

// log S2 / S2 with the same lattice conventions as the double versions.
// tol is the absolute tolerance on log S2.
mcplx log_double_sine(const mcplx& z, const mcplx& w1, const mcplx& w2,
                      const mreal& tol = mreal(1e-30));
mcplx double_sine(const mcplx& z, const mcplx& w1, const mcplx& w2,
                  const mreal& tol = mreal(1e-30));

}  // namespace rslab::ext
