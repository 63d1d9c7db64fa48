#pragma once

// Exact normal-form engine for products of symmetric q-Pochhammer brackets.
//
// Values are kept as   coeff * prod_i var_i^{te_i/2} * prod (1-m) / prod (1-m)
// with te twice-exponents (so half-integer powers stay exact) and every
// linear factor (1 - monomial). Brackets enter through the uniform relation
//
//   [z;q]_k = (-1)^k z^{-k/2} q^{-k(k-1)/4} (z;q)_k        (all integer k)
//
// where the nonsymmetric symbol uses the standard two-sided convention
// (z;q)_k = prod_{j=0}^{k-1}(1-q^j z) and (z;q)_{-n} = prod_{j=1}^n
// 1/(1-z q^{-j}). Residues of simple poles are taken by stripping the unique
// vanishing linear factor exactly.

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "rslab/errors.hpp"

namespace rslab::qnf {

using Rat = boost::multiprecision::cpp_rational;

inline Rat rat_pow(const Rat& x, long e) {
  if (e == 0) return Rat(1);
  if (x == 0) {
    if (e < 0) throw ZeroDenominator("rat_pow: zero base with negative power");
    return Rat(0);
  }
  Rat base = x;
  long n = e;
  if (n < 0) {
    base = Rat(1) / base;
    n = -n;
  }
  Rat out(1);
  while (n > 0) {
    if (n & 1) out *= base;
    base *= base;
    n >>= 1;
  }
  return out;
}

struct Monomial {
  Rat coeff{1};
  std::vector<int> te;  // twice-exponents per variable
  explicit Monomial(int nvars) : te(nvars, 0) {}
};

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  out.coeff *= b.coeff;
  for (std::size_t i = 0; i < out.te.size(); ++i) out.te[i] += b.te[i];
  return out;
}

inline Monomial mono_inv(const Monomial& a) {
  Monomial out = a;
  if (a.coeff == 0) throw ZeroDenominator("mono_inv: zero coefficient");
  out.coeff = Rat(1) / a.coeff;
  for (auto& e : out.te) e = -e;
  return out;
}

// value of a monomial all of whose exponents are integral
inline Rat mono_eval(const Monomial& m, const std::vector<Rat>& vals) {
  Rat out = m.coeff;
  for (std::size_t i = 0; i < m.te.size(); ++i) {
    if (m.te[i] & 1)
      throw ConfigError("mono_eval: half-integer exponent survives");
    out *= rat_pow(vals[i], m.te[i] / 2);
  }
  return out;
}

// folds even exponent parts into a rational; returns the leftover half bits
struct SplitValue {
  Rat value{1};
  std::vector<int> odd;
  bool operator==(const SplitValue& o) const {
    return value == o.value && odd == o.odd;
  }
};

inline SplitValue mono_eval_split(const Monomial& m,
                                  const std::vector<Rat>& vals) {
  SplitValue out;
  out.value = m.coeff;
  out.odd.assign(m.te.size(), 0);
  for (std::size_t i = 0; i < m.te.size(); ++i) {
    const int odd = m.te[i] & 1;  // mathematical mod 2, also for negatives
    out.odd[i] = odd;
    out.value *= rat_pow(vals[i], (m.te[i] - odd) / 2);
  }
  return out;
}

struct Product {
  Monomial pre;
  std::vector<Monomial> num, den;  // entries m stand for factors (1 - m)
  explicit Product(int nvars) : pre(nvars) {}
};

inline Product mul(const Product& a, const Product& b) {
  Product out = a;
  out.pre = mono_mul(a.pre, b.pre);
  out.num.insert(out.num.end(), b.num.begin(), b.num.end());
  out.den.insert(out.den.end(), b.den.begin(), b.den.end());
  return out;
}

inline Product div(const Product& a, const Product& b) {
  Product out = a;
  out.pre = mono_mul(a.pre, mono_inv(b.pre));
  out.num.insert(out.num.end(), b.den.begin(), b.den.end());
  out.den.insert(out.den.end(), b.num.begin(), b.num.end());
  return out;
}

// the bracket [arg; q]_k as a Product; variable 0 is q throughout
inline Product bracket_product(int nvars, const Monomial& arg, int k) {
  if (arg.coeff != 1)
    throw ConfigError("bracket_product: argument must be a pure monomial");
  for (int e : arg.te)
    if (e & 1)
      throw ConfigError("bracket_product: argument exponents must be integral");
  Product out(nvars);
  if (k & 1) out.pre.coeff = -out.pre.coeff;
  for (std::size_t i = 0; i < arg.te.size(); ++i)
    out.pre.te[i] += -k * (arg.te[i] / 2);
  out.pre.te[0] += -k * (k - 1) / 2;
  if (k >= 0) {
    for (int j = 0; j < k; ++j) {
      Monomial m = arg;
      m.te[0] += 2 * j;
      out.num.push_back(m);
    }
  } else {
    for (int j = 1; j <= -k; ++j) {
      Monomial m = arg;
      m.te[0] -= 2 * j;
      out.den.push_back(m);
    }
  }
  return out;
}

inline Rat eval(const Product& p, const std::vector<Rat>& vals) {
  Rat out = mono_eval(p.pre, vals);
  for (const auto& m : p.num) out *= Rat(1) - mono_eval(m, vals);
  for (const auto& m : p.den) {
    const Rat d = Rat(1) - mono_eval(m, vals);
    if (d == 0)
      throw ZeroDenominator("eval: linear denominator factor vanishes");
    out /= d;
  }
  return out;
}

inline SplitValue eval_split(const Product& p, const std::vector<Rat>& vals) {
  SplitValue out = mono_eval_split(p.pre, vals);
  for (const auto& m : p.num) out.value *= Rat(1) - mono_eval(m, vals);
  for (const auto& m : p.den) {
    const Rat d = Rat(1) - mono_eval(m, vals);
    if (d == 0)
      throw ZeroDenominator("eval_split: linear denominator factor vanishes");
    out.value /= d;
  }
  return out;
}

// Residue of a simple pole of `f` in variable `var` at the point given by
// `point` (a monomial over the other variables). `vals` supplies sample
// values; vals[var] is replaced by the pole location.
inline Rat residue(const Product& f, int var, const Monomial& point,
                   std::vector<Rat> vals) {
  const Rat a = mono_eval(point, vals);
  vals[var] = a;
  int found = -1, den_zero = 0, num_zero = 0;
  for (std::size_t i = 0; i < f.den.size(); ++i)
    if (mono_eval(f.den[i], vals) == 1) {
      ++den_zero;
      found = static_cast<int>(i);
    }
  for (const auto& m : f.num)
    if (mono_eval(m, vals) == 1) ++num_zero;
  if (den_zero == 0) return Rat(0);  // regular point
  if (den_zero > 1)
    throw DegenerateConfiguration(
        "residue: higher-order coincidence at the residue point");
  if (num_zero > 0) return Rat(0);  // numerator zero cancels the pole
  const int e = f.den[std::size_t(found)].te[var];
  if (e != 2 && e != -2)
    throw DegenerateConfiguration("residue: factor is not linear in variable");
  Rat h = mono_eval(f.pre, vals);
  for (const auto& m : f.num) h *= Rat(1) - mono_eval(m, vals);
  for (std::size_t i = 0; i < f.den.size(); ++i) {
    if (static_cast<int>(i) == found) continue;
    h /= Rat(1) - mono_eval(f.den[i], vals);
  }
  // f = h / (1 - C x): Res = -a h(a); f = h / (1 - C/x): Res = +a h(a)
  return e == 2 ? Rat(-a * h) : Rat(a * h);
}

// ---- builders for the duality identity summands --------------------------

// variable layout: 0 = q, 1 = t, 2..n+1 = u_i, n+2..2n+1 = v_a (0-based i,a)
struct VarTable {
  int n;
  int nvars() const { return 2 + 2 * n; }
  int q() const { return 0; }
  int t() const { return 1; }
  int u(int i) const { return 2 + i; }
  int v(int a) const { return 2 + n + a; }
};

inline Monomial var_mono(const VarTable& vt, int var) {
  Monomial m(vt.nvars());
  m.te[var] = 2;
  return m;
}

struct Slots {
  std::vector<Monomial> u, v;
};

inline Slots default_slots(const VarTable& vt) {
  Slots s;
  for (int i = 0; i < vt.n; ++i) s.u.push_back(var_mono(vt, vt.u(i)));
  for (int a = 0; a < vt.n; ++a) s.v.push_back(var_mono(vt, vt.v(a)));
  return s;
}

namespace detail {
inline Monomial qpow(const VarTable& vt, int e) {
  Monomial m(vt.nvars());
  m.te[vt.q()] = 2 * e;
  return m;
}
inline Monomial tpow(const VarTable& vt, int e, bool with_t) {
  Monomial m(vt.nvars());
  if (with_t) m.te[vt.t()] = 2 * e;
  return m;
}
}  // namespace detail

// curly U_k = prod_i [qt]_{k_i} prod_{i!=j} [t^{-1} q^{-k_j} U_i/U_j]_{k_i}
//             prod_{a,j} [t U_j/V_a]_{k_j};    with_t=false sets t = 1
inline Product build_curly_U(const VarTable& vt, const std::vector<int>& k,
                             const Slots& s, bool with_t) {
  const int n = vt.n;
  Product out(vt.nvars());
  for (int i = 0; i < n; ++i) {
    Monomial arg = mono_mul(detail::qpow(vt, 1), detail::tpow(vt, 1, with_t));
    out = mul(out, bracket_product(vt.nvars(), arg, k[std::size_t(i)]));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Monomial arg = mono_mul(detail::tpow(vt, -1, with_t),
                              detail::qpow(vt, -k[std::size_t(j)]));
      arg = mono_mul(arg, mono_mul(s.u[std::size_t(i)],
                                   mono_inv(s.u[std::size_t(j)])));
      out = mul(out, bracket_product(vt.nvars(), arg, k[std::size_t(i)]));
    }
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j) {
      Monomial arg = mono_mul(detail::tpow(vt, 1, with_t),
                              mono_mul(s.u[std::size_t(j)],
                                       mono_inv(s.v[std::size_t(a)])));
      out = mul(out, bracket_product(vt.nvars(), arg, k[std::size_t(j)]));
    }
  return out;
}

// curly V_k = prod_a [qt]_{k_a} prod_{a!=b} [t^{-1} q^{-k_a} V_a/V_b]_{k_b}
//             prod_{a,j} [t U_j/V_a]_{k_a}
inline Product build_curly_V(const VarTable& vt, const std::vector<int>& k,
                             const Slots& s, bool with_t) {
  const int n = vt.n;
  Product out(vt.nvars());
  for (int a = 0; a < n; ++a) {
    Monomial arg = mono_mul(detail::qpow(vt, 1), detail::tpow(vt, 1, with_t));
    out = mul(out, bracket_product(vt.nvars(), arg, k[std::size_t(a)]));
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      Monomial arg = mono_mul(detail::tpow(vt, -1, with_t),
                              detail::qpow(vt, -k[std::size_t(a)]));
      arg = mono_mul(arg, mono_mul(s.v[std::size_t(a)],
                                   mono_inv(s.v[std::size_t(b)])));
      out = mul(out, bracket_product(vt.nvars(), arg, k[std::size_t(b)]));
    }
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j) {
      Monomial arg = mono_mul(detail::tpow(vt, 1, with_t),
                              mono_mul(s.u[std::size_t(j)],
                                       mono_inv(s.v[std::size_t(a)])));
      out = mul(out, bracket_product(vt.nvars(), arg, k[std::size_t(a)]));
    }
  return out;
}

inline Product build_U(const VarTable& vt, const std::vector<int>& k,
                       const Slots& s) {
  return div(build_curly_U(vt, k, s, true), build_curly_U(vt, k, s, false));
}

inline Product build_V(const VarTable& vt, const std::vector<int>& k,
                       const Slots& s) {
  return div(build_curly_V(vt, k, s, true), build_curly_V(vt, k, s, false));
}

// phi_p = (-1)^p [t q^{1-p}]_{2p} / ([q]_p [q]_{p-1})
//         prod_{j>=2} [t u_j/v_1]_p / [u_1/u_j]_p
//         prod_{b>=2} [t u_1/v_b]_p / [v_b/v_1]_p
//
// The first bracket starts the 2p-run of factors (1 - t q^e) at e = 1-p, so
// that gluing [t q^{1-p}]_p [qt]_p reproduces the residue of the stripped
// cross factor; starting it at e = 1 fails the recursion for p >= 2 (checked
// against exact residues at generic rational samples).
inline Product build_phi(const VarTable& vt, int p) {
  const int n = vt.n;
  Product out(vt.nvars());
  if (p & 1) out.pre.coeff = -out.pre.coeff;
  out = mul(out, bracket_product(
                     vt.nvars(),
                     mono_mul(detail::qpow(vt, 1 - p), detail::tpow(vt, 1, true)),
                     2 * p));
  out = div(out, bracket_product(vt.nvars(), detail::qpow(vt, 1), p));
  out = div(out, bracket_product(vt.nvars(), detail::qpow(vt, 1), p - 1));
  for (int j = 1; j < n; ++j) {
    Monomial num_arg = mono_mul(detail::tpow(vt, 1, true),
                                mono_mul(var_mono(vt, vt.u(j)),
                                         mono_inv(var_mono(vt, vt.v(0)))));
    out = mul(out, bracket_product(vt.nvars(), num_arg, p));
    Monomial den_arg = mono_mul(var_mono(vt, vt.u(0)),
                                mono_inv(var_mono(vt, vt.u(j))));
    out = div(out, bracket_product(vt.nvars(), den_arg, p));
  }
  for (int b = 1; b < n; ++b) {
    Monomial num_arg = mono_mul(detail::tpow(vt, 1, true),
                                mono_mul(var_mono(vt, vt.u(0)),
                                         mono_inv(var_mono(vt, vt.v(b)))));
    out = mul(out, bracket_product(vt.nvars(), num_arg, p));
    Monomial den_arg = mono_mul(var_mono(vt, vt.v(b)),
                                mono_inv(var_mono(vt, vt.v(0))));
    out = div(out, bracket_product(vt.nvars(), den_arg, p));
  }
  return out;
}

}  // namespace rslab::qnf
