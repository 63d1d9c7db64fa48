#include "rslab/q_identities.hpp"

#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

#include "rslab/detail/qnf.hpp"
#include "rslab/double_sine.hpp"
#include "rslab/errors.hpp"
#include "rslab/rng.hpp"

namespace rslab {

ExactRational q_pochhammer(const ExactRational& z, const ExactRational& q,
                           int k) {
  ExactRational out(1);
  if (k >= 0) {
    ExactRational zq = z;
    for (int j = 0; j < k; ++j) {
      out *= ExactRational(1) - zq;
      zq *= q;
    }
    return out;
  }
  if (q == 0) throw ZeroDenominator("q_pochhammer: negative index needs q != 0");
  ExactRational zq = z;
  for (int j = 1; j <= -k; ++j) {
    zq /= q;
    const ExactRational d = ExactRational(1) - zq;
    if (d == 0)
      throw ZeroDenominator("q_pochhammer: factor vanishes at negative index");
    out /= d;
  }
  return out;
}

cplx hyp_pochhammer(cplx x, long m, long k, const ModelParams& p,
                    const PrecisionPolicy& pol) {
  const Periods& w = p.omega;
  const cplx shifted =
      x + double(m) * w.omega1 + double(k) * w.omega2;
  const cplx num = double_sine(x, w, pol);
  const cplx den = double_sine(shifted, w, pol);
  if (den == cplx(0.0, 0.0))
    throw PoleHit("hyp_pochhammer: shifted point lies on the zero lattice",
                  shifted);
  cplx r = num / den;
  if ((m * k) % 2 != 0) r = -r;
  return r;
}

cplx hyp_pochhammer_product(cplx x, long m, long k, const ModelParams& p) {
  if (m < 0 || k < 0)
    throw ConfigError("hyp_pochhammer_product: indices must be non-negative");
  const Periods& w = p.omega;
  const double pi = 3.14159265358979323846;
  // a factor this small means the argument is within ~1e-11 of a lattice
  // integer, where the computed sine has no relative accuracy left; this
  // happens exactly at resonant period ratios (e.g. w1 = w2)
  auto checked = [](cplx f) {
    if (std::abs(f) < 1e-10)
      throw DegenerateConfiguration(
          "hyp_pochhammer_product: factor vanishes, resonant period ratio "
          "or lattice-aligned argument");
    return f;
  };
  cplx out(1.0, 0.0);
  for (long s = 0; s < m; ++s)
    out *= checked(2.0 * std::sin(pi * (x + double(s) * w.omega1) / w.omega2));
  for (long l = 0; l < k; ++l)
    out *= checked(2.0 * std::sin(pi * (x + double(l) * w.omega2) / w.omega1));
  return out;
}

std::vector<Composition> compositions(int n, int K) {
  if (n < 1 || K < 0) throw ConfigError("compositions: need n >= 1, K >= 0");
  std::vector<Composition> out;
  std::vector<int> cur(std::size_t(n), 0);
  std::function<void(int, int)> rec = [&](int i, int rem) {
    if (i == n - 1) {
      cur[std::size_t(i)] = rem;
      out.push_back({cur, K});
      return;
    }
    for (int v = rem; v >= 0; --v) {
      cur[std::size_t(i)] = v;
      rec(i + 1, rem - v);
    }
  };
  rec(0, K);
  return out;
}

namespace {

std::string rat_str(const ExactRational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string describe(const HypSample& s) {
  std::ostringstream os;
  os << "q=" << s.q << " t=" << s.t << " u=(";
  for (std::size_t i = 0; i < s.u.size(); ++i)
    os << (i ? "," : "") << s.u[i];
  os << ") v=(";
  for (std::size_t a = 0; a < s.v.size(); ++a)
    os << (a ? "," : "") << s.v[a];
  os << ")";
  return os.str();
}

std::string parts_str(const std::vector<int>& k) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ")";
  return os.str();
}

// (num_z;q)_k / (den_z;q)_k with a guarded denominator
ExactRational poch_ratio(const ExactRational& num_z,
                         const ExactRational& den_z, const ExactRational& q,
                         int k) {
  const ExactRational den = q_pochhammer(den_z, q, k);
  if (den == 0)
    throw ZeroDenominator("duality summand: Pochhammer denominator vanishes");
  return q_pochhammer(num_z, q, k) / den;
}

void validate_sample(const HypSample& s, int n) {
  if (n < 1 || static_cast<int>(s.u.size()) != n ||
      static_cast<int>(s.v.size()) != n)
    throw ConfigError("sample: u and v must both have length n >= 1");
  if (s.q == 0 || s.q == 1)
    throw ConfigError("sample: q must avoid 0 and 1");
  if (s.t == 0) throw ConfigError("sample: t must be nonzero");
  for (const auto& x : s.u)
    if (x == 0) throw ConfigError("sample: u entries must be nonzero");
  for (const auto& x : s.v)
    if (x == 0) throw ConfigError("sample: v entries must be nonzero");
}

std::vector<qnf::Rat> sample_values(const qnf::VarTable& vt,
                                    const HypSample& s) {
  std::vector<qnf::Rat> vals(std::size_t(vt.nvars()));
  vals[std::size_t(vt.q())] = s.q;
  vals[std::size_t(vt.t())] = s.t;
  for (int i = 0; i < vt.n; ++i)
    vals[std::size_t(vt.u(i))] = s.u[std::size_t(i)];
  for (int a = 0; a < vt.n; ++a)
    vals[std::size_t(vt.v(a))] = s.v[std::size_t(a)];
  return vals;
}

ExactRational random_rational(SplitMix64& rng) {
  long num = 0;
  while (num == 0) num = static_cast<long>(rng.next() % 129) - 64;
  const long den = static_cast<long>(rng.next() % 64) + 1;
  return ExactRational(num, den);
}

}  // namespace

ExactRational theorem2_side(IdentitySide side, const HypSample& s, int K) {
  const int n = static_cast<int>(s.u.size());
  validate_sample(s, n);
  if (K < 0) throw ConfigError("theorem2_side: K must be nonnegative");
  ExactRational total(0);
  for (const auto& comp : compositions(n, K)) {
    const auto& k = comp.parts;
    ExactRational term(1);
    if (side == IdentitySide::left) {
      for (int i = 0; i < n; ++i)
        term *= poch_ratio(s.q * s.t, s.q, s.q, k[std::size_t(i)]);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const ExactRational base = qnf::rat_pow(s.q, -k[std::size_t(j)]) *
                                     s.u[std::size_t(i)] / s.u[std::size_t(j)];
          term *= poch_ratio(base / s.t, base, s.q, k[std::size_t(i)]);
        }
      for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j) {
          const ExactRational base = s.u[std::size_t(j)] / s.v[std::size_t(a)];
          term *= poch_ratio(s.t * base, base, s.q, k[std::size_t(j)]);
        }
    } else {
      for (int a = 0; a < n; ++a)
        term *= poch_ratio(s.q * s.t, s.q, s.q, k[std::size_t(a)]);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a == b) continue;
          const ExactRational base = qnf::rat_pow(s.q, -k[std::size_t(a)]) *
                                     s.v[std::size_t(a)] / s.v[std::size_t(b)];
          term *= poch_ratio(base / s.t, base, s.q, k[std::size_t(b)]);
        }
      for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j) {
          const ExactRational base = s.u[std::size_t(j)] / s.v[std::size_t(a)];
          term *= poch_ratio(s.t * base, base, s.q, k[std::size_t(a)]);
        }
    }
    total += term;
  }
  return total;
}

Report verify_theorem2(int n, int K, int trials, std::uint64_t seed) {
  Report rep{"duality identity n=" + std::to_string(n) +
             " K=" + std::to_string(K)};
  SplitMix64 rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    bool done = false;
    for (int attempt = 0; attempt < 200 && !done; ++attempt) {
      HypSample s;
      s.q = random_rational(rng);
      if (s.q == 1) continue;
      s.t = random_rational(rng);
      for (int i = 0; i < n; ++i) s.u.push_back(random_rational(rng));
      for (int a = 0; a < n; ++a) s.v.push_back(random_rational(rng));
      try {
        const ExactRational lhs = theorem2_side(IdentitySide::left, s, K);
        const ExactRational rhs = theorem2_side(IdentitySide::right, s, K);
        const bool ok = (lhs == rhs);
        rep.add("trial " + std::to_string(trial), ok, describe(s));
        if (!ok)
          throw IdentityViolation("duality identity violated at " +
                                  describe(s) + " K=" + std::to_string(K));
        done = true;
      } catch (const ZeroDenominator&) {
        // degenerate coincidence in a Pochhammer denominator; redraw
      }
    }
    if (!done)
      throw ConfigError("verify_theorem2: no nondegenerate sample in 200 draws");
  }
  return rep;
}

Report verify_pochhammer_lemmas(const ExactRational& u,
                                const ExactRational& q, int m, int n, int p) {
  if (q == 0 || u == 0)
    throw ConfigError("verify_pochhammer_lemmas: q and u must be nonzero");
  Report rep{"bracket shift lemmas m=" + std::to_string(m) +
             " n=" + std::to_string(n) + " p=" + std::to_string(p)};
  const int nv = 2;  // 0 = q, 1 = u
  const std::vector<qnf::Rat> vals{q, u};
  auto arg_up = [&](int qpow) {
    qnf::Monomial mo(nv);
    mo.te[0] = 2 * qpow;
    mo.te[1] = 2;
    return mo;
  };
  auto arg_uinv = [&](int qpow) {
    qnf::Monomial mo(nv);
    mo.te[0] = 2 * qpow;
    mo.te[1] = -2;
    return mo;
  };
  {
    const qnf::Product lhs =
        qnf::mul(qnf::bracket_product(nv, arg_up(p), m),
                 qnf::bracket_product(nv, arg_up(0), n));
    const qnf::Product rhs =
        qnf::mul(qnf::bracket_product(nv, arg_up(p), n - p),
                 qnf::bracket_product(nv, arg_up(0), m + p));
    const auto l = qnf::eval_split(lhs, vals);
    const auto r = qnf::eval_split(rhs, vals);
    rep.add("forward shift", l == r,
            rat_str(l.value) + " vs " + rat_str(r.value));
  }
  {
    const qnf::Product lhs =
        qnf::mul(qnf::bracket_product(nv, arg_up(1), m),
                 qnf::bracket_product(nv, arg_uinv(-(m + p)), n));
    qnf::Product rhs =
        qnf::mul(qnf::bracket_product(nv, arg_up(1), m + p),
                 qnf::bracket_product(nv, arg_uinv(-m), n - p));
    if (p % 2 != 0) rhs.pre.coeff = -rhs.pre.coeff;
    const auto l = qnf::eval_split(lhs, vals);
    const auto r = qnf::eval_split(rhs, vals);
    rep.add("inversion shift", l == r,
            rat_str(l.value) + " vs " + rat_str(r.value));
  }
  return rep;
}

namespace {

bool in_pole_set_first(const std::vector<int>& k, int p) {
  return k[0] >= k[1] + 1 - p && k[1] >= p;
}

bool in_pole_set_second(const std::vector<int>& k, int p) {
  return k[0] >= -p && k[1] >= k[0] + 1 + p;
}

std::vector<int> pair_swap(const std::vector<int>& k, int p) {
  std::vector<int> out = k;
  out[0] = k[1] - p;
  out[1] = k[0] + p;
  return out;
}

}  // namespace

Report verify_lemma_p1(int n, int K, int p, const HypSample& s) {
  validate_sample(s, n);
  if (n < 2) throw ConfigError("verify_lemma_p1: needs n >= 2");
  if (p < 1 || p > K - 1)
    throw ConfigError("verify_lemma_p1: pole index p must satisfy 1 <= p <= K-1");
  Report rep{"residue pairing n=" + std::to_string(n) +
             " K=" + std::to_string(K) + " p=" + std::to_string(p)};
  const qnf::VarTable vt{n};
  const qnf::Slots slots = qnf::default_slots(vt);
  const auto vals = sample_values(vt, s);

  // pole of the left summands: u1 = q^p u2
  qnf::Monomial point_u(vt.nvars());
  point_u.te[std::size_t(vt.q())] = 2 * p;
  point_u.te[std::size_t(vt.u(1))] = 2;
  // pole of the right summands: v2 = q^p v1
  qnf::Monomial point_v(vt.nvars());
  point_v.te[std::size_t(vt.q())] = 2 * p;
  point_v.te[std::size_t(vt.v(0))] = 2;

  int paired = 0;
  for (const auto& comp : compositions(n, K)) {
    const auto& k = comp.parts;
    if (in_pole_set_first(k, p)) {
      const std::vector<int> kk = pair_swap(k, p);
      const bool partner_ok = in_pole_set_second(kk, p) &&
                              pair_swap(kk, p) == k;
      rep.add("pairing bijection at k=" + parts_str(k), partner_ok,
              "partner " + parts_str(kk));
      const qnf::Rat ru = qnf::residue(qnf::build_U(vt, k, slots), vt.u(0),
                                       point_u, vals) +
                          qnf::residue(qnf::build_U(vt, kk, slots), vt.u(0),
                                       point_u, vals);
      rep.add("left residue pair at k=" + parts_str(k), ru == 0, rat_str(ru));
      const qnf::Rat rv = qnf::residue(qnf::build_V(vt, k, slots), vt.v(1),
                                       point_v, vals) +
                          qnf::residue(qnf::build_V(vt, kk, slots), vt.v(1),
                                       point_v, vals);
      rep.add("right residue pair at k=" + parts_str(k), rv == 0, rat_str(rv));
      ++paired;
    } else if (!in_pole_set_second(k, p)) {
      const qnf::Rat ru =
          qnf::residue(qnf::build_U(vt, k, slots), vt.u(0), point_u, vals);
      rep.add("regular left summand at k=" + parts_str(k), ru == 0,
              rat_str(ru));
      const qnf::Rat rv =
          qnf::residue(qnf::build_V(vt, k, slots), vt.v(1), point_v, vals);
      rep.add("regular right summand at k=" + parts_str(k), rv == 0,
              rat_str(rv));
    }
  }
  if (paired == 0)
    throw ConfigError("verify_lemma_p1: empty pole index set for these (K,p)");
  if (!rep.pass)
    throw IdentityViolation("residue pairing violated at " + describe(s));
  return rep;
}

Report verify_lemma_2p(int n, int k1, int p, const HypSample& s) {
  validate_sample(s, n);
  if (n < 2) throw ConfigError("verify_lemma_2p: needs n >= 2");
  if (p < 1 || p > k1)
    throw ConfigError("verify_lemma_2p: needs 1 <= p <= k1");
  Report rep{"residue recursion n=" + std::to_string(n) +
             " k1=" + std::to_string(k1) + " p=" + std::to_string(p)};
  const qnf::VarTable vt{n};
  const qnf::Slots slots = qnf::default_slots(vt);
  const auto vals = sample_values(vt, s);

  // residue point v1 = q^{p-1} u1
  qnf::Monomial point(vt.nvars());
  point.te[std::size_t(vt.q())] = 2 * (p - 1);
  point.te[std::size_t(vt.u(0))] = 2;
  auto vals2 = vals;
  vals2[std::size_t(vt.v(0))] =
      qnf::rat_pow(s.q, p - 1) * s.u[0];

  // shifted slot tuples (q v1, u') and (q^{-1} u1, v')
  qnf::Slots shifted = slots;
  {
    qnf::Monomial qv1(vt.nvars());
    qv1.te[std::size_t(vt.q())] = 2;
    qv1.te[std::size_t(vt.v(0))] = 2;
    shifted.u[0] = qv1;
    qnf::Monomial qinv_u1(vt.nvars());
    qinv_u1.te[std::size_t(vt.q())] = -2;
    qinv_u1.te[std::size_t(vt.u(0))] = 2;
    shifted.v[0] = qinv_u1;
  }
  const qnf::Product phi = qnf::build_phi(vt, p);
  const qnf::Rat phi_val = qnf::eval(phi, vals2);

  for (int rest = 0; rest <= 2; ++rest) {
    for (const auto& comp : compositions(n - 1, rest)) {
      std::vector<int> k{k1};
      k.insert(k.end(), comp.parts.begin(), comp.parts.end());
      std::vector<int> k_shift{k1 - p};
      k_shift.insert(k_shift.end(), comp.parts.begin(), comp.parts.end());
      {
        qnf::Product lhs = qnf::build_V(vt, k, slots);
        lhs.pre.te[std::size_t(vt.v(0))] -= 2;  // the 1/v1 prefactor
        const qnf::Rat res = qnf::residue(lhs, vt.v(0), point, vals);
        const qnf::Rat rhs =
            phi_val * qnf::eval(qnf::build_V(vt, k_shift, shifted), vals2);
        rep.add("right recursion k'=" + parts_str(comp.parts), res == rhs,
                rat_str(res) + " vs " + rat_str(rhs));
      }
      {
        qnf::Product lhs = qnf::build_U(vt, k, slots);
        lhs.pre.te[std::size_t(vt.v(0))] -= 2;
        const qnf::Rat res = qnf::residue(lhs, vt.v(0), point, vals);
        const qnf::Rat rhs =
            phi_val * qnf::eval(qnf::build_U(vt, k_shift, shifted), vals2);
        rep.add("left recursion k'=" + parts_str(comp.parts), res == rhs,
                rat_str(res) + " vs " + rat_str(rhs));
      }
    }
  }
  if (!rep.pass)
    throw IdentityViolation("residue recursion violated at " + describe(s));
  return rep;
}

Report verify_involution(int n, int K, const HypSample& s) {
  validate_sample(s, n);
  Report rep{"summand involution n=" + std::to_string(n) +
             " K=" + std::to_string(K)};
  const qnf::VarTable vt{n};
  const qnf::Slots slots = qnf::default_slots(vt);
  const auto vals = sample_values(vt, s);
  auto vals_tau = vals;
  for (int i = 0; i < n; ++i) {
    vals_tau[std::size_t(vt.u(i))] =
        qnf::Rat(1) / vals[std::size_t(vt.v(i))];
    vals_tau[std::size_t(vt.v(i))] =
        qnf::Rat(1) / vals[std::size_t(vt.u(i))];
  }
  for (const auto& comp : compositions(n, K)) {
    const auto& k = comp.parts;
    const qnf::Rat u_at_tau = qnf::eval(qnf::build_U(vt, k, slots), vals_tau);
    const qnf::Rat v_here = qnf::eval(qnf::build_V(vt, k, slots), vals);
    rep.add("left-to-right at k=" + parts_str(k), u_at_tau == v_here,
            rat_str(u_at_tau) + " vs " + rat_str(v_here));
    const qnf::Rat v_at_tau = qnf::eval(qnf::build_V(vt, k, slots), vals_tau);
    const qnf::Rat u_here = qnf::eval(qnf::build_U(vt, k, slots), vals);
    rep.add("right-to-left at k=" + parts_str(k), v_at_tau == u_here,
            rat_str(v_at_tau) + " vs " + rat_str(u_here));
  }
  if (!rep.pass)
    throw IdentityViolation("summand involution violated at " + describe(s));
  return rep;
}

}  // namespace rslab
