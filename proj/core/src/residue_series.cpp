#include "rslab/residue_series.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "rslab/difference_ops.hpp"
#include "rslab/double_sine.hpp"
#include "rslab/errors.hpp"
#include "rslab/extended.hpp"
#include "rslab/q_identities.hpp"

namespace rslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::string subset_str(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

// Residue hosts and spectators, both multiplied by i. For the downward
// series the hosts fill the z-slots of the closed forms; for the upward
// series they fill the x-slots.
struct HostSlots {
  std::vector<cplx> host;   // i * z[subset[a]]
  std::vector<cplx> spect;  // i * z[complement]
};

void validate_index(const ResidueIndex& idx, std::size_t z_size) {
  if (z_size == 0 || z_size % 2 != 0)
    throw ConfigError("residue term: need an even, non-empty z tuple");
  const std::size_t n = z_size / 2;
  if (idx.subset.size() != n || idx.m1.size() != n || idx.m2.size() != n)
    throw ConfigError("residue term: subset and lattice counts must have n entries");
  for (std::size_t a = 0; a < n; ++a) {
    if (idx.subset[a] < 0 || idx.subset[a] >= int(z_size))
      throw ConfigError("residue term: subset entry out of range");
    if (a > 0 && idx.subset[a] <= idx.subset[a - 1])
      throw ConfigError("residue term: subset must be strictly increasing");
    if (idx.m1[a] < 0 || idx.m2[a] < 0)
      throw ConfigError("residue term: lattice counts must be non-negative");
  }
}

HostSlots make_slots(const std::vector<int>& subset,
                     const std::vector<cplx>& z) {
  const cplx iu(0.0, 1.0);
  HostSlots s;
  std::vector<char> in(z.size(), 0);
  for (int a : subset) in[std::size_t(a)] = 1;
  for (int a : subset) s.host.push_back(iu * z[std::size_t(a)]);
  for (std::size_t j = 0; j < z.size(); ++j)
    if (!in[j]) s.spect.push_back(iu * z[j]);
  return s;
}

std::vector<int> complement_of(const std::vector<int>& subset, int size) {
  std::vector<char> in(std::size_t(size), 0);
  for (int a : subset) in[std::size_t(a)] = 1;
  std::vector<int> out;
  for (int j = 0; j < size; ++j)
    if (!in[std::size_t(j)]) out.push_back(j);
  return out;
}

// Simple-pole genericity guard: every i-scaled difference of z-coordinates,
// and every difference of two such differences, must stay at least `tol`
// away from the period lattice {j w1 + k w2}. Rejection keeps all closed
// forms below on simple poles only.
void require_generic(const std::vector<cplx>& z, const ModelParams& m,
                     double tol = 1e-6) {
  const cplx iu(0.0, 1.0);
  const cplx w1 = m.omega.omega1, w2 = m.omega.omega2;
  const double wmin = std::min(std::abs(w1), std::abs(w2));
  std::vector<cplx> diffs;
  diffs.push_back(cplx(0.0, 0.0));
  for (std::size_t a = 0; a < z.size(); ++a)
    for (std::size_t b = a + 1; b < z.size(); ++b)
      diffs.push_back(iu * (z[a] - z[b]));
  for (std::size_t p = 0; p < diffs.size(); ++p) {
    for (std::size_t q = 0; q < diffs.size(); ++q) {
      if (p == q) continue;
      const cplx t = diffs[p] - diffs[q];
      const int range = int(std::abs(t) / wmin) + 2;
      for (int j = -range; j <= range; ++j) {
        for (int k = -range; k <= range; ++k) {
          if (std::abs(t - (double(j) * w1 + double(k) * w2)) < tol) {
            std::ostringstream os;
            os << "coordinate differences collide with the period lattice"
               << " (offsets " << j << "," << k << ")";
            throw DegenerateConfiguration(os.str());
          }
        }
      }
    }
  }
}

void require_regime(const ModelParams& m) {
  if (!m.decay_positive())
    throw RegimeViolation("residue series: kernel decay rate nu_g must be positive");
}

cplx s2_or_throw(cplx arg, const ModelParams& m, const PrecisionPolicy& pol) {
  const cplx v = double_sine(arg, m.omega, pol);
  if (v == cplx(0.0, 0.0))
    throw DegenerateConfiguration("residue term: double sine vanished in a denominator");
  return v;
}

// m-independent prefactor shared by all coefficients of one subset's
// series; `sign` is -1 for the downward family and +1 for the upward one.
// The cross factors couple each host to each spectator with the coupling
// shift g* sitting on the host-to-spectator difference for the downward
// family and on the reversed difference for the upward one.
cplx series_prefactor(const HostSlots& s, const ModelParams& m, double sign,
                      const PrecisionPolicy& pol) {
  const std::size_t n = s.host.size();
  const cplx gs = m.gstar();
  const cplx unit = std::sqrt(m.omega.omega1 * m.omega.omega2) /
                    (cplx(0.0, sign * 2.0 * kPi) * s2_or_throw(gs, m, pol));
  cplx pref(1.0, 0.0);
  for (std::size_t a = 0; a < n; ++a) pref *= unit;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      const cplx d = (sign < 0.0) ? s.host[a] - s.spect[i]
                                  : s.spect[i] - s.host[a];
      pref /= s2_or_throw(d + gs, m, pol);
      pref /= s2_or_throw(-d, m, pol);
    }
  }
  return pref;
}

cplx bracket_ratio(cplx arg_num, cplx arg_den, long m1, long m2,
                   const ModelParams& m) {
  const cplx den = hyp_pochhammer_product(arg_den, m1, m2, m);
  if (den == cplx(0.0, 0.0))
    throw DegenerateConfiguration("residue term: Pochhammer denominator vanished");
  return hyp_pochhammer_product(arg_num, m1, m2, m) / den;
}

// Lattice-count-dependent part of a downward coefficient. Hosts play the
// role of the residue-carrying coordinates.
cplx down_block(const HostSlots& s, const std::vector<long>& m1,
                const std::vector<long>& m2, const ModelParams& m) {
  const std::size_t n = s.host.size();
  const cplx gs = m.gstar();
  const cplx ws = m.omega.sum();
  const cplx w1 = m.omega.omega1, w2 = m.omega.omega2;
  cplx acc(1.0, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    acc *= bracket_ratio(gs, ws, m1[a], m2[a], m);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const cplx shift =
          double(m1[b]) * w1 + double(m2[b]) * w2;
      acc *= bracket_ratio(s.host[a] - s.host[b] + m.g - shift,
                           s.host[a] - s.host[b] - shift, m1[a], m2[a], m);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < n; ++a)
      acc *= bracket_ratio(s.host[a] - s.spect[i] + gs,
                           s.host[a] - s.spect[i] + ws, m1[a], m2[a], m);
  return acc;
}

// Upward counterpart. The index pattern transposes relative to down_block:
// the argument shift of the host-host ratio takes the first factor's
// counts while the symbol length takes the second's.
cplx up_block(const HostSlots& s, const std::vector<long>& m1,
              const std::vector<long>& m2, const ModelParams& m) {
  const std::size_t n = s.host.size();
  const cplx gs = m.gstar();
  const cplx ws = m.omega.sum();
  const cplx w1 = m.omega.omega1, w2 = m.omega.omega2;
  cplx acc(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    acc *= bracket_ratio(gs, ws, m1[i], m2[i], m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const cplx shift =
          double(m1[i]) * w1 + double(m2[i]) * w2;
      acc *= bracket_ratio(s.host[i] - s.host[j] + m.g - shift,
                           s.host[i] - s.host[j] - shift, m1[j], m2[j], m);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < n; ++a)
      acc *= bracket_ratio(s.spect[a] - s.host[i] + gs,
                           s.spect[a] - s.host[i] + ws, m1[i], m2[i], m);
  return acc;
}

cplx sine_tail(long m1, long m2, const ModelParams& m) {
  const cplx w1 = m.omega.omega1, w2 = m.omega.omega2;
  cplx acc(1.0, 0.0);
  for (long j = 1; j <= m1; ++j) acc *= 2.0 * std::sin(kPi * double(j) * w1 / w2);
  for (long l = 1; l <= m2; ++l) acc *= 2.0 * std::sin(kPi * double(l) * w2 / w1);
  return acc;
}

std::vector<long> to_long(const std::vector<int>& v) {
  return std::vector<long>(v.begin(), v.end());
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= double(i);
  return f;
}

// --- double-zero machinery -------------------------------------------------

// y-coordinates (not i-scaled) of one shift-symmetrised summand. Bit 2j of
// `mask` swaps the w1-offsets of pair j, bit 2j+1 the w2-offsets.
std::vector<cplx> coincidence_points(const CoincidenceConfig& cfg,
                                     const ModelParams& m, double eps,
                                     unsigned mask) {
  const cplx w1 = m.omega.omega1, w2 = m.omega.omega2;
  const cplx mi(0.0, -1.0);
  std::vector<cplx> y;
  for (std::size_t j = 0; j < cfg.pairs.size(); ++j) {
    const CoincidencePair& pr = cfg.pairs[j];
    const bool sw1 = (mask >> (2 * j)) & 1u;
    const bool sw2 = (mask >> (2 * j + 1)) & 1u;
    const int a1 = sw1 ? pr.q1 : pr.p1;
    const int a2 = sw2 ? pr.q2 : pr.p2;
    const int b1 = sw1 ? pr.p1 : pr.q1;
    const int b2 = sw2 ? pr.p2 : pr.q2;
    y.push_back(mi * (pr.base + eps + double(a1) * w1 + double(a2) * w2));
    y.push_back(mi * (pr.base + double(b1) * w1 + double(b2) * w2));
  }
  for (const cplx& sp : cfg.spectators) y.push_back(sp);
  return y;
}

void validate_coincidence(const CoincidenceConfig& cfg) {
  const int k = int(cfg.pairs.size());
  if (k < 1) throw ConfigError("double_zero_check: need at least one pair");
  if (cfg.n < 2 * k)
    throw ConfigError("double_zero_check: n must accommodate 2k paired variables");
  if (int(cfg.spectators.size()) != cfg.n - 2 * k)
    throw ConfigError("double_zero_check: spectator count must be n - 2k");
  if (cfg.z.size() != std::size_t(2 * cfg.n))
    throw ConfigError("double_zero_check: z must have 2n entries");
}

// Per-slot lattice displacement of i y relative to the mask-0 points.
struct SlotShift {
  int d1 = 0, d2 = 0;
};

std::vector<SlotShift> slot_shifts(const CoincidenceConfig& cfg,
                                   unsigned mask) {
  std::vector<SlotShift> out(std::size_t(cfg.n));
  for (std::size_t j = 0; j < cfg.pairs.size(); ++j) {
    const CoincidencePair& pr = cfg.pairs[j];
    if ((mask >> (2 * j)) & 1u) {
      out[2 * j].d1 = pr.q1 - pr.p1;
      out[2 * j + 1].d1 = pr.p1 - pr.q1;
    }
    if ((mask >> (2 * j + 1)) & 1u) {
      out[2 * j].d2 = pr.q2 - pr.p2;
      out[2 * j + 1].d2 = pr.p2 - pr.q2;
    }
  }
  return out;
}

// S2(x + d1 w1 + d2 w2) / S2(x) as a product of elementary sines, from the
// period-shift identity S2(z + w1) = S2(z) / (2 sin(pi z / w2)) and its
// w2 counterpart. Exact up to rounding in the sines, so safe arbitrarily
// close to lattice points.
ext::mcplx s2_shift_ratio(ext::mcplx x, int d1, int d2,
                          const ext::mcplx& w1, const ext::mcplx& w2,
                          const ext::mreal& pi) {
  using ext::mcplx;
  mcplx r(1, 0);
  const auto two_sin = [&pi](const mcplx& t) {
    const mcplx s = 2 * sin(pi * t);
    if (s == mcplx(0, 0))
      throw DegenerateConfiguration(
          "coincidence sum: shift ratio hit an exact lattice point");
    return s;
  };
  while (d1 > 0) {
    r /= two_sin(x / w2);
    x += w1;
    --d1;
  }
  while (d1 < 0) {
    x -= w1;
    r *= two_sin(x / w2);
    ++d1;
  }
  while (d2 > 0) {
    r /= two_sin(x / w1);
    x += w2;
    --d2;
  }
  while (d2 < 0) {
    x -= w2;
    r *= two_sin(x / w1);
    ++d2;
  }
  return r;
}

// sum over masks of F(mask) / F(0), carried at extended precision. All
// arguments are built from the same double-rounded inputs, so the result is
// the exact shift-symmetrised sum for those inputs and the eps^{2k}
// cancellation is realised to ~45 digits.
ext::mcplx mask_ratio_sum(const CoincidenceConfig& cfg, const ModelParams& m,
                          double eps) {
  using ext::mcplx;
  using ext::mreal;
  const mreal pi = boost::math::constants::pi<mreal>();
  const mreal two_pi = 2 * pi;
  const mcplx w1 = ext::to_mp(m.omega.omega1);
  const mcplx w2 = ext::to_mp(m.omega.omega2);
  const mcplx gs = ext::to_mp(m.gstar());
  const mcplx half_gs = gs / 2;
  const mcplx lam = ext::to_mp(cfg.lambda);
  const std::size_t n = std::size_t(cfg.n);

  std::vector<mcplx> zeta(n);
  for (std::size_t j = 0; j < cfg.pairs.size(); ++j) {
    const CoincidencePair& pr = cfg.pairs[j];
    const mcplx base = ext::to_mp(pr.base);
    zeta[2 * j] = base + mreal(eps) + pr.p1 * w1 + pr.p2 * w2;
    zeta[2 * j + 1] = base + pr.q1 * w1 + pr.q2 * w2;
  }
  for (std::size_t s = 0; s < cfg.spectators.size(); ++s)
    zeta[2 * cfg.pairs.size() + s] = mcplx(0, 1) * ext::to_mp(cfg.spectators[s]);
  std::vector<mcplx> iz;
  for (const cplx& zz : cfg.z) iz.push_back(mcplx(0, 1) * ext::to_mp(zz));

  const unsigned terms = 1u << (2 * cfg.pairs.size());
  mcplx total(0, 0);
  for (unsigned mask = 0; mask < terms; ++mask) {
    const auto sh = slot_shifts(cfg, mask);
    mcplx sum_d(0, 0);
    for (const SlotShift& s : sh) sum_d += s.d1 * w1 + s.d2 * w2;
    mcplx rho = exp(two_pi * lam * sum_d);
    for (std::size_t i = 0; i < n; ++i) {
      if (sh[i].d1 == 0 && sh[i].d2 == 0) continue;
      for (const mcplx& za : iz) {
        const mcplx d = zeta[i] - za;
        rho /= s2_shift_ratio(d + half_gs, sh[i].d1, sh[i].d2, w1, w2, pi);
        rho /= s2_shift_ratio(-d + half_gs, -sh[i].d1, -sh[i].d2, w1, w2, pi);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const int dd1 = sh[i].d1 - sh[j].d1;
        const int dd2 = sh[i].d2 - sh[j].d2;
        if (dd1 == 0 && dd2 == 0) continue;
        const mcplx d = zeta[i] - zeta[j];
        rho *= s2_shift_ratio(d, dd1, dd2, w1, w2, pi);
        rho *= s2_shift_ratio(-d + gs, -dd1, -dd2, w1, w2, pi);
      }
    }
    total += rho;
  }
  return total;
}

double lsq_slope(const std::vector<double>& logx,
                 const std::vector<double>& logy) {
  const std::size_t n = logx.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += logx[i];
    my += logy[i];
  }
  mx /= double(n);
  my /= double(n);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (logx[i] - mx) * (logy[i] - my);
    den += (logx[i] - mx) * (logx[i] - mx);
  }
  return num / den;
}

}  // namespace

cplx residue_L_term(const ResidueIndex& idx, const std::vector<cplx>& z,
                    const ModelParams& m, const PrecisionPolicy& pol) {
  validate_index(idx, z.size());
  require_regime(m);
  require_generic(z, m);
  const HostSlots s = make_slots(idx.subset, z);
  return series_prefactor(s, m, -1.0, pol) * down_block(s, idx.m1, idx.m2, m);
}

cplx residue_L_term_raw(const ResidueIndex& idx, const std::vector<cplx>& z,
                        const ModelParams& m, const PrecisionPolicy& pol) {
  validate_index(idx, z.size());
  require_regime(m);
  require_generic(z, m);
  const HostSlots s = make_slots(idx.subset, z);
  const std::size_t n = s.host.size();
  const cplx gs = m.gstar();
  const cplx w1 = m.omega.omega1, w2 = m.omega.omega2;
  const cplx unit = std::sqrt(w1 * w2) / cplx(0.0, -2.0 * kPi);
  cplx acc(1.0, 0.0);
  for (std::size_t a = 0; a < n; ++a) acc *= unit;
  for (std::size_t a = 0; a < n; ++a) {
    const long m1 = idx.m1[a], m2 = idx.m2[a];
    const double sgn = ((m1 * m2 + m1 + m2) % 2 != 0) ? -1.0 : 1.0;
    acc *= sgn / s2_or_throw(gs + double(m1) * w1 + double(m2) * w2, m, pol);
    acc /= sine_tail(m1, m2, m);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const cplx d = s.host[a] - s.host[b];
      const cplx rel = double(idx.m1[a] - idx.m1[b]) * w1 +
                       double(idx.m2[a] - idx.m2[b]) * w2;
      acc *= double_sine(d + rel, m.omega, pol);
      acc *= double_sine(d + gs + rel, m.omega, pol);
      acc /= s2_or_throw(d + gs + double(idx.m1[a]) * w1 + double(idx.m2[a]) * w2,
                         m, pol);
      acc /= s2_or_throw(d - double(idx.m1[b]) * w1 - double(idx.m2[b]) * w2,
                         m, pol);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      const cplx d = s.host[a] - s.spect[i];
      acc /= s2_or_throw(d + gs + double(idx.m1[a]) * w1 + double(idx.m2[a]) * w2,
                         m, pol);
      acc /= s2_or_throw(-d - double(idx.m1[a]) * w1 - double(idx.m2[a]) * w2,
                         m, pol);
    }
  }
  return acc;
}

cplx residue_R_term(const ResidueIndex& idx, const std::vector<cplx>& z,
                    const ModelParams& m, const PrecisionPolicy& pol) {
  validate_index(idx, z.size());
  require_regime(m);
  require_generic(z, m);
  const HostSlots s = make_slots(idx.subset, z);
  return series_prefactor(s, m, 1.0, pol) * up_block(s, idx.m1, idx.m2, m);
}

cplx residue_R_term_raw(const ResidueIndex& idx, const std::vector<cplx>& z,
                        const ModelParams& m, const PrecisionPolicy& pol) {
  validate_index(idx, z.size());
  require_regime(m);
  require_generic(z, m);
  const HostSlots s = make_slots(idx.subset, z);
  const std::size_t n = s.host.size();
  const cplx gs = m.gstar();
  const cplx w1 = m.omega.omega1, w2 = m.omega.omega2;
  const cplx unit = std::sqrt(w1 * w2) / cplx(0.0, 2.0 * kPi);
  cplx acc(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) acc *= unit;
  for (std::size_t i = 0; i < n; ++i) {
    const long m1 = idx.m1[i], m2 = idx.m2[i];
    const double sgn = ((m1 * m2 + m1 + m2) % 2 != 0) ? -1.0 : 1.0;
    acc *= sgn / s2_or_throw(gs + double(m1) * w1 + double(m2) * w2, m, pol);
    acc /= sine_tail(m1, m2, m);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const cplx d = s.host[i] - s.host[j];
      const cplx rel = double(idx.m1[j] - idx.m1[i]) * w1 +
                       double(idx.m2[j] - idx.m2[i]) * w2;
      acc *= double_sine(d + rel, m.omega, pol);
      acc *= double_sine(d + gs + rel, m.omega, pol);
      acc /= s2_or_throw(d + gs + double(idx.m1[j]) * w1 + double(idx.m2[j]) * w2,
                         m, pol);
      acc /= s2_or_throw(d - double(idx.m1[i]) * w1 - double(idx.m2[i]) * w2,
                         m, pol);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      const cplx d = s.spect[a] - s.host[i];
      acc /= s2_or_throw(d + gs + double(idx.m1[i]) * w1 + double(idx.m2[i]) * w2,
                         m, pol);
      acc /= s2_or_throw(-d - double(idx.m1[i]) * w1 - double(idx.m2[i]) * w2,
                         m, pol);
    }
  }
  return acc;
}

Report verify_LR_equality(int n, int M, int K, const std::vector<cplx>& z,
                          const ModelParams& m, double rel_tol,
                          const PrecisionPolicy& pol) {
  if (n < 1 || M < 0 || K < 0)
    throw ConfigError("verify_LR_equality: need n >= 1 and M, K >= 0");
  if (z.size() != std::size_t(2 * n))
    throw ConfigError("verify_LR_equality: z must have 2n entries");
  require_regime(m);
  require_generic(z, m);

  Report rep{"residue complement pairing n=" + std::to_string(n) +
             " M=" + std::to_string(M) + " K=" + std::to_string(K)};
  const double sign = (n % 2 != 0) ? -1.0 : 1.0;
  const auto comps1 = compositions(n, M);
  const auto comps2 = compositions(n, K);

  double worst = 0.0;
  std::string worst_label;
  for (const auto& subset : subsets_of_size(2 * n, n)) {
    const auto comp = complement_of(subset, 2 * n);
    const HostSlots sl = make_slots(subset, z);
    const HostSlots sr = make_slots(comp, z);
    const cplx pref_l = series_prefactor(sl, m, -1.0, pol);
    const cplx pref_r = series_prefactor(sr, m, 1.0, pol);
    cplx block_l(0.0, 0.0), block_r(0.0, 0.0);
    for (const auto& c1 : comps1) {
      for (const auto& c2 : comps2) {
        const auto m1 = to_long(c1.parts);
        const auto m2 = to_long(c2.parts);
        block_l += down_block(sl, m1, m2, m);
        block_r += up_block(sr, m1, m2, m);
      }
    }
    const cplx lhs = pref_l * block_l;
    const cplx rhs = pref_r * block_r;
    const double scale =
        std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    const double rel = std::abs(lhs - sign * rhs) / scale;
    const bool ok = rel <= rel_tol;
    rep.add("subset " + subset_str(subset), ok, "rel=" + fmt(rel));
    if (rel > worst) {
      worst = rel;
      worst_label = subset_str(subset);
    }
  }
  if (!rep.pass)
    throw ToleranceExceeded("complement pairing failed, worst subset " +
                            worst_label + " rel=" + fmt(worst));
  return rep;
}

SeriesValue series_Q_sum(const std::vector<cplx>& z, cplx lambda,
                         const SeriesOrder& ord, const ModelParams& m,
                         const PrecisionPolicy& pol) {
  if (z.empty() || z.size() % 2 != 0)
    throw ConfigError("series_Q_sum: need an even, non-empty z tuple");
  if (ord.m_max < 0 || ord.k_max < 0)
    throw ConfigError("series_Q_sum: truncation orders must be non-negative");
  require_regime(m);
  require_generic(z, m);
  const int n = int(z.size() / 2);

  const cplx u = std::exp(2.0 * kPi * lambda * m.omega.omega1);
  const cplx v = std::exp(2.0 * kPi * lambda * m.omega.omega2);
  const double r = std::max(std::abs(u), std::abs(v));
  if (r >= 1.0)
    throw NonconvergentSeries("series_Q_sum: |u|=" + fmt(std::abs(u)) +
                              ", |v|=" + fmt(std::abs(v)) +
                              " not both below 1; Re lambda too large");

  std::vector<cplx> upow(std::size_t(ord.m_max) + 1), vpow(std::size_t(ord.k_max) + 1);
  upow[0] = vpow[0] = cplx(1.0, 0.0);
  for (int i = 1; i <= ord.m_max; ++i) upow[std::size_t(i)] = upow[std::size_t(i - 1)] * u;
  for (int i = 1; i <= ord.k_max; ++i) vpow[std::size_t(i)] = vpow[std::size_t(i - 1)] * v;

  std::vector<std::vector<Composition>> comps;
  for (int t = 0; t <= std::max(ord.m_max, ord.k_max); ++t)
    comps.push_back(compositions(n, t));

  cplx orient(1.0, 0.0);
  for (int i = 0; i < n; ++i) orient *= cplx(0.0, -2.0 * kPi);
  orient *= factorial(n);

  SeriesValue out;
  double edge = 0.0;
  for (const auto& subset : subsets_of_size(2 * n, n)) {
    const HostSlots s = make_slots(subset, z);
    cplx zsum(0.0, 0.0);
    for (int a : subset) zsum += z[std::size_t(a)];
    const cplx expo = std::exp(2.0 * kPi * lambda *
                               (double(n) * m.gstar() / 2.0 + cplx(0.0, 1.0) * zsum));
    const cplx pref = expo * orient * series_prefactor(s, m, -1.0, pol);
    for (int M = 0; M <= ord.m_max; ++M) {
      for (int K = 0; K <= ord.k_max; ++K) {
        cplx block(0.0, 0.0);
        for (const auto& c1 : comps[std::size_t(M)])
          for (const auto& c2 : comps[std::size_t(K)])
            block += down_block(s, to_long(c1.parts), to_long(c2.parts), m);
        const cplx term = pref * block * upow[std::size_t(M)] * vpow[std::size_t(K)];
        out.value += term;
        if (M == ord.m_max || K == ord.k_max) edge += std::abs(term);
      }
    }
  }
  out.tail_estimate = edge * r / (1.0 - r);
  return out;
}

cplx q_integrand_F(const std::vector<cplx>& y, const std::vector<cplx>& z,
                   cplx lambda, const ModelParams& m,
                   const PrecisionPolicy& pol) {
  if (y.empty() || z.size() != 2 * y.size())
    throw ConfigError("q_integrand_F: need n integration points and 2n coordinates");
  cplx sum_y(0.0, 0.0);
  for (const cplx& yi : y) sum_y += yi;
  const cplx phase = std::exp(cplx(0.0, 2.0 * kPi) * lambda * sum_y);
  return phase * kernel_product(m, z, y, pol) * measure_product(m, y, pol);
}

double coincidence_sum_magnitude(const CoincidenceConfig& cfg, double eps,
                                 const ModelParams& m) {
  validate_coincidence(cfg);
  if (!(eps > 0.0))
    throw ConfigError("coincidence_sum_magnitude: eps must be positive");
  if (cfg.pairs.size() == 1) {
    cplx sum(0.0, 0.0);
    for (unsigned mask = 0; mask < 4u; ++mask)
      sum += q_integrand_F(coincidence_points(cfg, m, eps, mask), cfg.z,
                           cfg.lambda, m);
    return std::abs(sum);
  }
  const double base = std::abs(q_integrand_F(
      coincidence_points(cfg, m, eps, 0), cfg.z, cfg.lambda, m));
  return base * static_cast<double>(abs(mask_ratio_sum(cfg, m, eps)));
}

Report double_zero_check(const CoincidenceConfig& cfg,
                         const std::vector<double>& eps_list,
                         const ModelParams& m) {
  const int k = int(cfg.pairs.size());
  validate_coincidence(cfg);
  if (eps_list.size() < 2)
    throw ConfigError("double_zero_check: need at least two epsilon values");
  for (double e : eps_list)
    if (!(e > 0.0)) throw ConfigError("double_zero_check: epsilons must be positive");

  Report rep{"double-zero cancellation k=" + std::to_string(k) +
             " n=" + std::to_string(cfg.n)};

  // Control: the integrand alone has a simple pole where one pair of
  // variables sits a measure-pole shift g apart. Uses the first two
  // variables and the first four coordinates; validates the slope fitter
  // before it judges the cancellation sum.
  {
    const cplx mi(0.0, -1.0);
    const std::vector<cplx> zc(cfg.z.begin(), cfg.z.begin() + 4);
    std::vector<double> lx, ly;
    for (double e : eps_list) {
      const cplx iy2 = cfg.pairs[0].base;
      const cplx iy1 = iy2 + m.g + e;
      const cplx f = q_integrand_F({mi * iy1, mi * iy2}, zc, cfg.lambda, m);
      lx.push_back(std::log(e));
      ly.push_back(std::log(std::abs(f)));
    }
    const double slope = lsq_slope(lx, ly);
    rep.add("control: single integrand at measure pole",
            std::abs(slope + 1.0) <= 0.1, "slope=" + fmt(slope));
  }

  std::vector<double> lx, ly;
  std::string mags;
  for (double e : eps_list) {
    const double mag = coincidence_sum_magnitude(cfg, e, m);
    lx.push_back(std::log(e));
    ly.push_back(std::log(mag));
    mags += (mags.empty() ? "" : " ") + fmt(mag);
  }
  const double slope = lsq_slope(lx, ly);
  const double target = 2.0 * k;
  const bool ok = std::abs(slope - target) <= 0.05 * target;
  rep.add("shift-symmetrised sum", ok,
          "slope=" + fmt(slope) + " target=" + fmt(target) + " |sums|=" + mags);
  if (!rep.pass)
    throw SlopeMismatch("double-zero check failed: fitted slope " + fmt(slope) +
                        ", expected " + fmt(target) + " within 5%");
  return rep;
}

}  // namespace rslab
