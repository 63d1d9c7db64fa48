#include "rslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "rslab/detail/quad.hpp"
#include "rslab/errors.hpp"
#include "rslab/rng.hpp"

namespace rslab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};

// relative interpolation allowance per table-backed integrand: five
// degree-7 stencil lookups at step = pole-distance / 20, each good to
// ~8e-9, rounded up
constexpr double kInterpRel = 6e-8;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt(cplx v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.12g%+.12gi", v.real(), v.imag());
  return buf;
}

cplx tuple_sum(const std::vector<cplx>& v) {
  cplx s(0.0, 0.0);
  for (const cplx& x : v) s += x;
  return s;
}

// ------------------------------------------------------------------
// Horizontal-line value tables with an 8-point (degree-7) Lagrange
// stencil. All kernel arguments of one box integral lie on a handful of
// lines Im = const; tabulating on those lines turns the ~100 us double
// sine evaluations into sub-microsecond lookups.
// ------------------------------------------------------------------

struct LineTable {
  double x0 = 0.0;
  double h = 1.0;
  std::vector<cplx> v;

  cplx eval(double x) const {
    static constexpr double w[8] = {1.0,  -7.0, 21.0,  -35.0,
                                    35.0, -21.0, 7.0,  -1.0};
    const double u = (x - x0) / h;
    long s = static_cast<long>(std::floor(u)) - 3;
    const long smax = static_cast<long>(v.size()) - 8;
    if (s < 0) s = 0;
    if (s > smax) s = smax;
    const double t = u - static_cast<double>(s);
    cplx num(0.0, 0.0);
    double den = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double d = t - k;
      if (std::abs(d) < 1e-9) return v[s + k];
      const double cw = w[k] / d;
      num += cw * v[s + k];
      den += cw;
    }
    return num / den;
  }
};

// grid step = (vertical distance to the nearest pole family) / 20
double table_step(double pole_dist, double scale, const char* what) {
  if (!(pole_dist > 0.02 * scale))
    throw StripExceeded(std::string(what) +
                        ": argument line too close to the pole lattice "
                        "for tabulation");
  return pole_dist / 20.0;
}

LineTable build_k_line(const ModelParams& m, double level, double lo,
                       double hi, const PrecisionPolicy& pol) {
  const double half_strip = 0.5 * m.gstar().real();
  const double h = table_step(half_strip - std::abs(level), half_strip,
                              "kernel table");
  LineTable t;
  t.h = h;
  t.x0 = lo - 4.0 * h;
  const std::size_t n =
      static_cast<std::size_t>(std::ceil((hi - t.x0) / h)) + 5;
  if (n > 600000)
    throw StripExceeded("kernel table: grid too fine for this line");
  t.v.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    t.v[k] = kernel_K(m, cplx(t.x0 + k * h, level), pol);
  return t;
}

LineTable build_mu_pair_line(const ModelParams& m, double level, double lo,
                             double hi, const PrecisionPolicy& pol) {
  const double strip = m.g.real();
  const double h =
      table_step(strip - std::abs(level), strip, "measure table");
  LineTable t;
  t.h = h;
  t.x0 = lo - 4.0 * h;
  const std::size_t n =
      static_cast<std::size_t>(std::ceil((hi - t.x0) / h)) + 5;
  if (n > 600000)
    throw StripExceeded("measure table: grid too fine for this line");
  t.v.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx w(t.x0 + k * h, level);
    t.v[k] = measure_mu(m, w, pol) * measure_mu(m, -w, pol);
  }
  return t;
}

struct TableSet {
  std::vector<LineTable> store;
  std::vector<const LineTable*> k_ai;  // indexed [a * n + i]
  const LineTable* mu01 = nullptr;
};

// ------------------------------------------------------------------
// Box integrand: y_i = t_i - i c_i on per-axis horizontal contours,
//   e^{2 pi i nu sum y} * prod_{a,i} K(z_a - y_i) * mu(y) * f(y).
// ------------------------------------------------------------------

struct BoxSpec {
  std::vector<cplx> zs;        // kernel sources
  std::vector<double> c;       // contour depths, Im y_i = -c_i
  std::vector<double> radius;  // box half-widths
  cplx nu{0.0, 0.0};           // phase rate of e^{2 pi i nu sum y}
  const AnalyticTestFunction* f = nullptr;
  const ModelParams* m = nullptr;
  PrecisionPolicy pol;
  const TableSet* tables = nullptr;

  int n() const { return static_cast<int>(c.size()); }
};

cplx eval_point(const BoxSpec& s, const double* t) {
  const int n = s.n();
  cplx y[2];
  cplx sumy(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    y[i] = cplx(t[i], -s.c[i]);
    sumy += y[i];
  }
  cplx val = std::exp(2.0 * kPi * kI * s.nu * sumy);
  if (s.tables) {
    const int na = static_cast<int>(s.zs.size());
    for (int a = 0; a < na; ++a)
      for (int i = 0; i < n; ++i)
        val *= s.tables->k_ai[a * n + i]->eval(s.zs[a].real() - t[i]);
    if (n == 2) val *= s.tables->mu01->eval(t[0] - t[1]);
  } else {
    std::vector<cplx> yv(y, y + n);
    val *= kernel_product(*s.m, s.zs, yv, s.pol);
    if (n >= 2) val *= measure_product(*s.m, yv, s.pol);
  }
  if (s.f) {
    std::vector<cplx> yv(y, y + n);
    val *= s.f->evaluator(yv);
  }
  return val;
}

bool tables_admissible(const BoxSpec& s) {
  return s.n() == 2 && s.m->real_periods() && s.m->g.imag() == 0.0;
}

TableSet build_tables(const BoxSpec& s) {
  TableSet tb;
  const int n = s.n();
  const int na = static_cast<int>(s.zs.size());
  double zlo = 0.0, zhi = 0.0;
  for (int a = 0; a < na; ++a) {
    zlo = std::min(zlo, s.zs[a].real());
    zhi = std::max(zhi, s.zs[a].real());
  }
  const double rmax = *std::max_element(s.radius.begin(), s.radius.end());
  const double lo = zlo - rmax - 1.5;
  const double hi = zhi + rmax + 1.5;

  // one K table per distinct argument line Im(z_a) + c_i
  std::map<long long, std::size_t> index;
  std::vector<double> levels;
  for (int a = 0; a < na; ++a)
    for (int i = 0; i < n; ++i) {
      const double level = s.zs[a].imag() + s.c[i];
      const long long key = std::llround(level * 1e9);
      if (!index.count(key) != 0) {
        index[key] = levels.size();
        levels.push_back(level);
      }
    }
  tb.store.reserve(levels.size() + 1);
  for (double level : levels)
    tb.store.push_back(build_k_line(*s.m, level, lo, hi, s.pol));
  if (n == 2) {
    const double mu_level = s.c[1] - s.c[0];
    const double span = s.radius[0] + s.radius[1] + 1.5;
    tb.store.push_back(
        build_mu_pair_line(*s.m, mu_level, -span, span, s.pol));
  }
  tb.k_ai.resize(static_cast<std::size_t>(na) * n);
  for (int a = 0; a < na; ++a)
    for (int i = 0; i < n; ++i) {
      const double level = s.zs[a].imag() + s.c[i];
      tb.k_ai[a * n + i] = &tb.store[index.at(std::llround(level * 1e9))];
    }
  if (n == 2) tb.mu01 = &tb.store.back();
  return tb;
}

// ------------------------------------------------------------------
// 1D adaptive integration with oscillation pre-segmentation: at most a
// few phase wavelengths per top-level segment, then Gauss-Kronrod
// bisection inside each.
// ------------------------------------------------------------------

struct LineResult {
  cplx value{0.0, 0.0};
  double err = 0.0;
};

template <class F>
LineResult integrate_line(F&& f, double a, double b, double abs_tol,
                          int depth, double osc_hint) {
  int segs = 1;
  if (osc_hint > 0.0) {
    const double radians = (b - a) * osc_hint;
    segs = std::min(4096, std::max(1, static_cast<int>(
                                          std::ceil(radians / 25.0))));
  }
  LineResult out;
  const double w = (b - a) / segs;
  const double tol_seg = abs_tol / segs;
  for (int k = 0; k < segs; ++k) {
    double e = 0.0;
    try {
      out.value += detail::adaptive_gk<cplx>(f, a + k * w, a + (k + 1) * w,
                                             tol_seg, depth, &e);
    } catch (const QuadratureFailure&) {
      throw ToleranceNotMet(
          "quadrature: panel refinement did not reach the requested "
          "tolerance (raise panel_tolerance or max_depth)");
    }
    out.err += e;
  }
  return out;
}

LineResult integrate_box(const BoxSpec& s, double panel_tol, int depth,
                         double osc_hint) {
  if (s.n() == 1) {
    auto f1 = [&s](double t) { return eval_point(s, &t); };
    return integrate_line(f1, -s.radius[0], s.radius[0], panel_tol, depth,
                          osc_hint);
  }
  const double r0 = s.radius[0];
  const double r1 = s.radius[1];
  const double tol_outer = panel_tol / 2.0;
  const double tol_inner = panel_tol / (8.0 * r0);
  double max_inner = 0.0;
  auto fouter = [&](double t0) {
    auto finner = [&](double t1) {
      const double t[2] = {t0, t1};
      return eval_point(s, t);
    };
    LineResult inner =
        integrate_line(finner, -r1, r1, tol_inner, depth, osc_hint);
    max_inner = std::max(max_inner, inner.err);
    return inner.value;
  };
  LineResult outer =
      integrate_line(fouter, -r0, r0, tol_outer, depth, osc_hint);
  outer.err += 2.0 * r0 * max_inner;
  return outer;
}

// ------------------------------------------------------------------
// Probing helpers. Base points sit slightly off the diagonal because the
// measure has a zero at coinciding coordinates, which would make an
// on-diagonal magnitude fit meaningless.
// ------------------------------------------------------------------

std::vector<double> base_point(int n) {
  std::vector<double> d(n, 0.0);
  if (n >= 2) {
    d[0] = 0.25;
    d[1] = -0.25;
  }
  return d;
}

double probe_mag(const BoxSpec& s, const std::vector<double>& t) {
  return std::abs(eval_point(s, t.data()));
}

// outward search along each axis until the integrand magnitude stays
// below `floor_mag` twice in a row
std::vector<double> probe_radii(const BoxSpec& s, double floor_mag) {
  const int n = s.n();
  double zmax = 0.0;
  for (const cplx& z : s.zs) zmax = std::max(zmax, std::abs(z.real()));
  std::vector<double> radii(n, 0.0);
  for (int k = 0; k < n; ++k) {
    std::vector<double> t = base_point(n);
    double r = 2.0 + zmax;
    int below = 0;
    for (int step = 0; step < 60; ++step) {
      t[k] = r;
      const double up = probe_mag(s, t);
      t[k] = -r;
      const double dn = probe_mag(s, t);
      below = (std::max(up, dn) < floor_mag) ? below + 1 : 0;
      if (below >= 2) break;
      r *= 1.5;
      if (r > 1e4)
        throw ToleranceNotMet(
            "quadrature: integrand does not decay below the tolerance "
            "floor within the probe range");
    }
    radii[k] = 1.15 * r + 0.5;
  }
  return radii;
}

// crude face-probe tail estimate: largest magnitude on the box faces
// times the face areas times a unit decay length (integrands here decay
// at least exponentially with rate >= 1 once truncation is sensible)
double face_tail(const BoxSpec& s) {
  const int n = s.n();
  double cutoff = 0.0;
  for (int k = 0; k < n; ++k) {
    std::vector<double> t = base_point(n);
    t[k] = s.radius[k];
    cutoff = std::max(cutoff, probe_mag(s, t));
    t[k] = -s.radius[k];
    cutoff = std::max(cutoff, probe_mag(s, t));
  }
  double faces = 0.0;
  for (int k = 0; k < n; ++k) {
    double area = 2.0;
    for (int j = 0; j < n; ++j)
      if (j != k) area *= 2.0 * s.radius[j];
    faces += area;
  }
  return cutoff * faces;
}

// envelope-weighted magnitude max over base and face probes, for the
// exponential-envelope constant of the symmetric integrand
double fit_envelope_constant(const BoxSpec& s, double rho) {
  const int n = s.n();
  std::vector<double> base = base_point(n);
  auto weighted = [&](const std::vector<double>& t) {
    double sum_abs = 0.0;
    for (int i = 0; i < n; ++i) sum_abs += std::abs(t[i]);
    return probe_mag(s, t) * std::exp(rho * sum_abs);
  };
  double c = weighted(base);
  for (int k = 0; k < n; ++k)
    for (double frac : {0.5, 1.0})
      for (double sign : {1.0, -1.0}) {
        std::vector<double> t = base;
        t[k] = sign * frac * s.radius[k];
        c = std::max(c, weighted(t));
      }
  return c;
}

double envelope_tail(double c, double rho, const std::vector<double>& radii) {
  double tail = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double term = 2.0 * std::exp(-rho * radii[i]) / rho;
    for (std::size_t j = 0; j < radii.size(); ++j)
      if (j != i) term *= 2.0 / rho;
    tail += term;
  }
  return c * tail;
}

std::vector<double> broadcast_radii(const IntegrationPlan& plan, int n,
                                    const char* who) {
  if (!(plan.panel_tolerance > 0.0))
    throw ConfigError(std::string(who) + ": panel_tolerance must be positive");
  if (plan.max_depth < 1)
    throw ConfigError(std::string(who) + ": max_depth must be at least 1");
  const std::size_t k = plan.truncation_radius.size();
  if (k != 1 && k != static_cast<std::size_t>(n))
    throw ConfigError(std::string(who) +
                      ": truncation_radius needs one entry or one per axis");
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    r[i] = plan.truncation_radius[k == 1 ? 0 : i];
    if (!(r[i] > 0.0))
      throw ConfigError(std::string(who) +
                        ": truncation radii must be positive");
  }
  return r;
}

int validate_q_inputs(const std::vector<cplx>& z2n, cplx lambda,
                      const ModelParams& m, const char* who) {
  if (z2n.empty() || z2n.size() % 2 != 0)
    throw ConfigError(std::string(who) +
                      ": need a nonempty even tuple of external coordinates");
  const int n = static_cast<int>(z2n.size()) / 2;
  if (n > 2)
    throw ConfigError(std::string(who) +
                      ": n >= 3 is not supported (cost grows geometrically "
                      "with the dimension)");
  for (const cplx& z : z2n)
    if (z.imag() != 0.0)
      throw ConfigError(std::string(who) +
                        ": external coordinates must be real");
  if (!(m.nu_g() > std::abs(lambda.imag())))
    throw RegimeViolation(std::string(who) +
                          ": requires |Im lambda| < nu_g for convergence");
  return n;
}

QuadratureValue integrate_q_impl(const std::vector<cplx>& z2n, cplx lambda,
                                 const ModelParams& m,
                                 const IntegrationPlan& plan,
                                 const PrecisionPolicy& pol,
                                 bool allow_tables) {
  const int n = validate_q_inputs(z2n, lambda, m, "integrate_Q");
  BoxSpec s;
  s.zs = z2n;
  s.c.assign(n, 0.0);
  s.radius = broadcast_radii(plan, n, "integrate_Q");
  s.nu = lambda;
  s.m = &m;
  s.pol = pol;

  const double rho = 2.0 * kPi * (m.nu_g() - std::abs(lambda.imag()));
  const double c_env = fit_envelope_constant(s, rho);
  const double rmin = *std::min_element(s.radius.begin(), s.radius.end());
  if (c_env * std::exp(-rho * rmin) > 10.0 * plan.panel_tolerance)
    throw ConfigError(
        "integrate_Q: truncation radius too small, the decay envelope is "
        "still above panel_tolerance at the cutoff");

  TableSet tb;
  if (allow_tables && tables_admissible(s)) {
    tb = build_tables(s);
    s.tables = &tb;
  }
  LineResult r =
      integrate_box(s, plan.panel_tolerance, plan.max_depth,
                    plan.oscillation_hint);
  const double tail = envelope_tail(c_env, rho, s.radius);
  if (r.err + tail > 60.0 * plan.panel_tolerance)
    throw ToleranceNotMet(
        "integrate_Q: accumulated error estimate exceeds the requested "
        "panel tolerance budget");
  double err = r.err + tail;
  if (s.tables) err += kInterpRel * std::abs(r.value);
  return {r.value, err};
}

// Operator-form integral (Q_n(lambda) applied through kernel sources ws on
// per-axis contours c): prefactor e^{2 pi i lambda sum w} times the box
// integral of e^{-2 pi i lambda sum y} K(w,y) mu(y) extra(y).
QuadratureValue operator_integral(const std::vector<cplx>& ws,
                                  const std::vector<double>& c, cplx lambda,
                                  const AnalyticTestFunction* extra,
                                  const ModelParams& m, double panel_tol,
                                  int max_depth, const PrecisionPolicy& pol,
                                  const std::vector<double>* fixed_radii) {
  BoxSpec s;
  s.zs = ws;
  s.c = c;
  s.nu = -lambda;
  s.f = extra;
  s.m = &m;
  s.pol = pol;
  s.radius = fixed_radii ? *fixed_radii
                         : probe_radii(s, panel_tol * 1e-3);
  TableSet tb;
  if (tables_admissible(s)) {
    tb = build_tables(s);
    s.tables = &tb;
  }
  LineResult r = integrate_box(s, panel_tol, max_depth,
                               2.0 * kPi * std::abs(lambda.real()));
  const double tail = face_tail(s);
  if (r.err + tail > 60.0 * panel_tol)
    throw ToleranceNotMet(
        "operator quadrature: accumulated error estimate exceeds the "
        "requested panel tolerance budget");
  double err = r.err + tail;
  if (s.tables) err += kInterpRel * std::abs(r.value);
  const cplx pref = std::exp(2.0 * kPi * kI * lambda * tuple_sum(ws));
  return {pref * r.value, std::abs(pref) * err};
}

void require_real(const std::vector<cplx>& z, const char* who) {
  for (const cplx& v : z)
    if (v.imag() != 0.0)
      throw ConfigError(std::string(who) + ": coordinates must be real");
}

}  // namespace

// ------------------------------------------------------------------
// ConeSpec
// ------------------------------------------------------------------

double ConeSpec::alpha(const ModelParams& m) const {
  const cplx ghat = m.g / (m.omega.omega1 * m.omega.omega2);
  if (!(ghat.real() > 0.0))
    throw RegimeViolation("ConeSpec: requires nu_g > 0");
  const double tan_phi_g = ghat.imag() / ghat.real();
  return std::abs(tan_phi_g * std::tan(sigma));
}

double ConeSpec::decay_margin(int n, double theta,
                              const ModelParams& m) const {
  if (n < 1) throw ConfigError("ConeSpec: n must be positive");
  if (!(sigma >= 0.0 && sigma < kPi / 2.0))
    throw ConfigError("ConeSpec: cone angle must lie in [0, pi/2)");
  return 2.0 * kPi * m.nu_g() * (1.0 - (2.0 * n - 1.0) * alpha(m)) -
         std::abs(theta);
}

void ConeSpec::require_valid(int n, double theta,
                             const ModelParams& m) const {
  const double margin = decay_margin(n, theta, m);
  if (!(margin > epsilon))
    throw RegimeViolation(
        "ConeSpec: decay margin " + fmt(margin) +
        " does not exceed the declared epsilon " + fmt(epsilon) +
        " (narrow the cone or reduce |Im lambda|)");
}

// ------------------------------------------------------------------
// Plan factories
// ------------------------------------------------------------------

IntegrationPlan plan_for_Q_integral(const std::vector<cplx>& z2n, cplx lambda,
                                    const ModelParams& m,
                                    double panel_tolerance, int max_depth,
                                    const PrecisionPolicy& pol) {
  const int n = validate_q_inputs(z2n, lambda, m, "plan_for_Q_integral");
  if (!(panel_tolerance > 0.0))
    throw ConfigError("plan_for_Q_integral: panel_tolerance must be positive");
  const double rho = 2.0 * kPi * (m.nu_g() - std::abs(lambda.imag()));
  double zmax = 0.0;
  for (const cplx& z : z2n) zmax = std::max(zmax, std::abs(z.real()));

  BoxSpec s;
  s.zs = z2n;
  s.c.assign(n, 0.0);
  s.nu = lambda;
  s.m = &m;
  s.pol = pol;

  auto radius_from = [&](double c_env) {
    return std::max(2.0, std::log(std::max(c_env / panel_tolerance, 10.0)) /
                             rho +
                             1.0) +
           zmax;
  };
  // bootstrap: base-point constant, provisional radius, then refit the
  // constant from probes at that radius and recompute once
  s.radius.assign(n, 2.0 + zmax);
  double c_env = 8.0 * probe_mag(s, base_point(n));
  s.radius.assign(n, radius_from(c_env));
  c_env = std::max(c_env, 8.0 * fit_envelope_constant(s, rho));
  IntegrationPlan plan;
  plan.truncation_radius.assign(n, radius_from(c_env));
  plan.panel_tolerance = panel_tolerance;
  plan.max_depth = max_depth;
  plan.oscillation_hint = 2.0 * kPi * std::abs(lambda.real());
  return plan;
}

IntegrationPlan plan_for_operator(const AnalyticTestFunction& f,
                                  const std::vector<cplx>& z, cplx lambda,
                                  const ModelParams& m, double panel_tolerance,
                                  int max_depth, const PrecisionPolicy& pol) {
  const int n = static_cast<int>(z.size());
  if (n < 1 || n > 2)
    throw ConfigError("plan_for_operator: supported at n = 1, 2 only");
  if (!(panel_tolerance > 0.0))
    throw ConfigError("plan_for_operator: panel_tolerance must be positive");
  const double strip_limit = 0.45 * m.gstar().real();
  for (const cplx& zj : z)
    if (std::abs(zj.imag()) > strip_limit)
      throw StripExceeded(
          "plan_for_operator: |Im z| beyond the contour-safety margin");
  BoxSpec s;
  s.zs = z;
  s.c.assign(n, 0.0);
  s.nu = -lambda;
  s.f = &f;
  s.m = &m;
  s.pol = pol;
  IntegrationPlan plan;
  plan.truncation_radius = probe_radii(s, panel_tolerance * 1e-3);
  plan.panel_tolerance = panel_tolerance;
  plan.max_depth = max_depth;
  plan.oscillation_hint = 2.0 * kPi * std::abs(lambda.real());
  return plan;
}

// ------------------------------------------------------------------
// Public operations
// ------------------------------------------------------------------

QuadratureValue integrate_Q(const std::vector<cplx>& z2n, cplx lambda,
                            const ModelParams& m, const IntegrationPlan& plan,
                            const PrecisionPolicy& pol) {
  return integrate_q_impl(z2n, lambda, m, plan, pol, true);
}

namespace qdetail {

QuadratureValue integrate_Q_reference(const std::vector<cplx>& z2n,
                                      cplx lambda, const ModelParams& m,
                                      const IntegrationPlan& plan,
                                      const PrecisionPolicy& pol) {
  return integrate_q_impl(z2n, lambda, m, plan, pol, false);
}

double line_table_max_rel_error(const ModelParams& m, double level, double lo,
                                double hi, int samples, unsigned seed,
                                bool measure_pair,
                                const PrecisionPolicy& pol) {
  if (samples < 1 || !(hi > lo))
    throw ConfigError("line_table_max_rel_error: bad sampling window");
  const LineTable tab = measure_pair
                            ? build_mu_pair_line(m, level, lo, hi, pol)
                            : build_k_line(m, level, lo, hi, pol);
  SplitMix64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = rng.uniform(lo, hi);
    const cplx approx = tab.eval(x);
    cplx exact;
    if (measure_pair) {
      const cplx w(x, level);
      exact = measure_mu(m, w, pol) * measure_mu(m, -w, pol);
    } else {
      exact = kernel_K(m, cplx(x, level), pol);
    }
    const double scale = std::max(std::abs(exact), 1e-300);
    worst = std::max(worst, std::abs(approx - exact) / scale);
  }
  return worst;
}

}  // namespace qdetail

Report verify_commutativity(const std::vector<cplx>& z2n, cplx lambda,
                            const ModelParams& m, const IntegrationPlan& plan,
                            double rel_tol, const PrecisionPolicy& pol) {
  const int n = validate_q_inputs(z2n, lambda, m, "verify_commutativity");
  if (rel_tol <= 0.0) rel_tol = (n == 1) ? 1e-6 : 1e-4;

  const QuadratureValue lhs = integrate_Q(z2n, lambda, m, plan, pol);
  const QuadratureValue rhs_raw = integrate_Q(z2n, -lambda, m, plan, pol);
  const cplx phase = std::exp(2.0 * kPi * kI * lambda * tuple_sum(z2n));
  const cplx rhs = phase * rhs_raw.value;

  const double combined_err = lhs.error + std::abs(phase) * rhs_raw.error;
  const double resid = std::abs(lhs.value - rhs);
  const double scale = std::max({std::abs(lhs.value), std::abs(rhs), 1e-300});
  const double rel = resid / scale;

  Report rep("q-commutativity");
  rep.add("sides evaluated", true,
          "Q(lambda) = " + fmt(lhs.value) + ", phase * Q(-lambda) = " +
              fmt(rhs) + ", quadrature errors " + fmt(lhs.error) + " / " +
              fmt(std::abs(phase) * rhs_raw.error));
  rep.add("relative residual below " + fmt(rel_tol), rel <= rel_tol,
          "residual " + fmt(resid) + ", relative " + fmt(rel));
  rep.add("residual consistent with the quadrature error budget",
          resid <= std::max(8.0 * combined_err, rel_tol * scale),
          "combined error estimate " + fmt(combined_err));
  if (!rep.pass)
    throw ToleranceExceeded(
        "verify_commutativity: residual " + fmt(resid) + " (relative " +
        fmt(rel) + ") between Q(lambda) = " + fmt(lhs.value) +
        " and phase * Q(-lambda) = " + fmt(rhs) + " exceeds tolerance " +
        fmt(rel_tol));
  return rep;
}

QuadratureValue apply_Q_operator(const AnalyticTestFunction& f,
                                 const std::vector<cplx>& z, cplx lambda,
                                 const ModelParams& m,
                                 const IntegrationPlan& plan,
                                 const PrecisionPolicy& pol) {
  const int n = static_cast<int>(z.size());
  if (n < 1 || n > 2)
    throw ConfigError("apply_Q_operator: supported at n = 1, 2 only");
  if (!m.decay_positive())
    throw RegimeViolation("apply_Q_operator: requires nu_g > 0");
  const double strip_limit = 0.45 * m.gstar().real();
  for (const cplx& zj : z)
    if (std::abs(zj.imag()) > strip_limit)
      throw StripExceeded(
          "apply_Q_operator: |Im z| = " + fmt(std::abs(zj.imag())) +
          " beyond the contour-safety margin " + fmt(strip_limit) +
          " of the real integration contour");
  const std::vector<double> radii =
      broadcast_radii(plan, n, "apply_Q_operator");
  return operator_integral(z, std::vector<double>(n, 0.0), lambda, &f, m,
                           plan.panel_tolerance, plan.max_depth, pol, &radii);
}

Report verify_MQ_commutation(int r, const AnalyticTestFunction& f,
                             const std::vector<cplx>& z, cplx lambda,
                             const ModelParams& m, double rel_tol,
                             const PrecisionPolicy& pol) {
  const int n = static_cast<int>(z.size());
  if (n < 1 || n > 2)
    throw ConfigError("verify_MQ_commutation: supported at n = 1, 2 only");
  if (r < 1 || r > n)
    throw ConfigError("verify_MQ_commutation: need 1 <= r <= n");
  require_real(z, "verify_MQ_commutation");
  if (!m.contour_window_nonempty())
    throw RegimeViolation(
        "verify_MQ_commutation: requires Re g < Re omega2 so the shifted "
        "contour window is nonempty");
  const double w1 = m.omega.omega1.real();
  const double stagger = (n == 2) ? 0.01 * w1 : 0.0;
  if (!(f.strip_halfwidth > w1 + stagger + 1e-12))
    throw RegimeViolation(
        "verify_MQ_commutation: f must be analytic on a strip wider than "
        "Re omega1 (plus the n = 2 contour stagger)");
  if (rel_tol <= 0.0) rel_tol = 1e-5;

  // pilot run on the plain operator value fixes the absolute scale
  const std::vector<double> c_flat(n, 0.0);
  const QuadratureValue pilot = operator_integral(
      z, c_flat, lambda, &f, m, 1e-7, 10, pol, nullptr);
  const double scale0 = std::max(std::abs(pilot.value), 1e-12);
  const double panel_tol = std::max(1e-13, scale0 * rel_tol * 1e-3);
  const int depth = 12;

  // M_r (Q f): evaluate (Q f) at the shifted points on the straight
  // contour Im y = -Re(w1)/2, which continues the operator beyond the
  // strip of the real contour
  const double c_main = 0.5 * w1;
  std::vector<double> lhs_errors;
  AnalyticTestFunction qf;
  qf.strip_halfwidth = c_main + 0.49 * m.gstar().real();
  qf.evaluator = [&](const std::vector<cplx>& w) {
    const QuadratureValue qv =
        operator_integral(w, std::vector<double>(n, c_main), lambda, &f, m,
                          panel_tol, depth, pol, nullptr);
    lhs_errors.push_back(qv.error);
    return qv.value;
  };
  const cplx lhs = macdonald_apply(r, qf, z, m);

  // Q (M_r f): single integral against the difference operator applied to
  // f; the second axis is staggered so tensor quadrature nodes never meet
  // the coincident-coordinate diagonal of the difference operator
  std::vector<double> c_rhs(n, 0.0);
  if (n == 2) c_rhs[1] = stagger;
  AnalyticTestFunction mrf;
  mrf.strip_halfwidth = f.strip_halfwidth;
  mrf.evaluator = [&](const std::vector<cplx>& y) {
    return macdonald_apply(r, f, y, m);
  };
  const QuadratureValue rhs =
      operator_integral(z, c_rhs, lambda, &mrf, m, panel_tol, depth, pol,
                        nullptr);

  // error weights of the M o Q side: same lexicographic subset order as
  // macdonald_apply
  double lhs_error = 0.0;
  {
    const auto subsets = subsets_of_size(n, r);
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      cplx coef(1.0, 0.0);
      for (int i : subsets[s])
        for (int j = 0; j < n; ++j) {
          if (std::find(subsets[s].begin(), subsets[s].end(), j) !=
              subsets[s].end())
            continue;
          coef *= std::sinh(kPi * (z[i] - z[j] - kI * m.g) / m.omega.omega2) /
                  std::sinh(kPi * (z[i] - z[j]) / m.omega.omega2);
        }
      const double e = s < lhs_errors.size() ? lhs_errors[s] : 0.0;
      lhs_error += std::abs(coef) * e;
    }
  }

  const double resid = std::abs(lhs - rhs.value);
  const double scale =
      std::max({std::abs(lhs), std::abs(rhs.value), 1e-300});
  const double rel = resid / scale;
  const double combined_err = lhs_error + rhs.error;

  Report rep("mq-commutation");
  rep.add("sides evaluated", true,
          "M_" + std::to_string(r) + "(Q f) = " + fmt(lhs) +
              ", Q(M_" + std::to_string(r) + " f) = " + fmt(rhs.value));
  rep.add("relative residual below " + fmt(rel_tol), rel <= rel_tol,
          "residual " + fmt(resid) + ", relative " + fmt(rel));
  rep.add("residual consistent with the quadrature error budget",
          resid <= std::max(8.0 * combined_err, rel_tol * scale),
          "combined error estimate " + fmt(combined_err));
  if (!rep.pass)
    throw ToleranceExceeded("verify_MQ_commutation: relative residual " +
                            fmt(rel) + " exceeds " + fmt(rel_tol) +
                            " (M o Q = " + fmt(lhs) + ", Q o M = " +
                            fmt(rhs.value) + ")");
  return rep;
}

Report eigenfunction_check_n2(cplx lambda1, cplx lambda2,
                              const std::vector<cplx>& x, const ModelParams& m,
                              double rel_tol, const PrecisionPolicy& pol) {
  if (x.size() != 2)
    throw ConfigError("eigenfunction_check_n2: need exactly two coordinates");
  require_real(x, "eigenfunction_check_n2");
  if (!m.eigenfunction_regime())
    throw RegimeViolation(
        "eigenfunction_check_n2: requires real periods and real "
        "0 < g < omega2");
  const double rho_psi =
      2.0 * kPi * (m.nu_g() - std::abs((lambda1 - lambda2).imag()));
  if (!(rho_psi > 0.0))
    throw RegimeViolation(
        "eigenfunction_check_n2: layer integral needs "
        "|Im(lambda1 - lambda2)| < nu_g");
  if (rel_tol <= 0.0) rel_tol = 1e-5;

  const double c_main = 0.5 * m.omega.omega1.real();
  const cplx d1 = d_const(2, m.omega, m.g, pol);
  const double osc =
      2.0 * kPi * (std::abs(lambda1.real()) + std::abs(lambda2.real()));

  // Psi(w1, w2) = d1 * integral over Im y = -c of
  //   Lambda((w1,w2), y; lambda2) e^{2 pi i lambda1 y}
  double psi_err_sum = 0.0;
  auto psi_at = [&](const std::vector<cplx>& w, double abs_tol) {
    auto g1 = [&](double t) {
      const cplx y(t, -c_main);
      return lambda_kernel(m, w, {y}, lambda2, pol) *
             std::exp(2.0 * kPi * kI * lambda1 * y);
    };
    // envelope-driven truncation for the two-kernel layer integrand
    double zmax = 0.0;
    for (const cplx& wj : w) zmax = std::max(zmax, std::abs(wj.real()));
    double c_env = 0.0;
    for (double t : {0.0, 2.0, -2.0, 4.0, -4.0})
      c_env = std::max(c_env,
                       std::abs(g1(t)) * std::exp(rho_psi * std::abs(t)));
    c_env *= 8.0;
    const double radius =
        std::max(2.0, std::log(std::max(c_env / abs_tol, 10.0)) / rho_psi +
                          1.0) +
        zmax;
    LineResult lr = integrate_line(g1, -radius, radius, abs_tol, 12, osc);
    const double tail = c_env * 2.0 * std::exp(-rho_psi * radius) / rho_psi;
    psi_err_sum += std::abs(d1) * (lr.err + tail);
    return d1 * lr.value;
  };

  const double pilot_tol = 1e-8;
  const cplx psi0 = psi_at(x, pilot_tol);
  const double scale0 = std::max(std::abs(psi0), 1e-12);
  const double abs_tol = std::max(1e-14, scale0 * rel_tol * 1e-3);
  psi_err_sum = 0.0;

  AnalyticTestFunction psi;
  psi.strip_halfwidth = c_main + 0.49 * m.gstar().real();
  psi.evaluator = [&](const std::vector<cplx>& w) {
    return psi_at(w, abs_tol);
  };

  const cplx psi_x = psi_at(x, abs_tol);
  const cplx m1 = macdonald_apply(1, psi, x, m);
  const cplx m2 = macdonald_apply(2, psi, x, m);
  const cplx ev1 = std::exp(2.0 * kPi * lambda1 * m.omega.omega1) +
                   std::exp(2.0 * kPi * lambda2 * m.omega.omega1);
  const cplx ev2 = std::exp(2.0 * kPi * lambda1 * m.omega.omega1) *
                   std::exp(2.0 * kPi * lambda2 * m.omega.omega1);

  const double r1 = std::abs(m1 - ev1 * psi_x) /
                    std::max({std::abs(m1), std::abs(ev1 * psi_x), 1e-300});
  const double r2 = std::abs(m2 - ev2 * psi_x) /
                    std::max({std::abs(m2), std::abs(ev2 * psi_x), 1e-300});

  Report rep("eigenfunction-n2");
  rep.add("eigenfunction evaluated", std::isfinite(std::abs(psi_x)),
          "Psi(x) = " + fmt(psi_x) + ", accumulated quadrature error " +
              fmt(psi_err_sum));
  rep.add("M_1 eigenrelation, relative residual below " + fmt(rel_tol),
          r1 <= rel_tol,
          "M_1 Psi = " + fmt(m1) + ", eigenvalue " + fmt(ev1) +
              ", relative residual " + fmt(r1));
  rep.add("M_2 eigenrelation, relative residual below " + fmt(rel_tol),
          r2 <= rel_tol,
          "M_2 Psi = " + fmt(m2) + ", eigenvalue " + fmt(ev2) +
              ", relative residual " + fmt(r2));
  if (!rep.pass)
    throw ToleranceExceeded(
        "eigenfunction_check_n2: eigenrelation residuals " + fmt(r1) +
        ", " + fmt(r2) + " exceed " + fmt(rel_tol));
  return rep;
}

}  // namespace rslab
