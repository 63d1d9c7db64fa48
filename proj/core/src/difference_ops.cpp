#include "rslab/difference_ops.hpp"

#include <cmath>
#include <functional>

#include "rslab/errors.hpp"

namespace rslab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};

// Continuous-branch increment log w(s1) - log w(s0) along a sampled path,
// bisecting until consecutive values stay within a safe phase step.
cplx log_step(const std::function<cplx(double)>& w, double s0, double s1,
              const cplx& w0, const cplx& w1, int depth,
              const char* what) {
  if (std::abs(w0) < 1e-280 || std::abs(w1) < 1e-280)
    throw GaugeSingular(std::string(what) +
                        ": branch tracking hit a zero of the product");
  const cplx ratio = w1 / w0;
  if (std::abs(std::arg(ratio)) < 1.2) return std::log(ratio);
  if (depth <= 0)
    throw GaugeSingular(std::string(what) +
                        ": branch tracking failed to resolve the path");
  const double sm = 0.5 * (s0 + s1);
  const cplx wm = w(sm);
  return log_step(w, s0, sm, w0, wm, depth - 1, what) +
         log_step(w, sm, s1, wm, w1, depth - 1, what);
}

// log w(1) continued from the principal log at s = 0.
cplx tracked_log(const std::function<cplx(double)>& w, const char* what) {
  const int segments = 8;
  cplx prev = w(0.0);
  if (std::abs(prev) < 1e-280)
    throw GaugeSingular(std::string(what) + ": product vanishes at the base");
  cplx acc = std::log(prev);
  double sprev = 0.0;
  for (int k = 1; k <= segments; ++k) {
    const double s = double(k) / segments;
    const cplx cur = w(s);
    acc += log_step(w, sprev, s, prev, cur, 30, what);
    prev = cur;
    sprev = s;
  }
  return acc;
}

void require_distinct(const std::vector<cplx>& x, const cplx& w2) {
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const cplx s = std::sinh(kPi * (x[i] - x[j]) / w2);
      if (std::abs(s) < 1e-12)
        throw CoincidingCoordinates(
            "difference operator: coordinates coincide (mod i w2)");
    }
}

std::vector<cplx> shifted_tuple(const std::vector<cplx>& x,
                                const std::vector<int>& subset, const cplx& w1,
                                double halfwidth) {
  std::vector<cplx> xs = x;
  for (int i : subset) xs[i] -= kI * w1;
  for (const cplx& c : xs)
    if (!(std::abs(c.imag()) < halfwidth))
      throw StripExceeded(
          "difference operator: shift leaves the declared analyticity strip");
  return xs;
}

}  // namespace

std::vector<std::vector<int>> subsets_of_size(int n, int r) {
  if (n < 0 || r < 0 || r > n)
    throw ConfigError("subsets_of_size: need 0 <= r <= n");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(r);
  // lexicographic enumeration
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == r) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v < n - (r - k - 1); ++v) {
      cur[k] = v;
      rec(v + 1, k + 1);
    }
  };
  rec(0, 0);
  return out;
}

cplx macdonald_apply(int r, const AnalyticTestFunction& f,
                     const std::vector<cplx>& x, const ModelParams& p) {
  const int n = static_cast<int>(x.size());
  if (n == 0) throw ConfigError("macdonald_apply: empty coordinate tuple");
  if (r < 0 || r > n) throw ConfigError("macdonald_apply: need 0 <= r <= n");
  if (!f.evaluator) throw ConfigError("macdonald_apply: missing evaluator");
  const cplx w1 = p.omega.omega1, w2 = p.omega.omega2;
  require_distinct(x, w2);

  cplx total = 0.0;
  for (const auto& subset : subsets_of_size(n, r)) {
    std::vector<char> in(n, 0);
    for (int i : subset) in[i] = 1;
    cplx coef = 1.0;
    for (int i : subset)
      for (int j = 0; j < n; ++j) {
        if (in[j]) continue;
        const cplx d = x[i] - x[j];
        coef *= std::sinh(kPi * (d - kI * p.g) / w2) /
                std::sinh(kPi * d / w2);
      }
    const auto xs = shifted_tuple(x, subset, w1, f.strip_halfwidth);
    total += coef * f.evaluator(xs);
  }
  return total;
}

cplx sqrt_measure_product(const std::vector<cplx>& x, const ModelParams& p,
                          const PrecisionPolicy& pol) {
  if (x.size() < 2) return 1.0;
  double max_im = 0.0;
  for (const cplx& c : x) max_im = std::max(max_im, std::abs(c.imag()));
  if (max_im == 0.0) {
    const cplx v = measure_product(p, x, pol);
    if (std::abs(v) < 1e-280)
      throw GaugeSingular("sqrt_measure_product: weight vanishes");
    return std::sqrt(v);
  }
  // continue the square root from the real projection of the point, where
  // the weight is positive for real parameters and the branch is canonical
  auto along = [&](double s) {
    std::vector<cplx> xs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      xs[i] = cplx(x[i].real(), s * x[i].imag());
    return measure_product(p, xs, pol);
  };
  return std::exp(0.5 * tracked_log(along, "sqrt_measure_product"));
}

cplx ruijsenaars_apply(int r, const AnalyticTestFunction& f,
                       const std::vector<cplx>& x, const ModelParams& p,
                       const PrecisionPolicy& pol) {
  const cplx root = sqrt_measure_product(x, p, pol);
  AnalyticTestFunction h;
  h.strip_halfwidth = f.strip_halfwidth;
  h.evaluator = [&f, &p, &pol](const std::vector<cplx>& y) {
    return f.evaluator(y) / sqrt_measure_product(y, p, pol);
  };
  return root * macdonald_apply(r, h, x, p);
}

cplx ruijsenaars_apply_direct(int r, const AnalyticTestFunction& f,
                              const std::vector<cplx>& x,
                              const ModelParams& p) {
  const int n = static_cast<int>(x.size());
  if (n == 0)
    throw ConfigError("ruijsenaars_apply_direct: empty coordinate tuple");
  if (r < 0 || r > n)
    throw ConfigError("ruijsenaars_apply_direct: need 0 <= r <= n");
  if (!f.evaluator)
    throw ConfigError("ruijsenaars_apply_direct: missing evaluator");
  const cplx w1 = p.omega.omega1, w2 = p.omega.omega2;
  require_distinct(x, w2);

  cplx total = 0.0;
  for (const auto& subset : subsets_of_size(n, r)) {
    std::vector<char> in(n, 0);
    for (int i : subset) in[i] = 1;
    // The half-power coefficient is the square root of this product, with
    // the branch reached by continuity in the coupling from g = 0 where the
    // product is exactly 1.  The first factor group sits at the original
    // point, the second at the shifted one the operator maps to.
    auto coef_sq = [&](double s) {
      const cplx gs = s * p.g;
      cplx c = 1.0;
      for (int i : subset)
        for (int j = 0; j < n; ++j) {
          if (in[j]) continue;
          const cplx d = x[i] - x[j];
          c *= std::sinh(kPi * (d - kI * gs) / w2) /
               std::sinh(kPi * d / w2);
          const cplx ds = d - kI * w1;
          c *= std::sinh(kPi * (ds + kI * gs) / w2) /
               std::sinh(kPi * ds / w2);
        }
      return c;
    };
    const auto xs = shifted_tuple(x, subset, w1, f.strip_halfwidth);
    const cplx end = coef_sq(1.0);
    if (std::abs(end) == 0.0) continue;
    const cplx half =
        std::exp(0.5 * tracked_log(coef_sq, "ruijsenaars_apply_direct"));
    total += half * f.evaluator(xs);
  }
  return total;
}

cplx elementary_symmetric(int r, const std::vector<cplx>& vals) {
  const int n = static_cast<int>(vals.size());
  if (r < 0 || r > n)
    throw ConfigError("elementary_symmetric: need 0 <= r <= n");
  std::vector<cplx> e(r + 1, 0.0);
  e[0] = 1.0;
  for (int m = 0; m < n; ++m)
    for (int k = std::min(r, m + 1); k >= 1; --k) e[k] += vals[m] * e[k - 1];
  return e[r];
}

std::pair<cplx, cplx> check_kernel_identity(const std::vector<cplx>& z,
                                            const std::vector<cplx>& y,
                                            cplx alpha, int r) {
  const int n = static_cast<int>(z.size());
  if (n == 0 || static_cast<int>(y.size()) != n)
    throw ConfigError("check_kernel_identity: need equal nonzero tuple sizes");
  if (r < 0 || r > n)
    throw ConfigError("check_kernel_identity: need 0 <= r <= n");
  auto safe_sin = [](cplx w) {
    const cplx s = std::sin(w);
    if (std::abs(s) < 1e-12)
      throw SingularDenominator("check_kernel_identity: sin factor vanishes");
    return s;
  };

  cplx lhs = 0.0;
  for (const auto& subset : subsets_of_size(n, r)) {
    std::vector<char> in(n, 0);
    for (int i : subset) in[i] = 1;
    cplx term = 1.0;
    for (int i : subset) {
      for (int j = 0; j < n; ++j)
        if (!in[j]) term *= std::sin(z[i] - z[j] - alpha) / safe_sin(z[i] - z[j]);
      for (int a = 0; a < n; ++a)
        term *= std::sin(z[i] - y[a] + alpha) / safe_sin(z[i] - y[a]);
    }
    lhs += term;
  }
  cplx rhs = 0.0;
  for (const auto& subset : subsets_of_size(n, r)) {
    std::vector<char> in(n, 0);
    for (int a : subset) in[a] = 1;
    cplx term = 1.0;
    for (int a : subset) {
      for (int b = 0; b < n; ++b)
        if (!in[b]) term *= std::sin(y[a] - y[b] + alpha) / safe_sin(y[a] - y[b]);
      for (int i = 0; i < n; ++i)
        term *= std::sin(z[i] - y[a] + alpha) / safe_sin(z[i] - y[a]);
    }
    rhs += term;
  }
  return {lhs, rhs};
}

namespace {

// Shared y-coupled factor of both dressings:
//   sh(pi (z_i - y_a - i g*/2)/w2) / sh(pi (z_i - y_a - i g*/2 - i g)/w2).
cplx cross_factor(const ModelParams& p, cplx zi, cplx ya) {
  const cplx w2 = p.omega.omega2;
  const cplx off = zi - ya - kI * (p.gstar() / 2.0);
  const cplx den = std::sinh(kPi * (off - kI * p.g) / w2);
  if (std::abs(den) < 1e-12)
    throw SingularDenominator("dressing: cross factor denominator vanishes");
  return std::sinh(kPi * off / w2) / den;
}

cplx safe_sinh_ratio(const ModelParams& p, cplx diff, cplx shift) {
  const cplx w2 = p.omega.omega2;
  const cplx den = std::sinh(kPi * diff / w2);
  if (std::abs(den) < 1e-12)
    throw SingularDenominator("dressing: coordinate difference vanishes");
  return std::sinh(kPi * (diff + shift) / w2) / den;
}

}  // namespace

cplx dressing_S(int r, const std::vector<cplx>& z, const std::vector<cplx>& y,
                const ModelParams& p) {
  const int n = static_cast<int>(z.size());
  if (n == 0 || static_cast<int>(y.size()) != n)
    throw ConfigError("dressing_S: need equal nonzero tuple sizes");
  if (r < 0 || r > n) throw ConfigError("dressing_S: need 0 <= r <= n");
  cplx out = 0.0;
  for (const auto& subset : subsets_of_size(n, r)) {
    std::vector<char> in(n, 0);
    for (int i : subset) in[i] = 1;
    cplx term = 1.0;
    for (int i : subset) {
      for (int j = 0; j < n; ++j)
        if (!in[j]) term *= safe_sinh_ratio(p, z[i] - z[j], -kI * p.g);
      for (int a = 0; a < n; ++a) term *= cross_factor(p, z[i], y[a]);
    }
    out += term;
  }
  return out;
}

cplx dressing_S_tilde(int r, const std::vector<cplx>& z,
                      const std::vector<cplx>& y, const ModelParams& p) {
  const int n = static_cast<int>(z.size());
  if (n == 0 || static_cast<int>(y.size()) != n)
    throw ConfigError("dressing_S_tilde: need equal nonzero tuple sizes");
  if (r < 0 || r > n) throw ConfigError("dressing_S_tilde: need 0 <= r <= n");
  cplx out = 0.0;
  for (const auto& subset : subsets_of_size(n, r)) {
    std::vector<char> in(n, 0);
    for (int a : subset) in[a] = 1;
    cplx term = 1.0;
    for (int a : subset) {
      for (int b = 0; b < n; ++b)
        if (!in[b]) term *= safe_sinh_ratio(p, y[a] - y[b], kI * p.g);
      for (int i = 0; i < n; ++i) term *= cross_factor(p, z[i], y[a]);
    }
    out += term;
  }
  return out;
}

}  // namespace rslab
