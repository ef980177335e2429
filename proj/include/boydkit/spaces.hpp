#pragma once

// Lorentz quasi-norms and the derived sum-space and Holmstedt-space norms.
//
// Every norm factors through the decreasing rearrangement, so rearrangement
// invariance is structural.  Lorentz norms with finite q reduce to
// power_integral in closed form; q = inf norms take exact per-piece suprema
// (pure pieces have at most one interior critical point, implicit pieces are
// refined numerically).  The sum-space norm is the infimum over an explicit
// decomposition family: level truncations of f* plus sharp restrictions,
// which make  norm(X+Y) <= norm(H(X,Y))  hold by construction.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "boydkit/piecewise.hpp"
#include "boydkit/reals.hpp"

namespace boydkit {

struct InvalidSpec : std::invalid_argument {
  explicit InvalidSpec(const std::string& what) : std::invalid_argument(what) {}
};

// Lorentz(p, q), or a sum/Holmstedt combination of two subspaces.
struct SpaceSpec {
  enum class Kind { Lorentz, Sum, Holmstedt };
  Kind kind = Kind::Lorentz;
  double p = 1.0;
  double q = 1.0;
  std::shared_ptr<const SpaceSpec> x;
  std::shared_ptr<const SpaceSpec> y;
  int cut_grid = 64;

  static SpaceSpec lorentz(double p, double q) {
    if (!(p > 0.0)) throw InvalidSpec("lorentz: p must be positive");
    if (!(q > 0.0)) throw InvalidSpec("lorentz: q must be positive");
    if (std::isinf(p) && !std::isinf(q))
      throw InvalidSpec("lorentz: p = inf requires q = inf");
    SpaceSpec s;
    s.kind = Kind::Lorentz;
    s.p = p;
    s.q = q;
    return s;
  }
  static SpaceSpec sum(SpaceSpec x, SpaceSpec y, int cut_grid = 64) {
    if (cut_grid < 1) throw InvalidSpec("sum: cutGrid must be positive");
    SpaceSpec s;
    s.kind = Kind::Sum;
    s.x = std::make_shared<SpaceSpec>(std::move(x));
    s.y = std::make_shared<SpaceSpec>(std::move(y));
    s.cut_grid = cut_grid;
    return s;
  }
  static SpaceSpec holmstedt(SpaceSpec x, SpaceSpec y) {
    SpaceSpec s;
    s.kind = Kind::Holmstedt;
    s.x = std::make_shared<SpaceSpec>(std::move(x));
    s.y = std::make_shared<SpaceSpec>(std::move(y));
    return s;
  }
  bool is_lorentz() const { return kind == Kind::Lorentz; }
};

namespace detail {

// One local refinement pass: ternary search of a scalar function on [a, b].
template <class F>
double refine_max(F&& score, double a, double b) {
  for (int i = 0; i < 90; ++i) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (score(m1) < score(m2))
      a = m1;
    else
      b = m2;
  }
  return score(0.5 * (a + b));
}

// sup over the piece (clipped to s < s_cap) of s^(1/p) * (value - v)^+.
inline double piece_weighted_sup(const Piece& pc, double p, double v,
                                 double s_cap) {
  const double lo = pc.lo;
  const double hi = std::min(pc.hi, s_cap);
  if (!(hi > lo)) return 0.0;
  const double invp = 1.0 / p;
  if (!pc.implicit()) {
    const double c = pc.coef;
    const double alpha = pc.exp;
    if (c == 0.0) return 0.0;
    // Range where value > v.
    double a = lo, b = hi;
    if (v > 0.0) {
      if (alpha == 0.0) {
        if (c <= v) return 0.0;
      } else {
        const double tv = std::pow(v / c, 1.0 / alpha);
        if (alpha < 0.0)
          b = std::min(b, tv);
        else
          a = std::max(a, tv);
      }
      if (!(b > a)) return 0.0;
    }
    double best = 0.0;
    auto consider = [&](double t) {
      if (!(t >= a) || !(t <= b) || t <= 0.0 || std::isinf(t)) return;
      best = std::max(best, pow_pos(t, invp) * std::max(0.0, c * pow_pos(t, alpha) - v));
    };
    // End point limits.
    if (v == 0.0) {
      const double e = invp + alpha;
      if (e == 0.0) return std::max(best, c);
      if (e > 0.0) return c * pow_ext(b, e);
      return c * pow_ext(a, e);
    }
    consider(a == 0.0 ? b * 1e-12 : a);
    if (std::isinf(b)) {
      // value - v -> -v < 0 only when alpha < 0; the sup sits at finite t.
      consider(a == 0.0 ? 1.0 : a * 2.0);
    } else {
      consider(b);
    }
    // Interior critical point: c t^alpha (1 + alpha p) = v.
    if (alpha != 0.0 && 1.0 + alpha * p > 0.0) {
      const double ta = std::pow(v / (c * (1.0 + alpha * p)), 1.0 / alpha);
      consider(ta);
    }
    // Local refinement around the best candidate for safety.
    const double ra = a == 0.0 ? std::min(b, 1e-9) * 1e-3 : a;
    const double rb = std::isinf(b) ? std::max(ra * 2.0, 1e6) : b;
    best = std::max(best, refine_max(
        [&](double t) {
          return pow_pos(t, invp) * std::max(0.0, c * pow_pos(t, alpha) - v);
        },
        ra, rb));
    return best;
  }
  // Implicit piece: parametrize by the value t, s = band(t).
  const double t_top = pc.thi;
  double t_bot = hi < pc.hi ? pc.invert(hi) : pc.tlo;
  t_bot = std::max(t_bot, v);
  if (!(t_top > t_bot)) return 0.0;
  auto score = [&](double t) {
    const double s = std::clamp(pc.band->eval(t), pc.lo, hi);
    return pow_pos(s, invp) * std::max(0.0, t - v);
  };
  // Unbounded s-support: check the t -> t_bot divergence direction.
  if (std::isinf(hi) && pc.tlo == 0.0 && v == 0.0) {
    double gmin = 0.0;
    for (const auto& tm : pc.band->terms) gmin = std::min(gmin, tm.gamma);
    // score ~ t^(1 + gamma_min / p) as t -> 0.
    if (1.0 + gmin * invp * 1.0 < 0.0) return kInf;
  }
  const double lo_grid = t_bot > 0.0 ? t_bot : t_top * 1e-12;
  double best = 0.0;
  double best_t = lo_grid;
  const int n = 96;
  for (int i = 0; i <= n; ++i) {
    const double t = lo_grid * std::pow(t_top / lo_grid, double(i) / n);
    const double sc = score(t);
    if (sc > best) {
      best = sc;
      best_t = t;
    }
  }
  const double wa = std::max(lo_grid, best_t * std::pow(t_top / lo_grid, -1.0 / n));
  const double wb = std::min(t_top, best_t * std::pow(t_top / lo_grid, 1.0 / n));
  best = std::max(best, refine_max(score, wa, wb));
  return best;
}

}  // namespace detail

// Lorentz norm of an already-rearranged function.
inline double lorentz_norm_rearranged(double p, double q,
                                      const PiecewiseFn& fstar) {
  if (fstar.empty()) return 0.0;
  if (std::isinf(p) && std::isinf(q)) return sup_value(fstar);
  if (std::isinf(q)) {
    double best = 0.0;
    for (const auto& pc : fstar.pieces()) {
      best = std::max(best, detail::piece_weighted_sup(pc, p, 0.0, kInf));
      if (std::isinf(best)) return kInf;
    }
    return best;
  }
  const double beta = q / p;
  const double integral = power_integral(fstar, q, beta, 0.0, kInf);
  if (std::isinf(integral)) return kInf;
  return std::pow((p / q) * integral, 1.0 / q);
}

// Norm of the truncation excess (f* - v)^+ restricted to [0, u) in
// Lorentz(p, q).  The excess is not piecewise-power, so finite q integrates
// numerically per piece (with an exact head divergence pretest) and q = inf
// uses the per-piece suprema above.
inline double lorentz_excess_norm(double p, double q, const PiecewiseFn& fstar,
                                  double u, double v) {
  if (fstar.empty() || u <= 0.0) return 0.0;
  if (std::isinf(p) && std::isinf(q)) {
    const double head = sup_value(fstar);
    return std::max(0.0, head - v);
  }
  if (std::isinf(q)) {
    double best = 0.0;
    for (const auto& pc : fstar.pieces()) {
      if (pc.lo >= u) break;
      best = std::max(best, detail::piece_weighted_sup(pc, p, v, u));
      if (std::isinf(best)) return kInf;
    }
    return best;
  }
  double total = 0.0;
  for (const auto& pc : fstar.pieces()) {
    if (pc.lo >= u) break;
    const double x1 = pc.lo;
    const double x2 = std::min(pc.hi, u);
    if (!(x2 > x1)) continue;
    // Divergence pretest at s -> 0: the offset is negligible there.
    if (x1 == 0.0 && !pc.implicit() && pc.exp < 0.0 &&
        1.0 / p + pc.exp <= 0.0 && pc.coef > 0.0)
      return kInf;
    // norm^q = integral of (f* - v)^q s^(q/p - 1) ds over the excess region.
    auto g = [&](double s) {
      const double w = std::max(0.0, pc.value(s) - v);
      if (w == 0.0) return 0.0;
      return std::pow(w, q) * pow_ext(s, q / p - 1.0);
    };
    double part;
    const QuadTol qt{1e-11, 1e-15};
    if (x1 == 0.0) {
      part = integrate_down_to_zero(g, x2, qt);
    } else {
      part = integrate_finite(g, x1, x2, qt);
    }
    total += part;
    if (std::isinf(total)) return kInf;
  }
  return std::pow(total, 1.0 / q);
}

double norm_rearranged(const SpaceSpec& X, const PiecewiseFn& fstar);

// Full norm: factors through the decreasing rearrangement.
inline double space_norm(const SpaceSpec& X, const PiecewiseFn& f) {
  return norm_rearranged(X, rearrange(f));
}

// Decomposition candidates for the sum-space norm; returned for diagnostics.
struct SumDecomposition {
  double value = kInf;   // the norm estimate (infimum over the family)
  double best_cut = 0.0; // cut position u of the winning candidate
  bool truncation = false;  // winning candidate kind
};

inline SumDecomposition decompose_sum(const SpaceSpec& X, const SpaceSpec& Y,
                                      int cut_grid, const PiecewiseFn& fstar) {
  SumDecomposition out;
  if (fstar.empty()) {
    out.value = 0.0;
    return out;
  }
  auto offer = [&](double val, double cut, bool trunc) {
    if (val < out.value) {
      out.value = val;
      out.best_cut = cut;
      out.truncation = trunc;
    }
  };
  // Sentinels: everything into one summand.
  offer(norm_rearranged(Y, fstar), 0.0, true);
  offer(norm_rearranged(X, fstar), kInf, true);

  const double m = fstar.first_positive_breakpoint();
  const double M = fstar.last_finite_breakpoint();
  const double a = 1e-3 * (m > 0.0 ? m : 1.0);
  const double b = 1e3 * (M > a ? M : 1.0);
  std::vector<double> cuts;
  for (int i = 0; i < cut_grid; ++i)
    cuts.push_back(a * std::pow(b / a, cut_grid == 1 ? 0.5 : double(i) / (cut_grid - 1)));
  cuts.push_back(1.0);
  for (double u : cuts) {
    const double v = evaluate(fstar, u);
    // Level truncation: f' = (f* - v) chi_[0,u), f'' = min(f*, v).
    if (X.is_lorentz()) {
      const double nx = lorentz_excess_norm(X.p, X.q, fstar, u, v);
      if (!std::isinf(nx)) {
        const double ny = norm_rearranged(Y, min_with(fstar, v));
        offer(nx + ny, u, true);
      }
    }
    // Sharp restriction: f* chi_[0,u) + f* chi_[u,inf).
    const double rx = space_norm(X, restrict_to(fstar, 0.0, u));
    if (!std::isinf(rx)) {
      const double ry = space_norm(Y, restrict_to(fstar, u, kInf));
      offer(rx + ry, u, false);
    }
  }
  return out;
}

inline double norm_rearranged(const SpaceSpec& X, const PiecewiseFn& fstar) {
  switch (X.kind) {
    case SpaceSpec::Kind::Lorentz:
      return lorentz_norm_rearranged(X.p, X.q, fstar);
    case SpaceSpec::Kind::Sum:
      return decompose_sum(*X.x, *X.y, X.cut_grid, fstar).value;
    case SpaceSpec::Kind::Holmstedt:
      return space_norm(*X.x, restrict_to(fstar, 0.0, 1.0)) +
             space_norm(*X.y, restrict_to(fstar, 1.0, kInf));
  }
  throw InvalidSpec("norm: unknown space kind");
}

// Empirical lower estimate of the quasi-triangle constant of a Lorentz space:
// max over sampled step pairs of norm(f+g) / (norm(f) + norm(g)).
inline double quasi_triangle_constant(const SpaceSpec& X, int trials,
                                      std::uint64_t seed) {
  if (!X.is_lorentz())
    throw InvalidSpec("quasi_triangle_constant: Lorentz spaces only");
  auto ratio = [&](const PiecewiseFn& f, const PiecewiseFn& g) {
    const double nf = space_norm(X, f);
    const double ng = space_norm(X, g);
    const double ns = space_norm(X, power_sum({f, g}, 1.0));
    if (!(nf + ng > 0.0) || std::isinf(nf) || std::isinf(ng)) return 0.0;
    return ns / (nf + ng);
  };
  double best = 0.0;
  // Structured adversaries: disjoint two-block pairs across height ratios.
  const double heights[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  const double widths[] = {0.1, 1.0, 10.0};
  for (double h : heights)
    for (double w1 : widths)
      for (double w2 : widths) {
        const auto f = PiecewiseFn::indicator(0.0, w1);
        const auto g = PiecewiseFn::indicator(w1, w1 + w2, h);
        best = std::max(best, ratio(f, g));
      }
  // Identical pair pins the ratio 1 baseline.
  best = std::max(best, ratio(PiecewiseFn::indicator(0.0, 1.0),
                              PiecewiseFn::indicator(0.0, 1.0)));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> npieces(1, 6);
  std::uniform_real_distribution<double> width(0.05, 3.0);
  std::uniform_real_distribution<double> height(0.1, 4.0);
  std::uniform_int_distribution<int> gap(0, 1);
  auto sample = [&]() {
    const int n = npieces(rng);
    double at = gap(rng) ? 0.0 : width(rng);
    std::vector<Piece> ps;
    for (int i = 0; i < n; ++i) {
      const double lo = at;
      const double hi = lo + width(rng);
      ps.push_back({lo, hi, height(rng), 0.0, nullptr, 0, 0});
      at = hi + (gap(rng) ? 0.0 : width(rng));
    }
    return PiecewiseFn(std::move(ps));
  };
  for (int i = 0; i < trials; ++i) best = std::max(best, ratio(sample(), sample()));
  return best;
}

// Aggregation exponent for the square-function inequality.
inline double aggregation_exponent(const SpaceSpec& X, double rho) {
  if (!X.is_lorentz())
    throw InvalidSpec("aggregation_exponent: Lorentz spaces only");
  return std::min(std::min(rho, 1.0), std::min(X.p, X.q));
}

struct AggregationCheck {
  double lhs = 0.0;  // norm of (sum f_i^rho)^(1/rho)
  double rhs = 0.0;  // (sum norm(f_i)^u)^(1/u)
};

inline AggregationCheck lemma_aggregate_check(const SpaceSpec& X, double rho,
                                              const std::vector<PiecewiseFn>& fs,
                                              double u) {
  if (!(u > 0.0) || u > rho + 1e-15)
    throw InvalidSpec("aggregate check: need 0 < u <= rho");
  AggregationCheck r;
  r.lhs = space_norm(X, power_sum(fs, rho));
  double acc = 0.0;
  for (const auto& f : fs) acc += std::pow(space_norm(X, f), u);
  r.rhs = std::pow(acc, 1.0 / u);
  return r;
}

}  // namespace boydkit
