#pragma once

// Dilation norms, Boyd index estimation, and executable probes for both
// directions of the Hardy-boundedness dichotomy.
//
// Exactness policy: Lorentz targets use the closed dilation law a^(-1/p);
// everything else is an empirical lower bound over a test family and is
// flagged as such in the report.  Boundedness probes combine full-norm
// ratios over a family (which certify divergence whenever a single ratio is
// infinite) with an escalating witness sequence scored on a restricted
// window, where the critical-index growth stays finite and measurable.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "boydkit/hardy.hpp"
#include "boydkit/piecewise.hpp"
#include "boydkit/quadrature.hpp"
#include "boydkit/reals.hpp"
#include "boydkit/spaces.hpp"

namespace boydkit {

struct EmptyFamily : std::invalid_argument {
  EmptyFamily() : std::invalid_argument("boyd: test family is empty") {}
};
struct DegenerateFit : std::runtime_error {
  DegenerateFit()
      : std::runtime_error(
            "boyd: all dilation norms equal 1; no slope to fit") {}
};
struct InvalidC : std::invalid_argument {
  InvalidC() : std::invalid_argument("boyd: C must exceed 1") {}
};

using TestFamily = std::vector<std::pair<std::string, PiecewiseFn>>;

struct BoydReport {
  std::vector<std::pair<double, double>> samples;  // (a, h(a))
  double lower_index = 0.0;
  double upper_index = 0.0;
  double fit_residual = 0.0;
  bool exact_dilation_law = false;
  std::string note;
};

struct BoundednessReport {
  HardyKind kind;
  SpaceSpec space;
  std::vector<std::pair<std::string, double>> ratios;
  std::vector<double> escalation_ratios;
  bool bounded = false;
  double constant = 0.0;   // bounded verdicts: max observed ratio
  std::string witness_id;  // diverging verdicts
};

struct ConverseBound {
  double kappa = 0.0;
  double k = 0.0;
};

struct ConverseCertificate {
  double lhs = 0.0;
  double rhs = 0.0;
  double a = 0.0;
};

namespace detail {

// Adaptive bisection splits linearly, so a segment spanning hundreds of
// decades starves the left edge of depth; chunk geometrically first.
template <typename F>
double integrate_wide(F&& g, double a, double b, const QuadTol& qt) {
  double total = 0.0;
  while (a > 0.0 && b / a > 1.0e4) {
    const double c = a * 1.0e4;
    total += integrate_finite(g, a, c, qt);
    if (std::isinf(total)) return kInf;
    a = c;
  }
  return total + integrate_finite(g, a, b, qt);
}

}  // namespace detail

// Lorentz norm of a transform over the window (t_lo, t_hi); +inf on
// divergence.  The transform is nonincreasing, hence its own rearrangement,
// so the norm integrates H(t)^Q t^(Q/P-1) directly, segmented at the
// breakpoints of the underlying rearrangement; beyond a bounded support the
// exact eventual power law replaces the quadrature tail.
inline double hardy_norm(const SpaceSpec& X, const HardyTransform& H,
                         double t_lo = 0.0, double t_hi = kInf) {
  if (!X.is_lorentz())
    throw InvalidSpec("hardy_norm: a Lorentz target space is required");
  const double P = X.p, Q = X.q;
  const double invP = inv_ext(P);
  const PiecewiseFn& fstar = H.rearranged();
  if (fstar.empty()) return 0.0;
  const auto ep = H.eventual_power();
  const double s0 = fstar.first_positive_breakpoint();
  const double s1 = fstar.last_finite_breakpoint();

  if (std::isinf(Q)) {
    double best = 0.0;
    if (ep && std::isinf(t_hi) && ep->coef > 0.0) {
      const double e = invP + ep->exp;
      if (e > 0.0) return kInf;
      if (e == 0.0) best = std::max(best, ep->coef);
    }
    // Both upper kinds inherit the head exponent of a pure heavy head.
    const Piece& head = fstar.pieces().front();
    if (t_lo == 0.0 && head.lo == 0.0 && !head.implicit() &&
        head.coef > 0.0 && H.kind().upper_family() &&
        invP + head.exp < 0.0)
      return kInf;
    if (t_lo == 0.0 && !H.kind().upper_family() &&
        !std::isinf(H.kind().index)) {
      // Near 0 the lower transforms behave like t^(-1/q) times a constant;
      // the weighted sup diverges as soon as 1/P < 1/q.
      const double probe_t = (s0 > 0.0 ? s0 : 1.0) * 1e-9;
      const double v = H(probe_t);
      if (std::isinf(v)) return kInf;
      if (v > 0.0 && invP - inv_ext(H.kind().index) < 0.0) return kInf;
    }
    const double glo = std::max(t_lo, (s0 > 0.0 ? s0 : 1.0) * 1e-6);
    const double ghi =
        std::isinf(t_hi) ? (s1 > 0.0 ? s1 : 1.0) * 1e6 : t_hi;
    if (!(ghi > glo)) return best;
    auto m = [&](double t) { return pow_pos(t, invP) * H(t); };
    const double llo = std::log(glo), lhi = std::log(ghi);
    int best_i = -1;
    const int kGrid = 161;
    for (int i = 0; i < kGrid; ++i) {
      const double t = std::exp(llo + (lhi - llo) * i / (kGrid - 1.0));
      const double v = m(t);
      if (std::isinf(v)) return kInf;
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    if (best_i >= 0) {
      const double step = (lhi - llo) / (kGrid - 1.0);
      double a = llo + step * std::max(0, best_i - 1);
      double b = llo + step * std::min(kGrid - 1, best_i + 1);
      for (int it = 0; it < 90; ++it) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (m(std::exp(m1)) < m(std::exp(m2))) a = m1; else b = m2;
      }
      best = std::max(best, m(std::exp(0.5 * (a + b))));
    }
    // The identity and weak lower kinds jump at breakpoints of the
    // rearrangement; the sup there is a left limit the grid cannot see.
    std::vector<double> edges = fstar.breakpoints();
    edges.push_back(ghi);
    for (double b : edges) {
      if (!(b > glo) || b > ghi) continue;
      const double t = b * (1.0 - 1e-12);
      if (t > glo) {
        const double v = m(t);
        if (std::isinf(v)) return kInf;
        best = std::max(best, v);
      }
    }
    return best;
  }

  auto g = [&](double t) {
    const double v = H(t);
    if (v == 0.0) return 0.0;
    return pow_pos(v, Q) * pow_pos(t, Q * invP - 1.0);
  };
  std::vector<double> cuts;
  for (double b : fstar.breakpoints())
    if (b > t_lo && b < t_hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const QuadTol qt{1e-10, 1e-14};
  double total = 0.0;
  double prev = t_lo;
  for (double c : cuts) {
    total += (prev == 0.0) ? integrate_down_to_zero(g, c, qt)
                           : detail::integrate_wide(g, prev, c, qt);
    if (std::isinf(total)) return kInf;
    prev = c;
  }
  if (is_finite(t_hi)) {
    total += (prev == 0.0) ? integrate_down_to_zero(g, t_hi, qt)
                           : detail::integrate_wide(g, prev, t_hi, qt);
  } else if (ep) {
    if (prev == 0.0 && ep->from > 0.0) {
      total += integrate_down_to_zero(g, ep->from, qt);
      prev = ep->from;
    }
    if (ep->coef > 0.0) {
      const double start = std::max(prev, ep->from);
      total += pow_pos(ep->coef, Q) *
               detail::int_pow_ext(Q * (invP + ep->exp) - 1.0, start, kInf);
    }
  } else {
    const double pivot = prev > 0.0 ? prev : 1.0;
    if (prev == 0.0) total += integrate_down_to_zero(g, pivot, qt);
    total += integrate_up_to_inf(g, pivot, qt);
  }
  if (std::isinf(total)) return kInf;
  return std::pow(total, 1.0 / Q);
}

// h(a) = ||D_a||: exact a^(-1/p) on Lorentz targets, otherwise the largest
// norm ratio over the family.
inline double dilation_norm(const SpaceSpec& X, double a,
                            const TestFamily& family) {
  if (!(a > 0.0) || !is_finite(a))
    throw std::invalid_argument("dilation_norm: a must be a positive real");
  if (X.is_lorentz()) return pow_pos(a, -inv_ext(X.p));
  if (family.empty()) throw EmptyFamily();
  double best = 0.0;
  bool usable = false;
  for (const auto& [id, f] : family) {
    (void)id;
    const double nf = space_norm(X, f);
    if (!(nf > 0.0) || !is_finite(nf)) continue;
    const double nd = space_norm(X, dilate(f, a));
    if (!is_finite(nd)) continue;
    usable = true;
    best = std::max(best, nd / nf);
  }
  if (!usable) throw EmptyFamily();
  return best;
}

inline std::vector<double> default_dilation_grid() {
  std::vector<double> g;
  for (int k = -10; k <= 10; ++k) g.push_back(std::ldexp(1.0, k));
  return g;
}

namespace detail {

struct SlopeFit {
  double slope = 0.0;
  double residual = 0.0;
};

// Least squares of y = log h against x = log(1/a) over one side of a = 1,
// restricted to the three outermost decades, where the slope approximates
// the limiting exponent.
inline SlopeFit fit_side(const std::vector<std::pair<double, double>>& samples,
                         bool below_one) {
  std::vector<std::pair<double, double>> pts;
  double extreme = below_one ? kInf : 0.0;
  for (const auto& [a, h] : samples) {
    if (below_one ? a < 1.0 : a > 1.0)
      extreme = below_one ? std::min(extreme, a) : std::max(extreme, a);
  }
  for (const auto& [a, h] : samples) {
    const bool side = below_one ? a < 1.0 : a > 1.0;
    if (!side) continue;
    const bool near = below_one ? a <= extreme * 1.0e3 : a >= extreme * 1.0e-3;
    if (near) pts.push_back({std::log(1.0 / a), std::log(h)});
  }
  if (pts.size() < 2)
    throw std::invalid_argument(
        "estimate_indices: the grid must span both sides of a = 1");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) { sx += x; sy += y; }
  const double mx = sx / pts.size(), my = sy / pts.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  SlopeFit out;
  out.slope = sxy / sxx;
  double se = 0.0;
  for (const auto& [x, y] : pts) {
    const double d = y - (my + out.slope * (x - mx));
    se += d * d;
  }
  out.residual = std::sqrt(se / pts.size());
  return out;
}

}  // namespace detail

inline BoydReport estimate_indices(const SpaceSpec& X,
                                   const std::vector<double>& a_grid,
                                   const TestFamily& family) {
  BoydReport report;
  report.exact_dilation_law = X.is_lorentz();
  report.note = report.exact_dilation_law
                    ? "closed dilation law"
                    : "regression estimate of the limiting slope over an "
                      "empirical family; not the constant-carrying "
                      "sup/inf definition";
  for (double a : a_grid)
    report.samples.push_back({a, dilation_norm(X, a, family)});
  bool all_one = true;
  for (const auto& [a, h] : report.samples)
    if (std::abs(h - 1.0) > 1e-12) all_one = false;
  if (all_one) throw DegenerateFit();
  const auto low = detail::fit_side(report.samples, true);
  const auto high = detail::fit_side(report.samples, false);
  report.lower_index = low.slope > 1e-15 ? 1.0 / low.slope : kInf;
  report.upper_index = high.slope > 1e-15 ? 1.0 / high.slope : kInf;
  report.fit_residual = std::max(low.residual, high.residual);
  return report;
}

// Family of dilation/ratio witnesses: indicators across 20 dyadic scales,
// capped critical powers near the space's principal index, and decaying
// tails.  The capped realizations are nonincreasing from 0, so they are
// their own rearrangements and every norm stays in closed form.
inline TestFamily default_probe_family(const SpaceSpec& X) {
  TestFamily fam;
  for (int k = -10; k <= 10; k += 2) {
    const double L = std::ldexp(1.0, k);
    fam.push_back({"chi[0," + format_real(L) + ")",
                   PiecewiseFn::indicator(0.0, L, 1.0)});
  }
  const double P = X.is_lorentz() && is_finite(X.p) ? X.p : 2.0;
  const double Q = X.is_lorentz() ? X.q : 2.0;
  const std::vector<std::pair<std::string, double>> gammas = {
      {"power_lo", 0.75 * P}, {"power_crit", P}, {"power_hi", 1.3 * P}};
  for (const auto& [name, gamma] : gammas) {
    // Depth of the cap: the critical member drives sharp-constant
    // measurements, but value^Q at the cap must stay inside double range.
    double L = name == std::string("power_crit") ? 300.0 : 14.0;
    if (is_finite(Q)) L = std::min(L, 660.0 * gamma / Q);
    const double eps = std::exp(-L);
    const double cap = std::exp(L / gamma);
    std::vector<PowerPiece> ps = {{0.0, eps, cap, 0.0},
                                  {eps, 1.0, 1.0, -1.0 / gamma}};
    fam.push_back({name, PiecewiseFn::from_power_pieces(ps)});
    std::vector<PowerPiece> tail = {{0.0, 1.0, 1.0, 0.0},
                                    {1.0, 8192.0, 1.0, -1.0 / gamma}};
    fam.push_back({name + "_tail", PiecewiseFn::from_power_pieces(tail)});
  }
  return fam;
}

// Ratio sweep deciding boundedness.  Escalating witnesses stretch the
// critical power shape one e-fold further per step; their transforms are
// scored on the window carrying the stretch ((0,1] for the upper family,
// [1,inf) for the lower), where the critical case grows like k^(1/r) while
// bounded cases plateau.  Family ratios use full norms; a single infinite
// family ratio certifies divergence even when the windowed escalators
// plateau (which happens for the sup-type operator at its own index).
inline BoundednessReport boundedness_probe(const HardyKind& kind,
                                           const SpaceSpec& X,
                                           const TestFamily& family,
                                           int escalation) {
  if (escalation < 2)
    throw std::invalid_argument("boundedness_probe: escalation must be >= 2");
  const bool identity = !kind.upper_family() && std::isinf(kind.index) &&
                        std::isinf(kind.r);
  if (!identity && !X.is_lorentz())
    throw InvalidSpec("boundedness_probe: a Lorentz target space is required");
  BoundednessReport report;
  report.kind = kind;
  report.space = X;

  auto full_ratio = [&](const PiecewiseFn& f) {
    const double nf = space_norm(X, f);
    if (!(nf > 0.0) || !is_finite(nf)) return -1.0;  // unusable
    if (identity) return space_norm(X, rearrange(f)) / nf;
    return hardy_norm(X, HardyTransform(kind, f)) / nf;
  };
  // Deep caps keep ratios sharp, but value^max(q, r) must stay inside
  // double range or an overflow would masquerade as divergence.
  auto representable = [&](const PiecewiseFn& f) {
    const double mv = sup_value(f);
    if (!is_finite(mv) || mv <= 1.0) return true;
    double w = 1.0;
    if (is_finite(X.q)) w = std::max(w, X.q);
    if (!std::isinf(kind.r)) w = std::max(w, kind.r);
    return w * std::log(mv) < 600.0;
  };

  for (const auto& [id, f] : family) {
    if (!representable(f)) continue;
    const double r = full_ratio(f);
    if (r >= 0.0) report.ratios.push_back({id, r});
  }

  // Escalating witnesses, realized as capped nonincreasing functions.
  const double idx = kind.index;
  for (int k = 1; k <= escalation; ++k) {
    PiecewiseFn w;
    double w_lo = 0.0, w_hi = kInf;
    if (kind.upper_family()) {
      const double eps = std::exp(-static_cast<double>(k));
      std::vector<PowerPiece> ps = {{0.0, eps, std::exp(k / idx), 0.0},
                                    {eps, 1.0, 1.0, -1.0 / idx}};
      w = PiecewiseFn::from_power_pieces(ps);
      w_hi = 1.0;
    } else if (std::isinf(idx)) {
      w = PiecewiseFn::indicator(0.0, std::exp(static_cast<double>(k)), 1.0);
      w_lo = 1.0;
    } else {
      std::vector<PowerPiece> ps = {
          {0.0, 1.0, 1.0, 0.0},
          {1.0, std::exp(static_cast<double>(k)), 1.0, -1.0 / idx}};
      w = PiecewiseFn::from_power_pieces(ps);
      w_lo = 1.0;
    }
    double r;
    const double nw = space_norm(X, w);
    if (identity) {
      r = space_norm(X, rearrange(w)) / nw;
    } else {
      r = hardy_norm(X, HardyTransform(kind, w), w_lo, w_hi) / nw;
    }
    report.escalation_ratios.push_back(r);
    report.ratios.push_back(
        {"escalator[" + std::to_string(k) + "]", r});
  }

  const auto& esc = report.escalation_ratios;
  for (std::size_t k = 0; k < esc.size(); ++k) {
    if (std::isinf(esc[k])) {
      report.bounded = false;
      report.witness_id = "escalator[" + std::to_string(k + 1) + "]";
      return report;
    }
  }
  const double last = esc.back();
  const double before = esc[esc.size() - 2];
  const bool plateau = (last - before) <= 0.01 * std::max(before, 1e-300);
  if (!plateau) {
    report.bounded = false;
    report.witness_id = "escalator[" + std::to_string(esc.size()) + "]";
    return report;
  }
  for (const auto& [id, r] : report.ratios) {
    if (std::isinf(r)) {
      report.bounded = false;
      report.witness_id = id;
      return report;
    }
  }
  report.bounded = true;
  for (const auto& [id, r] : report.ratios)
    report.constant = std::max(report.constant, r);
  return report;
}

// kappa = p / (1 - C^(-r)): certified lower bound for the lower index once
// C bounds the upper (p, r) transform; k = exp(-(p/r) C^r) is the dilation
// step realizing it.
inline ConverseBound converse_bound(double p, double r, double C) {
  if (!(p > 0.0) || std::isinf(p) || !(r > 0.0) || std::isinf(r))
    throw InvalidSpec("converse_bound: p and r must be finite positive reals");
  if (!(C > 1.0)) throw InvalidC();
  ConverseBound out;
  const double Cr = pow_pos(C, r);
  out.kappa = p / (1.0 - 1.0 / Cr);
  out.k = std::exp(-(p / r) * Cr);
  return out;
}

// Both sides of the dilation inequality at a = k^n:
// ||D_a f|| <= C^(n+1) (n! / (a^(r/p) log(1/a^(r/p))^n))^(1/r) ||f||.
inline ConverseCertificate converse_certificate(double p, double r, double C,
                                                const SpaceSpec& X,
                                                const PiecewiseFn& f, int n) {
  if (n < 1)
    throw std::invalid_argument("converse_certificate: n must be positive");
  const ConverseBound cb = converse_bound(p, r, C);
  ConverseCertificate out;
  out.a = std::pow(cb.k, n);
  out.lhs = space_norm(X, dilate(f, out.a));
  const double log_arp = (r / p) * std::log(out.a);  // log a^(r/p), negative
  const double log_factor =
      (n + 1.0) * std::log(C) +
      (std::lgamma(n + 1.0) - log_arp - n * std::log(-log_arp)) / r;
  out.rhs = std::exp(log_factor) * space_norm(X, f);
  return out;
}

}  // namespace boydkit
