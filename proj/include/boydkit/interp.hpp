#pragma once
// Brute-force K-type infima over truncation cuts, their comparison against
// sums of Hardy transforms, and the cell-averaging reduction that compresses
// a function onto the unit interval plus an integer-cell step.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "boydkit/boyd.hpp"
#include "boydkit/hardy.hpp"
#include "boydkit/piecewise.hpp"
#include "boydkit/reals.hpp"
#include "boydkit/spaces.hpp"

namespace boydkit {

struct Divergent : std::runtime_error {
  explicit Divergent(const std::string& what) : std::runtime_error(what) {}
};

struct HypothesisFailed : std::runtime_error {
  explicit HypothesisFailed(const std::string& what)
      : std::runtime_error(what) {}
};

// One K evaluation at scale t: the infimum over truncation cuts, the Hardy
// transform sum at the same t, and the cut that attained the infimum.
// arg_cut = 0 means everything went to the second space, arg_cut = inf means
// everything went to the first.
struct KReport {
  double t = 0.0;
  double brute_inf = 0.0;
  double operator_sum = 0.0;
  double ratio = 1.0;  // brute_inf / operator_sum; 0/0 reads as 1
  double arg_cut = 0.0;
};

struct HolmstedtSweep {
  std::vector<KReport> reports;
  double min_ratio = kInf;
  double max_ratio = 0.0;
};

namespace detail {

inline void check_k_params(double p, double r, double q, double s) {
  if (!(p > 0.0) || !is_finite(p))
    throw InvalidSpec("k: p must be finite and positive");
  if (!(q > p)) throw InvalidSpec("k: parameters must satisfy p < q");
  if (!(r > 0.0)) throw InvalidSpec("k: r must be positive");
  if (!(s > 0.0)) throw InvalidSpec("k: s must be positive");
  if (std::isinf(q) && !std::isinf(s))
    throw InvalidSpec("k: q = inf requires s = inf");
}

// Cost of the cut at u > 0: the part of f* above its value at u goes to
// Lorentz(p, r), the rest to Lorentz(q, s).
inline double k_cut_cost(const PiecewiseFn& fstar, double t, double p, double r,
                         double q, double s, double u) {
  const double v = evaluate(fstar, u);
  const double head = lorentz_excess_norm(p, r, fstar, u, v);
  if (std::isinf(head)) return kInf;
  const double tail = lorentz_norm_rearranged(q, s, min_with(fstar, v));
  if (std::isinf(tail)) return kInf;
  return pow_pos(t, -1.0 / p) * head + pow_pos(t, -inv_ext(q)) * tail;
}

// Geometric cut candidates spanning the breakpoint range of f*, always
// containing u = t and u = 1.
inline std::vector<double> k_cut_candidates(const PiecewiseFn& fstar, double t,
                                            int cut_grid) {
  double lo = 1.0, hi = 1.0;
  const auto bps = fstar.breakpoints();
  if (!bps.empty()) {
    lo = bps.front();
    hi = bps.back();
  }
  lo = std::min({lo, t, 1.0}) * 1e-3;
  hi = std::max({hi, t, 1.0}) * 1e3;
  std::vector<double> us;
  us.reserve(static_cast<std::size_t>(cut_grid) + 2);
  for (int i = 0; i < cut_grid; ++i) {
    const double th = static_cast<double>(i) / (cut_grid - 1);
    us.push_back(lo * std::pow(hi / lo, th));
  }
  us.push_back(t);
  us.push_back(1.0);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  return us;
}

// Core K evaluation against precomputed Hardy transforms of the same f*.
inline KReport k_core(const PiecewiseFn& fstar, const HardyTransform& hu,
                      const HardyTransform& hl, double t, double p, double r,
                      double q, double s, int cut_grid) {
  KReport rep;
  rep.t = t;
  rep.operator_sum = hu(t) + hl(t);

  double best = kInf;
  double arg = 0.0;
  auto offer = [&](double u, double cost) {
    if (cost < best) {
      best = cost;
      arg = u;
    }
  };
  // Sentinel cuts: everything to the second space (u = 0), everything to the
  // first (u = inf).
  offer(0.0, pow_pos(t, -inv_ext(q)) * lorentz_norm_rearranged(q, s, fstar));
  offer(kInf, pow_pos(t, -1.0 / p) * lorentz_norm_rearranged(p, r, fstar));
  for (double u : k_cut_candidates(fstar, t, cut_grid))
    offer(u, k_cut_cost(fstar, t, p, r, q, s, u));

  if (std::isinf(best)) throw Divergent("k: every cut cost is infinite");
  rep.brute_inf = best;
  rep.arg_cut = arg;
  rep.ratio = rep.operator_sum == 0.0 ? (best == 0.0 ? 1.0 : kInf)
                                      : best / rep.operator_sum;
  return rep;
}

}  // namespace detail

// Brute-force K-type infimum between Lorentz(p, r) and Lorentz(q, s) at
// scale t, scored over the truncation-cut family.
inline KReport k_bruteforce(const PiecewiseFn& f, double t, double p, double r,
                            double q, double s, int cut_grid = 64) {
  detail::check_k_params(p, r, q, s);
  if (!(t > 0.0) || !is_finite(t))
    throw std::invalid_argument("k: t must be finite and positive");
  if (cut_grid < 2)
    throw std::invalid_argument("k: cutGrid must be at least 2");
  const PiecewiseFn fstar = rearrange(f);
  const HardyTransform hu = apply(HardyKind::upper(p, r), fstar);
  const HardyTransform hl = apply(HardyKind::lower(q, s), fstar);
  return detail::k_core(fstar, hu, hl, t, p, r, q, s, cut_grid);
}

// K infimum against Hardy sum across a grid of scales, with the extremal
// ratios summarized for equivalence checks.
inline HolmstedtSweep holmstedt_sweep(const PiecewiseFn& f, double p, double r,
                                      double q, double s,
                                      const std::vector<double>& t_grid,
                                      int cut_grid = 64) {
  detail::check_k_params(p, r, q, s);
  if (t_grid.empty())
    throw std::invalid_argument("sweep: t grid must be nonempty");
  if (cut_grid < 2)
    throw std::invalid_argument("sweep: cutGrid must be at least 2");
  const PiecewiseFn fstar = rearrange(f);
  const HardyTransform hu = apply(HardyKind::upper(p, r), fstar);
  const HardyTransform hl = apply(HardyKind::lower(q, s), fstar);
  HolmstedtSweep sweep;
  sweep.reports.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t > 0.0) || !is_finite(t))
      throw std::invalid_argument("sweep: t grid must be finite and positive");
    sweep.reports.push_back(
        detail::k_core(fstar, hu, hl, t, p, r, q, s, cut_grid));
    const double ratio = sweep.reports.back().ratio;
    sweep.min_ratio = std::min(sweep.min_ratio, ratio);
    sweep.max_ratio = std::max(sweep.max_ratio, ratio);
  }
  return sweep;
}

// Restriction to the unit interval.
inline PiecewiseFn e_operator(const PiecewiseFn& f) {
  return restrict_to(f, 0.0, 1.0);
}

// Cell averages over integer cells [n, n + 1), n >= 1; zero on [0, 1).
// Cells of length one make the average equal the cell mass.
inline PiecewiseFn f_operator(const PiecewiseFn& f) {
  const double end = f.support_end();
  if (!is_finite(end))
    throw std::invalid_argument("f_operator: input must have bounded support");
  if (end > 1e6 + 1.0)
    throw std::invalid_argument(
        "f_operator: support end too large for cell enumeration");
  std::vector<PowerPiece> cells;
  for (double n = 1.0; n < end; n += 1.0) {
    const double mass = power_integral(f, 1.0, 1.0, n, n + 1.0);
    if (!is_finite(mass)) throw Divergent("f_operator: infinite cell average");
    if (mass > 0.0) cells.push_back({n, n + 1.0, mass, 0.0});
  }
  return PiecewiseFn::from_power_pieces(cells);
}

// Grid check of the pointwise sandwich f*(2x) <= (Ef* + Ff*)(x) <= f*(x / 2).
inline bool sandwich_check(const PiecewiseFn& f,
                           const std::vector<double>& grid) {
  const PiecewiseFn fstar = rearrange(f);
  const PiecewiseFn efn = e_operator(fstar);
  const PiecewiseFn ffn = f_operator(fstar);
  for (double x : grid) {
    if (!(x > 0.0) || !is_finite(x)) continue;
    const double g = evaluate(efn, x) + evaluate(ffn, x);
    const double lo = evaluate(fstar, 2.0 * x);
    const double hi = evaluate(fstar, 0.5 * x);
    if (g < lo * (1.0 - 1e-12) - 1e-300) return false;
    if (g > hi * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

// Constants and norm chain for the sum-space compression X + Y -> H(X, Y).
struct Theorem7Report {
  double c1 = 0.0;  // mutual embedding constant over the hypothesis corpus
  double c2 = 0.0;  // dilation-by-1/4 norm, max over both spaces
  double c3 = 0.0;  // quasi-triangle estimate, max over both spaces
  double norm_sum = 0.0;  // |f| in X + Y
  double norm_h = 0.0;    // |f* chi_[0,1)| in X plus |f* chi_[1,inf)| in Y
  bool chain_ok = false;
  // Hypothesis corpus with measured embedding ratios, for reproducibility.
  std::vector<std::pair<std::string, double>> corpus;
};

// Checks the two embedding hypotheses on a fixed corpus, measures the
// equivalence constants, and verifies the norm chain
//   norm_sum <= norm_h <= 2 c1 c2 c3 norm_sum
// for the given f.  Throws HypothesisFailed when an embedding ratio is not
// finite or the corpus constant exceeds 1e3.
inline Theorem7Report theorem7_verify(const SpaceSpec& X, const SpaceSpec& Y,
                                      const PiecewiseFn& f, int cut_grid = 64) {
  if (!X.is_lorentz() || !Y.is_lorentz())
    throw InvalidSpec("theorem7: both spaces must be Lorentz spaces");
  if (cut_grid < 1)
    throw std::invalid_argument("theorem7: cutGrid must be positive");

  Theorem7Report rep;
  std::string worst;
  auto embed = [&](const std::string& id, const SpaceSpec& num,
                   const SpaceSpec& den, const PiecewiseFn& g) {
    const double a = space_norm(num, g);
    const double b = space_norm(den, g);
    const double ratio = b > 0.0 ? a / b : kInf;
    if (!is_finite(ratio))
      throw HypothesisFailed("theorem7: corpus element '" + id +
                             "' breaks the embedding");
    rep.corpus.emplace_back(id, ratio);
    if (ratio > rep.c1) {
      rep.c1 = ratio;
      worst = id;
    }
  };

  // Hypothesis (i): |g|_Y <= c1 |g|_X for g supported in [0, 1].
  for (int k = 0; k <= 24; k += 6)
    embed("unit chi[0,2^-" + std::to_string(k) + ")", Y, X,
          PiecewiseFn::indicator(0.0, std::pow(2.0, -k)));
  for (double gamma : {X.p, 2.0 * X.p}) {
    if (std::isinf(gamma)) continue;
    const double knee = std::pow(2.0, -12.0);
    embed("unit capped power 1/" + std::to_string(gamma), Y, X,
          PiecewiseFn::from_power_pieces(
              {{0.0, knee, std::pow(2.0, 12.0 / gamma), 0.0},
               {knee, 1.0, 1.0, -1.0 / gamma}}));
  }
  // Hypothesis (ii): |g|_X <= c1 |g|_Y for g constant on integer cells.
  for (double m : {2.0, 5.0, 33.0, 1025.0})
    embed("step chi[1," + std::to_string(static_cast<int>(m)) + ")", X, Y,
          PiecewiseFn::indicator(1.0, m));
  embed("step two-height", X, Y,
        PiecewiseFn::from_power_pieces({{1.0, 2.0, 2.0, 0.0},
                                        {2.0, 5.0, 1.0, 0.0}}));
  {
    std::vector<PowerPiece> decay;
    for (int j = 0; j <= 6; ++j)
      decay.push_back({std::pow(2.0, j), std::pow(2.0, j + 1),
                       std::pow(2.0, -j), 0.0});
    embed("step geometric decay", X, Y,
          PiecewiseFn::from_power_pieces(decay));
  }
  if (rep.c1 > 1e3)
    throw HypothesisFailed("theorem7: embedding constant " +
                           std::to_string(rep.c1) + " exceeds 1e3 (element '" +
                           worst + "')");

  rep.c2 = std::max(dilation_norm(X, 0.25, {}), dilation_norm(Y, 0.25, {}));
  rep.c3 = std::max(quasi_triangle_constant(X, 160, 0x7e07),
                    quasi_triangle_constant(Y, 160, 0x7e07));

  const PiecewiseFn fstar = rearrange(f);
  rep.norm_sum = decompose_sum(X, Y, cut_grid, fstar).value;
  rep.norm_h = norm_rearranged(X, restrict_to(fstar, 0.0, 1.0)) +
               norm_rearranged(Y, restrict_to(fstar, 1.0, kInf));
  const double bound = 2.0 * rep.c1 * rep.c2 * rep.c3 * rep.norm_sum;
  rep.chain_ok = rep.norm_sum <= rep.norm_h * (1.0 + 1e-9) &&
                 rep.norm_h <= bound * (1.0 + 1e-9);
  return rep;
}

}  // namespace boydkit
