#pragma once
// Acceptance suite: ten end-to-end criteria, each printed as one pass/fail
// line.  Tolerances, seeds, and calibrated constants are pinned here; the
// CLI verify command and the acceptance test binary both run this table.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "boydkit/boyd.hpp"
#include "boydkit/hardy.hpp"
#include "boydkit/interp.hpp"
#include "boydkit/logpow.hpp"
#include "boydkit/piecewise.hpp"
#include "boydkit/reals.hpp"
#include "boydkit/spaces.hpp"

namespace boydkit::acceptance {

struct Criterion {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

using boydkit::integrate_finite;

// Ten bounded-support functions that equal their own rearrangements with
// pure pieces only, so every module (iteration oracle included) accepts them.
inline std::vector<PiecewiseFn> corpus10() {
  std::vector<PiecewiseFn> fs;
  fs.push_back(PiecewiseFn::indicator(0.0, 1.0));
  fs.push_back(PiecewiseFn::indicator(0.0, 5.0));
  fs.push_back(PiecewiseFn::from_power_pieces({{0.0, 1.0, 2.0, 0.0},
                                               {1.0, 3.0, 1.0, 0.0}}));
  fs.push_back(PiecewiseFn::from_power_pieces({{0.0, 0.5, 4.0, 0.0},
                                               {0.5, 2.0, 2.5, 0.0},
                                               {2.0, 6.0, 1.0, 0.0},
                                               {6.0, 9.0, 0.25, 0.0}}));
  fs.push_back(PiecewiseFn::power(1.0, -0.25, 0.0, 2.0));
  fs.push_back(PiecewiseFn::power(1.0, -0.4, 0.0, 1.0));
  fs.push_back(PiecewiseFn::from_power_pieces({{0.0, 0.25, 2.0, 0.0},
                                               {0.25, 4.0, 1.0, -0.5}}));
  fs.push_back(PiecewiseFn::from_power_pieces(
      {{0.0, 1.0 / 27.0, 3.0, 0.0}, {1.0 / 27.0, 8.0, 1.0, -1.0 / 3.0}}));
  fs.push_back(PiecewiseFn::from_power_pieces(
      {{0.0, 2.0, 1.5, 0.0},
       {2.0, 10.0, 1.5 * std::pow(2.0, 0.4), -0.4}}));
  fs.push_back(PiecewiseFn::from_power_pieces({{0.0, 1e-3, 8.0, 0.0},
                                               {1e-3, 1.0, 1.0, 0.0},
                                               {1.0, 50.0, 0.05, 0.0}}));
  return fs;
}

inline std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> g;
  g.reserve(n);
  for (int i = 0; i < n; ++i)
    g.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
  return g;
}

// F with F' = S, valid on (0, inf); no integration constant.
inline LogPowerSum lps_antiderivative(const LogPowerSum& S) {
  LogPowerSum F;
  for (const auto& tm : S.terms()) {
    if (tm.a == -1.0) {
      F.add_term({tm.c / (tm.m + 1.0), 0.0, tm.m + 1});
      continue;
    }
    double coef = tm.c;
    for (int j = tm.m;; --j) {
      F.add_term({coef / (tm.a + 1.0), tm.a + 1.0, j});
      if (j == 0) break;
      coef = -coef * j / (tm.a + 1.0);
    }
  }
  return F;
}

// Exact composition oracle for the finite upper transform: the inner
// integral of the m-fold iterate is a LogPowerSum cell table; one more
// composition multiplies by beta/s and antidifferentiates, staying in the
// class.  Requires an all-pure nonincreasing input.
struct Chain {
  double p = 1.0;
  double r = 1.0;
  double beta = 1.0;
  struct Cell {
    double lo = 0.0;
    double hi = 0.0;
    LogPowerSum K;
  };
  std::vector<Cell> cells;

  static Chain level1(double p, double r, const PiecewiseFn& fstar) {
    Chain ch;
    ch.p = p;
    ch.r = r;
    ch.beta = r / p;
    double carry = 0.0;
    for (const auto& pc : fstar.pieces()) {
      if (pc.implicit())
        throw std::logic_error("chain oracle: pure pieces only");
      const LogPowerSum g({{ch.beta * pow_pos(pc.coef, r),
                            r * pc.exp + ch.beta - 1.0, 0}});
      LogPowerSum F = lps_antiderivative(g);
      Cell cell{pc.lo, pc.hi, {}};
      cell.K = F;
      if (pc.lo != 0.0) cell.K.add_term({carry - F.eval(pc.lo), 0.0, 0});
      carry = cell.K.eval(is_finite(pc.hi) ? pc.hi : pc.lo + 1.0);
      ch.cells.push_back(std::move(cell));
    }
    const double end = fstar.support_end();
    if (is_finite(end))
      ch.cells.push_back({end, kInf, LogPowerSum::constant(carry)});
    return ch;
  }

  Chain next() const {
    Chain ch;
    ch.p = p;
    ch.r = r;
    ch.beta = beta;
    double carry = 0.0;
    for (const auto& cell : cells) {
      const LogPowerSum h = cell.K.times(beta, -1.0, 0);
      LogPowerSum F = lps_antiderivative(h);
      Cell out{cell.lo, cell.hi, {}};
      out.K = F;
      if (cell.lo != 0.0) out.K.add_term({carry - F.eval(cell.lo), 0.0, 0});
      carry = out.K.eval(is_finite(cell.hi) ? cell.hi : cell.lo + 1.0);
      ch.cells.push_back(std::move(out));
    }
    return ch;
  }

  double value(double t) const {
    for (const auto& cell : cells)
      if (t < cell.hi || std::isinf(cell.hi))
        return pow_pos(t, -1.0 / p) * std::pow(cell.K.eval(t), 1.0 / r);
    return 0.0;
  }
};

// Sort-based rearrangement oracle for step functions.
inline PiecewiseFn step_sort_oracle(const PiecewiseFn& f) {
  struct Entry {
    double v, len;
  };
  std::vector<Entry> es;
  for (const auto& pc : f.pieces()) es.push_back({pc.coef, pc.hi - pc.lo});
  std::stable_sort(es.begin(), es.end(),
                   [](const Entry& a, const Entry& b) { return a.v > b.v; });
  std::vector<Piece> out;
  double cum = 0.0;
  for (const auto& e : es) {
    const double start = cum;
    cum += e.len;
    out.push_back({start, cum, e.v, 0.0, nullptr, 0, 0});
  }
  return PiecewiseFn(std::move(out));
}

inline PiecewiseFn random_step(std::mt19937_64& rng, int max_pieces) {
  static const double levels[] = {0.5, 1.0, 1.5, 2.0, 2.718281828459045, 3.5};
  std::uniform_int_distribution<int> npieces(1, max_pieces);
  std::uniform_real_distribution<double> width(0.05, 2.0);
  std::uniform_int_distribution<int> level_ix(0, 5);
  std::uniform_int_distribution<int> gap(0, 2);
  const int n = npieces(rng);
  double at = gap(rng) == 0 ? 0.0 : width(rng);
  std::vector<Piece> ps;
  for (int i = 0; i < n; ++i) {
    const double lo = at;
    const double hi = lo + width(rng);
    ps.push_back({lo, hi, levels[level_ix(rng)], 0.0, nullptr, 0, 0});
    at = hi + (gap(rng) == 0 ? 0.0 : width(rng));
  }
  return PiecewiseFn(std::move(ps));
}

inline bool exactly_equal(const PiecewiseFn& f, const PiecewiseFn& g) {
  const auto& a = f.pieces();
  const auto& b = g.pieces();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].lo != b[i].lo || a[i].hi != b[i].hi || a[i].coef != b[i].coef ||
        a[i].exp != b[i].exp || a[i].implicit() || b[i].implicit())
      return false;
  return true;
}

// ---- criteria -------------------------------------------------------------

inline Criterion c1_boyd_indices() {
  Criterion c{"boyd-index-ground-truth", false, "", 0.0};
  int checked = 0, good = 0;
  double worst = 0.0;
  for (double p : {0.5, 1.0, 1.5, 2.0, 4.0})
    for (double q : {1.0, 2.0, kInf}) {
      const auto rep =
          estimate_indices(SpaceSpec::lorentz(p, q), default_dilation_grid(), {});
      const double err = std::max(std::abs(rep.lower_index - p),
                                  std::abs(rep.upper_index - p));
      worst = std::max(worst, err);
      ++checked;
      if (err <= 0.05) ++good;
    }
  std::ostringstream os;
  os << good << "/" << checked << " Lorentz targets within 0.05 (worst err "
     << worst << ")";
  c.detail = os.str();
  c.pass = good == checked;
  return c;
}

inline Criterion c2_sharp_constant(double* c_at_2) {
  Criterion c{"sharp-hardy-constant", false, "", 0.0};
  bool ok = true;
  std::ostringstream os;
  for (double P : {1.5, 2.0, 3.0}) {
    const auto X = SpaceSpec::lorentz(P, P);
    const auto rep = boundedness_probe(HardyKind::upper(1.0, 1.0), X,
                                       default_probe_family(X), 12);
    const double sharp = P / (P - 1.0);
    double esc = 0.0;
    for (double v : rep.escalation_ratios) esc = std::max(esc, v);
    const bool here = rep.bounded && rep.constant <= sharp * (1.0 + 1e-6) &&
                      std::max(rep.constant, esc) >= 0.95 * sharp;
    ok = ok && here;
    if (P == 2.0 && c_at_2 != nullptr) *c_at_2 = rep.constant;
    os << " C(" << P << ")=" << rep.constant << "/" << sharp;
  }
  c.detail = "measured vs sharp:" + os.str();
  c.pass = ok;
  return c;
}

inline Criterion c3_dichotomy() {
  Criterion c{"boundedness-dichotomy-grid", false, "", 0.0};
  int checked = 0, good = 0;
  std::string bad;
  auto probe_one = [&](HardyKind kind, double P, bool expect_bounded) {
    const auto X = SpaceSpec::lorentz(P, P);
    const auto rep =
        boundedness_probe(kind, X, default_probe_family(X), 30);
    ++checked;
    if (rep.bounded == expect_bounded) {
      ++good;
    } else if (bad.empty()) {
      std::ostringstream os;
      os << (kind.upper_family() ? "upper(" : "lower(") << kind.index << ","
         << kind.r << ") on P=" << P;
      bad = os.str();
    }
  };
  for (double r : {1.0, 2.0}) {
    for (double p : {1.0, 2.0})
      for (double P : {1.0, 1.5, 2.0, 3.0})
        probe_one(HardyKind::upper(p, r), P, P > p);
    for (double q : {1.0, 2.0})
      for (double P : {1.0, 1.5, 2.0, 3.0})
        probe_one(HardyKind::lower(q, r), P, P < q);
  }
  std::ostringstream os;
  os << good << "/" << checked << " verdicts match the index comparison";
  if (!bad.empty()) os << " (first mismatch " << bad << ")";
  c.detail = os.str();
  c.pass = good == checked;
  return c;
}

inline Criterion c4_weak_space() {
  Criterion c{"weak-space-sup-counterexample", false, "", 0.0};
  const auto X = SpaceSpec::lorentz(2.0, kInf);
  const auto fam = default_probe_family(X);
  const auto up = boundedness_probe(HardyKind::upper(2.0, kInf), X, fam, 30);
  const auto lo = boundedness_probe(HardyKind::lower(2.0, kInf), X, fam, 30);
  std::ostringstream os;
  os << "upper(2,inf) " << (up.bounded ? "bounded C=" : "diverging ")
     << (up.bounded ? up.constant : 0.0) << ", lower(2,inf) "
     << (lo.bounded ? "bounded C=" : "diverging ")
     << (lo.bounded ? lo.constant : 0.0) << " on the weak space";
  c.detail = os.str();
  c.pass = up.bounded && lo.bounded;
  return c;
}

inline Criterion c5_converse_sharpness(double c_at_2) {
  Criterion c{"converse-bound-sharpness", false, "", 0.0};
  const auto cb = converse_bound(1.0, 1.0, c_at_2);
  std::ostringstream os;
  os << "kappa(C=" << c_at_2 << ") = " << cb.kappa << ", target 2 +- 0.02";
  c.detail = os.str();
  c.pass = std::abs(cb.kappa - 2.0) <= 0.02;
  return c;
}

inline Criterion c6_iteration() {
  Criterion c{"iteration-formula", false, "", 0.0};
  const auto corpus = corpus10();
  const auto pts = log_grid(1e-2, 1e2, 30);
  const double pairs[][2] = {{2.0, 1.0}, {1.5, 2.0}};
  double worst = 0.0;
  for (const auto& pr : pairs)
    for (const auto& f : corpus) {
      Chain chain = Chain::level1(pr[0], pr[1], f);
      for (int n = 0; n <= 4; ++n) {
        if (n > 0) chain = chain.next();
        const IteratedHardy it = iterated_apply(pr[0], pr[1], n, f);
        for (double t : pts) {
          const double a = it(t);
          const double b = chain.value(t);
          if (!is_finite(a) || !is_finite(b)) {
            worst = kInf;
            continue;
          }
          const double err = std::abs(a - b) / std::max(b, 1e-300);
          worst = std::max(worst, err);
        }
      }
    }
  bool minorant_ok = true;
  std::mt19937_64 rng(0x5eedacc6ULL);
  std::uniform_int_distribution<int> pick_n(0, 4);
  std::uniform_int_distribution<std::size_t> pick_f(0, corpus.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto& pr = pairs[i % 2];
    const int n = pick_n(rng);
    const double a = std::pow(10.0, -3.0 * unit(rng)) * 0.999;
    const double t = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    const auto& f = corpus[pick_f(rng)];
    const double lo = dilation_minorant(pr[0], pr[1], n, a, f, t);
    const double hi = iterated_apply(pr[0], pr[1], n, f)(t);
    if (!(lo <= hi * (1.0 + 1e-9))) minorant_ok = false;
  }
  std::ostringstream os;
  os << "composition agreement worst rel err " << worst
     << "; minorant dominated at 1000 triples: " << (minorant_ok ? "yes" : "no");
  c.detail = os.str();
  c.pass = worst <= 1e-6 && minorant_ok;
  return c;
}

inline Criterion c7_k_equivalence() {
  Criterion c{"k-functional-equivalence", false, "", 0.0};
  std::vector<PiecewiseFn> corpus;
  corpus.push_back(PiecewiseFn::indicator(0.0, 1.0));
  corpus.push_back(PiecewiseFn::from_power_pieces({{0.0, 1.0, 2.0, 0.0},
                                                   {1.0, 3.0, 1.0, 0.0}}));
  corpus.push_back(PiecewiseFn::power(1.0, -0.25, 0.0, 2.0));
  corpus.push_back(PiecewiseFn::power(1.0, -0.5, 1e-2, 1.0));
  const auto grid = log_grid(1e-3, 1e3, 11);
  struct Band {
    double p, r, q, s, lo, hi;
  };
  // Frozen calibrated bands for this corpus and grid.
  const Band bands[] = {{1.0, 1.0, kInf, kInf, 0.45, 1.0},
                        {1.0, 1.0, 2.0, 2.0, 0.65, 1.0},
                        {2.0, 2.0, kInf, kInf, 0.45, 1.0},
                        {1.0, 2.0, 3.0, 1.0, 0.70, 3.0}};
  bool in_band = true;
  double drift = 0.0;
  for (const auto& b : bands)
    for (const auto& f : corpus) {
      const auto sweep = holmstedt_sweep(f, b.p, b.r, b.q, b.s, grid, 64);
      if (sweep.min_ratio < b.lo - 1e-9 || sweep.max_ratio > b.hi + 1e-6)
        in_band = false;
      for (double t : {1e-2, 1.0, 1e2}) {
        const auto coarse = k_bruteforce(f, t, b.p, b.r, b.q, b.s, 64);
        const auto fine = k_bruteforce(f, t, b.p, b.r, b.q, b.s, 128);
        if (coarse.brute_inf > 0.0)
          drift = std::max(drift, std::abs(coarse.brute_inf - fine.brute_inf) /
                                      coarse.brute_inf);
      }
    }
  std::ostringstream os;
  os << "ratios " << (in_band ? "inside" : "OUTSIDE")
     << " frozen bands; max cut-grid drift " << drift;
  c.detail = os.str();
  c.pass = in_band && drift < 0.01;
  return c;
}

inline Criterion c8_compression_chain() {
  Criterion c{"sum-space-compression-chain", false, "", 0.0};
  const auto X = SpaceSpec::lorentz(2.0, 2.0);
  const auto Y = SpaceSpec::lorentz(1.0, 1.0);
  const auto grid = log_grid(1e-3, 1e3, 200);
  int good = 0, checked = 0;
  for (const auto& f : corpus10()) {
    const auto rep = theorem7_verify(X, Y, f, 64);
    ++checked;
    if (rep.chain_ok && rep.norm_sum <= rep.norm_h * (1.0 + 1e-9) &&
        sandwich_check(f, grid))
      ++good;
  }
  std::ostringstream os;
  os << good << "/" << checked << " corpus members satisfy chain and sandwich";
  c.detail = os.str();
  c.pass = good == checked;
  return c;
}

inline Criterion c9_oracles() {
  Criterion c{"oracle-equivalence", false, "", 0.0};
  std::mt19937_64 rng(0x5eedacc9ULL);
  int rearr_good = 0;
  for (int i = 0; i < 500; ++i) {
    const auto f = random_step(rng, 10);
    if (exactly_equal(rearrange(f), step_sort_oracle(f))) ++rearr_good;
  }
  // Closed-form power integrals against raw adaptive quadrature.
  std::uniform_real_distribution<double> coef(0.1, 3.0);
  std::uniform_real_distribution<double> expd(-0.9, 2.0);
  std::uniform_real_distribution<double> edge(0.1, 4.0);
  const double rs[] = {0.7, 1.0, 2.0};
  const double betas[] = {0.5, 1.0, 2.0};
  int quad_good = 0;
  for (int i = 0; i < 500; ++i) {
    const double cf = coef(rng);
    double ex = expd(rng);
    const double r = rs[i % 3];
    double beta = betas[(i / 3) % 3];
    if (i % 7 == 0) beta = -r * ex;  // exercise the logarithmic branch
    if (!(beta > 0.05)) beta = 1.0;
    double x1 = edge(rng), x2 = edge(rng);
    if (x1 > x2) std::swap(x1, x2);
    if (!(x2 > x1)) x2 = x1 + 0.5;
    if (i % 5 == 0) x1 = 0.0;
    if (x1 == 0.0 && r * ex + beta <= 0.05) ex = 0.0;
    const auto f = PiecewiseFn::power(cf, ex, x1 == 0.0 ? 0.0 : x1,
                                      x2 + (i % 5 == 0 ? 1.0 : 0.0));
    const double a = x1, b = std::min(x2, f.support_end());
    const double closed = power_integral(f, r, beta, a, b);
    auto g = [&](double s) {
      return pow_pos(cf * pow_ext(s, ex), r) * beta * pow_ext(s, beta - 1.0);
    };
    const double quad = a == 0.0
                            ? boydkit::integrate_down_to_zero(
                                  g, b, QuadTol{1e-12, 1e-16})
                            : integrate_finite(g, a, b, QuadTol{1e-12, 1e-16});
    if (is_finite(closed) && is_finite(quad) &&
        std::abs(closed - quad) <= 1e-8 * std::max(std::abs(closed), 1e-12))
      ++quad_good;
  }
  std::ostringstream os;
  os << rearr_good << "/500 rearrangements exact, " << quad_good
     << "/500 integrals within 1e-8";
  c.detail = os.str();
  c.pass = rearr_good == 500 && quad_good == 500;
  return c;
}

inline Criterion c10_aggregation() {
  Criterion c{"aggregation-inequality", false, "", 0.0};
  struct Fixture {
    double p, q, rho, cagg;
  };
  // Frozen calibrated constants (seed pinned with them).
  const Fixture fixtures[] = {
      {2.0, 2.0, 2.0, 1.0},  {1.0, 1.0, 1.0, 1.0}, {2.0, 1.0, 1.0, 1.0},
      {1.0, 2.0, 1.0, 1.08}, {0.5, 0.5, 0.5, 1.0}, {3.0, 3.0, 2.0, 1.0}};
  std::mt19937_64 rng(0x5eed1007ULL);
  bool ok = true;
  double worst_normed = 0.0;
  for (const auto& fx : fixtures) {
    const auto X = SpaceSpec::lorentz(fx.p, fx.q);
    const double u = aggregation_exponent(X, fx.rho);
    const bool normed = fx.p >= 1.0 && fx.q >= 1.0 &&
                        fx.rho <= std::min(fx.p, fx.q) && fx.cagg == 1.0;
    for (int fam = 0; fam < 200; ++fam) {
      std::uniform_int_distribution<int> count(1, 8);
      const int n = count(rng);
      std::vector<PiecewiseFn> fs;
      for (int i = 0; i < n; ++i) fs.push_back(random_step(rng, 6));
      const auto chk = lemma_aggregate_check(X, fx.rho, fs, u);
      if (!(chk.lhs <= fx.cagg * chk.rhs * (1.0 + 1e-9))) ok = false;
      if (normed && chk.rhs > 0.0)
        worst_normed = std::max(worst_normed, chk.lhs / chk.rhs);
    }
  }
  std::ostringstream os;
  os << "six spaces x 200 families; worst normed ratio " << worst_normed;
  c.detail = os.str();
  c.pass = ok && worst_normed <= 1.0 + 1e-9;
  return c;
}

}  // namespace detail

inline std::vector<Criterion> run_all() {
  std::vector<Criterion> out;
  double c_at_2 = 2.0;
  const struct {
    std::function<Criterion()> fn;
    double limit_s;
  } steps[] = {
      {[] { return detail::c1_boyd_indices(); }, 10.0},
      {[&c_at_2] { return detail::c2_sharp_constant(&c_at_2); }, 30.0},
      {[] { return detail::c3_dichotomy(); }, 120.0},
      {[] { return detail::c4_weak_space(); }, 0.0},
      {[&c_at_2] { return detail::c5_converse_sharpness(c_at_2); }, 0.0},
      {[] { return detail::c6_iteration(); }, 0.0},
      {[] { return detail::c7_k_equivalence(); }, 0.0},
      {[] { return detail::c8_compression_chain(); }, 0.0},
      {[] { return detail::c9_oracles(); }, 0.0},
      {[] { return detail::c10_aggregation(); }, 0.0},
  };
  for (const auto& step : steps) {
    const auto start = std::chrono::steady_clock::now();
    Criterion c = step.fn();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
    if (step.limit_s > 0.0 && c.seconds >= step.limit_s) {
      c.pass = false;
      c.detail += " [exceeded " + std::to_string(step.limit_s) + "s budget]";
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline bool run_table(std::ostream& os) {
  const auto rows = run_all();
  bool all = true;
  int i = 0;
  for (const auto& c : rows) {
    ++i;
    std::ostringstream t;
    t.setf(std::ios::fixed);
    t.precision(2);
    t << c.seconds;
    os << (c.pass ? "PASS" : "FAIL") << " " << i << " " << c.name << " ("
       << t.str() << "s): " << c.detail << "\n";
    all = all && c.pass;
  }
  os << (all ? "ACCEPTANCE: all criteria passed"
             : "ACCEPTANCE: criteria failed")
     << "\n";
  return all;
}

}  // namespace boydkit::acceptance
