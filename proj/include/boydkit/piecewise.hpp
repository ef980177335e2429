#pragma once

// Piecewise-power functions on the half line (0, inf).
//
// The working class consists of finitely many right-open intervals [lo, hi)
// carrying one power term coef * s^exp each.  This class is closed under
// dilation, restriction, capping at a level, and value scaling, and all of
// its integrals against d(s^beta) have closed forms.  It is NOT closed under
// decreasing rearrangement: already a single decreasing piece anchored away
// from the origin rearranges to a shifted power.  Rearrangement therefore
// emits, where necessary, "implicit" pieces that store the exact band of the
// distribution function d(t) = A + sum_j B_j t^gamma_j whose inverse the
// rearrangement is.  Implicit pieces evaluate by monotone inversion to
// machine precision, their distribution is again closed form, and their
// integrals run through the substitution s = d(t), which has a finite
// t-range even when the s-support is unbounded.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "boydkit/logpow.hpp"
#include "boydkit/quadrature.hpp"
#include "boydkit/reals.hpp"

namespace boydkit {

// Thrown by rearrange when the input does not vanish at infinity, so the
// decreasing rearrangement would be identically above some positive level.
struct NonVanishingError : std::runtime_error {
  NonVanishingError() : std::runtime_error(
      "rearrange: function does not vanish at infinity") {}
};

// One power term on [lo, hi): value coef * s^exp.  hi may be +inf.
struct PowerPiece {
  double lo = 0.0;
  double hi = 0.0;
  double coef = 0.0;
  double exp = 0.0;
};

// One term of a distribution band.
struct BandTerm {
  double B = 0.0;
  double gamma = 0.0;
};

// d(t) = A + sum_j B_j t^gamma_j, strictly decreasing on the band's range.
struct ImplicitBand {
  double A = 0.0;
  std::vector<BandTerm> terms;

  double eval(double t) const {
    double s = A;
    for (const auto& tm : terms) s += tm.B * pow_ext(t, tm.gamma);
    return s;
  }
  double deriv(double t) const {
    double s = 0.0;
    for (const auto& tm : terms)
      s += tm.B * tm.gamma * pow_ext(t, tm.gamma - 1.0);
    return s;
  }
};

// A piece of a PiecewiseFn.  Pure pieces carry coef/exp; implicit pieces
// reference a band and the value range (tlo, thi] they cover, with
// value(lo) = thi and value(s) -> tlo as s -> hi.
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  double coef = 0.0;
  double exp = 0.0;
  std::shared_ptr<const ImplicitBand> band;
  double tlo = 0.0;
  double thi = 0.0;

  bool implicit() const { return band != nullptr; }

  // Monotone inversion of band.eval on [tlo, thi]; exact to roundoff.
  double invert(double s) const {
    double hi_t = thi;
    double lo_t = tlo;
    if (band->eval(hi_t) >= s) return hi_t;
    if (lo_t > 0.0 && band->eval(lo_t) <= s) return lo_t;
    if (lo_t == 0.0) {
      // Expand downward to a finite bracket; band -> inf as t -> 0.
      double probe = hi_t;
      while (band->eval(probe) < s && probe > 1e-300) probe *= 0.5;
      lo_t = probe;
      hi_t = std::min(thi, probe * 2.0);
    }
    for (int i = 0; i < 110; ++i) {
      const double mid = 0.5 * (lo_t + hi_t);
      if (mid == lo_t || mid == hi_t) break;
      if (band->eval(mid) > s)
        lo_t = mid;
      else
        hi_t = mid;
    }
    return 0.5 * (lo_t + hi_t);
  }

  double value(double s) const {
    if (!implicit()) return coef == 0.0 ? 0.0 : coef * pow_ext(s, exp);
    return invert(s);
  }
  // Value as s -> lo from the right.
  double value_at_lo() const {
    if (implicit()) return thi;
    return coef == 0.0 ? 0.0 : coef * pow_ext(lo, exp);
  }
  // Limit of the value as s -> hi from the left.
  double value_at_hi() const {
    if (implicit()) return tlo;
    return coef == 0.0 ? 0.0 : coef * pow_ext(hi, exp);
  }
  bool nonincreasing() const {
    if (implicit()) return true;
    return coef == 0.0 || exp <= 0.0;
  }
};

namespace detail {

inline void validate_pieces(const std::vector<Piece>& ps) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Piece& p = ps[i];
    const std::string tag = "piece " + std::to_string(i);
    if (!(p.lo >= 0.0) || std::isinf(p.lo))
      throw std::invalid_argument(tag + ": lo must be a nonnegative real");
    if (!(p.hi > p.lo))
      throw std::invalid_argument(tag + ": hi must exceed lo");
    if (!p.implicit()) {
      if (!(p.coef >= 0.0) || !is_finite(p.coef))
        throw std::invalid_argument(tag + ": negative or non-finite coef");
      if (!is_finite(p.exp))
        throw std::invalid_argument(tag + ": non-finite exp");
    }
    if (i > 0 && ps[i - 1].hi > p.lo * (1.0 + 1e-15))
      throw std::invalid_argument(tag + ": overlaps piece " +
                                  std::to_string(i - 1));
  }
}

}  // namespace detail

class PiecewiseFn {
 public:
  PiecewiseFn() = default;

  explicit PiecewiseFn(std::vector<Piece> ps) {
    std::stable_sort(ps.begin(), ps.end(),
                     [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    detail::validate_pieces(ps);
    // Canonical form: drop null pieces, merge touching pieces with equal
    // coefficient and exponent.
    for (const Piece& p : ps) {
      if (!p.implicit() && p.coef == 0.0) continue;
      if (!pieces_.empty()) {
        Piece& prev = pieces_.back();
        const bool touching = rel_close(prev.hi, p.lo);
        if (touching && !prev.implicit() && !p.implicit() &&
            rel_close(prev.coef, p.coef) && rel_close(prev.exp, p.exp)) {
          prev.hi = p.hi;
          continue;
        }
      }
      pieces_.push_back(p);
    }
  }

  static PiecewiseFn from_power_pieces(const std::vector<PowerPiece>& pp) {
    std::vector<Piece> ps;
    ps.reserve(pp.size());
    for (const auto& q : pp) ps.push_back({q.lo, q.hi, q.coef, q.exp, nullptr, 0, 0});
    return PiecewiseFn(std::move(ps));
  }

  // coef * s^exp restricted to [lo, hi).
  static PiecewiseFn power(double coef, double exp, double lo, double hi) {
    return from_power_pieces({{lo, hi, coef, exp}});
  }
  static PiecewiseFn indicator(double lo, double hi, double height = 1.0) {
    return power(height, 0.0, lo, hi);
  }
  static PiecewiseFn zero() { return PiecewiseFn(); }

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  bool is_step() const {
    for (const auto& p : pieces_)
      if (p.implicit() || p.exp != 0.0) return false;
    return true;
  }

  double support_end() const {
    return pieces_.empty() ? 0.0 : pieces_.back().hi;
  }
  double support_begin() const {
    return pieces_.empty() ? 0.0 : pieces_.front().lo;
  }

  // Largest finite breakpoint (0 when there is none).
  double last_finite_breakpoint() const {
    double b = 0.0;
    for (const auto& p : pieces_) {
      if (is_finite(p.lo)) b = std::max(b, p.lo);
      if (is_finite(p.hi)) b = std::max(b, p.hi);
    }
    return b;
  }
  double first_positive_breakpoint() const {
    for (const auto& p : pieces_) {
      if (p.lo > 0.0) return p.lo;
      if (p.hi > 0.0 && is_finite(p.hi)) return p.hi;
    }
    return 0.0;
  }

  // All piece end points, sorted, finite, in (0, inf).
  std::vector<double> breakpoints() const {
    std::vector<double> bs;
    for (const auto& p : pieces_) {
      if (p.lo > 0.0 && is_finite(p.lo)) bs.push_back(p.lo);
      if (is_finite(p.hi)) bs.push_back(p.hi);
    }
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    return bs;
  }

 private:
  std::vector<Piece> pieces_;
};

// Point evaluation; intervals are right-open, gaps evaluate to 0.
inline double evaluate(const PiecewiseFn& f, double s) {
  for (const auto& p : f.pieces()) {
    if (s < p.lo) return 0.0;
    if (s < p.hi) return p.value(s);
  }
  return 0.0;
}

// Limit of f from the left at s > 0.
inline double left_limit(const PiecewiseFn& f, double s) {
  for (const auto& p : f.pieces()) {
    if (s <= p.lo) return 0.0;
    if (s <= p.hi) return s < p.hi ? p.value(s) : p.value_at_hi();
  }
  return 0.0;
}

// Essential supremum over the half line.
inline double sup_value(const PiecewiseFn& f) {
  double m = 0.0;
  for (const auto& p : f.pieces())
    m = std::max({m, p.value_at_lo(), p.value_at_hi()});
  return m;
}

// Lebesgue measure of { s : f(s) > level }, exact per piece.
inline double distribution(const PiecewiseFn& f, double level) {
  if (!(level >= 0.0))
    throw std::invalid_argument("distribution: level must be nonnegative");
  double total = 0.0;
  for (const auto& p : f.pieces()) {
    double contrib = 0.0;
    if (p.implicit()) {
      if (level >= p.thi) {
        contrib = 0.0;
      } else if (level <= p.tlo) {
        contrib = p.hi - p.lo;
      } else {
        const double cut = std::clamp(p.band->eval(level), p.lo, p.hi);
        contrib = cut - p.lo;
      }
    } else if (p.coef == 0.0) {
      contrib = 0.0;
    } else if (p.exp == 0.0) {
      contrib = p.coef > level ? p.hi - p.lo : 0.0;
    } else if (level == 0.0) {
      contrib = p.hi - p.lo;
    } else {
      const double x = std::pow(level / p.coef, 1.0 / p.exp);
      if (p.exp < 0.0) {
        contrib = std::max(0.0, std::min(p.hi, x) - p.lo);
      } else {
        contrib = std::max(0.0, p.hi - std::max(p.lo, x));
      }
    }
    total += contrib;
    if (std::isinf(total)) return kInf;
  }
  return total;
}

// True when f is its own decreasing rearrangement: support starts at 0 with
// no interior gaps and values never increase across or inside pieces.
inline bool is_nonincreasing_from_zero(const PiecewiseFn& f) {
  if (f.empty()) return true;
  const auto& ps = f.pieces();
  if (ps.front().lo != 0.0) return false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!ps[i].nonincreasing()) return false;
    if (i > 0) {
      if (ps[i - 1].hi != ps[i].lo) return false;  // interior gap
      const double prev_end = ps[i - 1].value_at_hi();
      const double next_start = ps[i].value_at_lo();
      if (next_start > prev_end * (1.0 + 1e-12) + 1e-300) return false;
    }
  }
  return true;
}

namespace detail {

// Monotone (non-plateau) piece summary used while building rearrangements.
struct MonoPart {
  double vbot = 0.0;   // value at the low end of the range
  double vtop = 0.0;   // value at the high end (may be inf)
  double len = 0.0;    // hi - lo (may be inf)
  double A = 0.0;      // constant part of its measure-above function
  std::vector<BandTerm> terms;
};

inline void add_term(std::vector<BandTerm>& terms, double B, double gamma) {
  for (auto& t : terms)
    if (t.gamma == gamma) {
      t.B += B;
      return;
    }
  terms.push_back({B, gamma});
}

}  // namespace detail

// Decreasing rearrangement f*(s) = inf { t >= 0 : distribution(f, t) <= s }.
// Exact: plateaus sort exactly, monotone pieces invert their distribution
// bands either as pure powers (anchored bands) or as implicit pieces.
inline PiecewiseFn rearrange(const PiecewiseFn& f) {
  if (f.empty()) return f;
  // Vanishing check: a piece reaching infinity must have values tending to 0.
  for (const auto& p : f.pieces()) {
    if (!std::isinf(p.hi)) continue;
    const bool vanishes = p.implicit() ? p.tlo == 0.0 : (p.coef == 0.0 || p.exp < 0.0);
    if (!vanishes) throw NonVanishingError();
  }
  if (is_nonincreasing_from_zero(f)) return f;

  // Exact sort path for step functions, mirroring the obvious oracle's
  // arithmetic (sequential accumulation in value-sorted, index-stable order).
  if (f.is_step()) {
    struct Lv {
      double v, len;
    };
    std::vector<Lv> lv;
    for (const auto& p : f.pieces()) lv.push_back({p.coef, p.hi - p.lo});
    std::stable_sort(lv.begin(), lv.end(),
                     [](const Lv& a, const Lv& b) { return a.v > b.v; });
    std::vector<Piece> out;
    double cum = 0.0;
    for (std::size_t i = 0; i < lv.size();) {
      std::size_t j = i;
      const double start = cum;
      while (j < lv.size() && lv[j].v == lv[i].v) {
        cum += lv[j].len;
        ++j;
      }
      out.push_back({start, cum, lv[i].v, 0.0, nullptr, 0, 0});
      i = j;
    }
    return PiecewiseFn(std::move(out));
  }

  // General path: walk the critical values of the distribution function.
  std::vector<detail::MonoPart> mono;
  struct Plateau {
    double v, len;
  };
  std::vector<Plateau> plateaus;
  bool unbounded_values = false;
  for (const auto& p : f.pieces()) {
    if (p.implicit()) {
      detail::MonoPart m;
      m.vbot = p.tlo;
      m.vtop = p.thi;
      m.len = p.hi - p.lo;
      m.A = p.band->A - p.lo;
      m.terms = p.band->terms;
      if (std::isinf(m.vtop)) unbounded_values = true;
      mono.push_back(std::move(m));
    } else if (p.coef == 0.0) {
      continue;
    } else if (p.exp == 0.0) {
      plateaus.push_back({p.coef, p.hi - p.lo});
    } else {
      detail::MonoPart m;
      const double at_lo = p.coef * pow_ext(p.lo, p.exp);
      const double at_hi = p.coef * pow_ext(p.hi, p.exp);
      m.len = p.hi - p.lo;
      const double gamma = 1.0 / p.exp;
      const double B = std::pow(p.coef, -gamma);
      if (p.exp < 0.0) {
        m.vbot = at_hi;
        m.vtop = at_lo;
        m.A = -p.lo;
        m.terms.push_back({B, gamma});
      } else {
        m.vbot = at_lo;
        m.vtop = at_hi;
        m.A = p.hi;
        m.terms.push_back({-B, gamma});
      }
      if (std::isinf(m.vtop)) unbounded_values = true;
      mono.push_back(std::move(m));
    }
  }

  // Critical levels, descending.
  std::vector<double> crit;
  for (const auto& m : mono) {
    if (m.vbot > 0.0 && is_finite(m.vbot)) crit.push_back(m.vbot);
    if (m.vtop > 0.0 && is_finite(m.vtop)) crit.push_back(m.vtop);
  }
  for (const auto& pl : plateaus) crit.push_back(pl.v);
  std::sort(crit.begin(), crit.end(), std::greater<double>());
  crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

  std::vector<Piece> out;
  auto emit_band = [&](double vlo, double vhi, double slo, double shi) -> bool {
    // Band of levels (vlo, vhi); emit the rearranged piece on [slo, shi).
    if (!(shi > slo)) return false;
    double A = 0.0;
    std::vector<BandTerm> terms;
    for (const auto& m : mono) {
      if (m.vbot >= vhi) {
        A += m.len;  // entirely above the band
      } else if (m.vtop >= vhi && m.vbot <= vlo) {
        A += m.A;
        for (const auto& t : m.terms) detail::add_term(terms, t.B, t.gamma);
      }
    }
    for (const auto& pl : plateaus)
      if (pl.v >= vhi) A += pl.len;
    if (terms.empty()) return false;
    if (terms.size() == 1 && A == 0.0 && terms[0].B > 0.0) {
      const double gamma = terms[0].gamma;
      const double coef = std::pow(terms[0].B, -1.0 / gamma);
      out.push_back({slo, shi, coef, 1.0 / gamma, nullptr, 0, 0});
      return true;
    }
    auto band = std::make_shared<ImplicitBand>();
    band->A = A;
    band->terms = std::move(terms);
    Piece p;
    p.lo = slo;
    p.hi = shi;
    p.band = std::move(band);
    p.tlo = vlo;
    p.thi = vhi;
    out.push_back(std::move(p));
    return true;
  };

  // s boundaries come from the exact distribution at each critical level;
  // a running cursor keeps the output structurally contiguous even when
  // consecutive distribution values agree only to roundoff.
  std::vector<double> dv(crit.size());
  for (std::size_t i = 0; i < crit.size(); ++i) dv[i] = distribution(f, crit[i]);
  if (!dv.empty() && dv.front() != 0.0 && !unbounded_values) {
    // Roundoff guard: the top level has nothing above it.
    if (dv.front() < 1e-12 * f.last_finite_breakpoint()) dv.front() = 0.0;
  }
  const double d0 = distribution(f, 0.0);

  double cursor = 0.0;
  if (unbounded_values && !crit.empty()) {
    if (emit_band(crit.front(), kInf, 0.0, dv.front())) cursor = dv.front();
  }
  for (std::size_t i = 0; i < crit.size(); ++i) {
    double jump = 0.0;
    for (const auto& pl : plateaus)
      if (pl.v == crit[i]) jump += pl.len;
    if (jump > 0.0) {
      out.push_back({cursor, cursor + jump, crit[i], 0.0, nullptr, 0, 0});
      cursor += jump;
    }
    const double band_lo_value = (i + 1 < crit.size()) ? crit[i + 1] : 0.0;
    const double band_shi =
        std::max(cursor, (i + 1 < crit.size()) ? dv[i + 1] : d0);
    if (emit_band(band_lo_value, crit[i], cursor, band_shi)) cursor = band_shi;
  }
  return PiecewiseFn(std::move(out));
}

// Dilation (D_a f)(s) = f(a s); exact on both piece kinds.
inline PiecewiseFn dilate(const PiecewiseFn& f, double a) {
  if (!(a > 0.0) || !is_finite(a))
    throw std::invalid_argument("dilate: scale must be a positive real");
  std::vector<Piece> out;
  out.reserve(f.pieces().size());
  for (const auto& p : f.pieces()) {
    Piece q = p;
    q.lo = p.lo / a;
    q.hi = p.hi / a;
    if (p.implicit()) {
      auto band = std::make_shared<ImplicitBand>();
      band->A = p.band->A / a;
      band->terms = p.band->terms;
      for (auto& t : band->terms) t.B /= a;
      q.band = std::move(band);
    } else {
      q.coef = p.coef * pow_pos(a, p.exp);
    }
    out.push_back(std::move(q));
  }
  return PiecewiseFn(std::move(out));
}

// Pointwise scaling lambda * f, lambda >= 0; exact on both piece kinds.
inline PiecewiseFn scale_values(const PiecewiseFn& f, double lambda) {
  if (!(lambda >= 0.0) || !is_finite(lambda))
    throw std::invalid_argument("scale_values: factor must be nonnegative");
  if (lambda == 0.0) return PiecewiseFn();
  std::vector<Piece> out;
  for (const auto& p : f.pieces()) {
    Piece q = p;
    if (p.implicit()) {
      // value' = lambda * value: band'(t) = band(t / lambda).
      auto band = std::make_shared<ImplicitBand>();
      band->A = p.band->A;
      band->terms = p.band->terms;
      for (auto& t : band->terms) t.B *= pow_pos(lambda, -t.gamma);
      q.band = std::move(band);
      q.tlo = p.tlo * lambda;
      q.thi = p.thi * lambda;
    } else {
      q.coef = p.coef * lambda;
    }
    out.push_back(std::move(q));
  }
  return PiecewiseFn(std::move(out));
}

// Restriction f * chi_[x, y).
inline PiecewiseFn restrict_to(const PiecewiseFn& f, double x, double y) {
  if (!(y > x)) return PiecewiseFn();
  std::vector<Piece> out;
  for (const auto& p : f.pieces()) {
    const double lo = std::max(p.lo, x);
    const double hi = std::min(p.hi, y);
    if (!(hi > lo)) continue;
    Piece q = p;
    q.lo = lo;
    q.hi = hi;
    if (p.implicit()) {
      if (lo > p.lo) q.thi = p.invert(lo);
      if (hi < p.hi) q.tlo = p.invert(hi);
    }
    out.push_back(std::move(q));
  }
  return PiecewiseFn(std::move(out));
}

// min(f, v) for a level v >= 0; exact split at the crossing point (pieces
// are monotone, so there is at most one per piece).
inline PiecewiseFn min_with(const PiecewiseFn& f, double v) {
  if (v == 0.0) return PiecewiseFn();
  std::vector<Piece> out;
  for (const auto& p : f.pieces()) {
    const double at_lo = p.value_at_lo();
    const double at_hi = p.value_at_hi();
    if (std::max(at_lo, at_hi) <= v) {
      out.push_back(p);
      continue;
    }
    if (std::min(at_lo, at_hi) >= v) {
      out.push_back({p.lo, p.hi, v, 0.0, nullptr, 0, 0});
      continue;
    }
    // One crossing inside the piece.
    double cut;
    if (p.implicit()) {
      cut = std::clamp(p.band->eval(v), p.lo, p.hi);
    } else {
      cut = std::clamp(std::pow(v / p.coef, 1.0 / p.exp), p.lo, p.hi);
    }
    const bool high_side_first = at_lo > at_hi;
    if (cut > p.lo) {
      if (high_side_first) {
        out.push_back({p.lo, cut, v, 0.0, nullptr, 0, 0});
      } else {
        Piece q = p;
        q.hi = cut;
        if (p.implicit()) q.tlo = v;
        out.push_back(std::move(q));
      }
    }
    if (p.hi > cut) {
      if (high_side_first) {
        Piece q = p;
        q.lo = cut;
        if (p.implicit()) q.thi = v;
        out.push_back(std::move(q));
      } else {
        out.push_back({cut, p.hi, v, 0.0, nullptr, 0, 0});
      }
    }
  }
  return PiecewiseFn(std::move(out));
}

namespace detail {

// int_pow extended to the end points 0 and inf; +inf on divergence
// (nonnegative integrands only).
inline double int_pow_ext(double a, double x1, double x2) {
  const double e = a + 1.0;
  if (x1 == 0.0) {
    if (e <= 0.0) return kInf;
    const double head = pow_pos(x2, e) / e;
    return std::isinf(x2) ? kInf : head;
  }
  if (std::isinf(x2)) {
    if (e >= 0.0) return kInf;
    return -pow_pos(x1, e) / e;
  }
  return int_pow(a, x1, x2);
}

// Integral of f^r d(s^beta) over [x1, x2] inside an implicit piece, via the
// substitution s = band(t):  integral of t^r * beta * band^(beta-1) * |band'|.
inline double implicit_power_integral(const Piece& p, double r, double beta,
                                      double x1, double x2) {
  const double t_hi = x1 <= p.lo ? p.thi : p.invert(x1);
  const double t_lo = x2 >= p.hi ? p.tlo : p.invert(x2);
  if (!(t_hi > t_lo)) return 0.0;
  const QuadTol qt{1e-12, 1e-16};
  // The t -> t_lo half (s large) integrates in t-space, where an unbounded
  // s-support becomes a finite range; the t -> t_hi half (s near x1)
  // integrates in s-space, since evaluating the band near its root loses all
  // precision to cancellation while the inversion stays stable.
  const double mid_t = t_lo == 0.0 ? 0.5 * t_hi : 0.5 * (t_lo + t_hi);
  auto g = [&](double t) {
    const double s = p.band->eval(t);
    return pow_pos(t, r) * beta * pow_ext(s, beta - 1.0) *
           std::abs(p.band->deriv(t));
  };
  double lower;
  if (t_lo == 0.0) {
    // Divergence pretest: near t = 0 the integrand behaves like a power with
    // exponent r + gamma_min * beta - 1.
    double gmin = 0.0;
    for (const auto& tm : p.band->terms) gmin = std::min(gmin, tm.gamma);
    if (r + gmin * beta <= 0.0) return kInf;
    lower = integrate_down_to_zero(g, mid_t, qt);
  } else {
    lower = integrate_finite(g, t_lo, mid_t, qt);
  }
  const double s_mid = p.band->eval(mid_t);
  const double s_lo_end = std::max(x1, p.lo);
  auto h = [&](double s) {
    return pow_pos(p.invert(s), r) * beta * pow_ext(s, beta - 1.0);
  };
  double upper;
  if (!(s_mid > s_lo_end)) {
    upper = 0.0;
  } else if (s_lo_end == 0.0) {
    upper = integrate_down_to_zero(h, s_mid, qt);
  } else {
    upper = integrate_finite(h, s_lo_end, s_mid, qt);
  }
  return lower + upper;
}

}  // namespace detail

// integral over [lo, hi] of f(s)^r d(s^beta)  =  beta * integral f^r s^(beta-1) ds.
// Exact per pure piece (log branch included); implicit pieces integrate by
// substitution.  Divergence is the value +inf, not an error.
inline double power_integral(const PiecewiseFn& f, double r, double beta,
                             double lo, double hi) {
  if (!(r > 0.0)) throw std::invalid_argument("power_integral: r must be > 0");
  if (!(beta > 0.0))
    throw std::invalid_argument("power_integral: beta must be > 0");
  if (!(hi > lo)) return 0.0;
  double total = 0.0;
  for (const auto& p : f.pieces()) {
    const double x1 = std::max(p.lo, lo);
    const double x2 = std::min(p.hi, hi);
    if (!(x2 > x1)) continue;
    double piece_val;
    if (p.implicit()) {
      piece_val = detail::implicit_power_integral(p, r, beta, x1, x2);
    } else if (p.coef == 0.0) {
      piece_val = 0.0;
    } else {
      const double a = r * p.exp + beta - 1.0;
      piece_val = std::pow(p.coef, r) * beta * detail::int_pow_ext(a, x1, x2);
    }
    total += piece_val;
    if (std::isinf(total)) return kInf;
  }
  return total;
}

// Pointwise (sum_i f_i^rho)^(1/rho) for step functions on a common refined
// grid.  Sums of general power pieces leave the representable class, so this
// is deliberately step-only.
inline PiecewiseFn power_sum(const std::vector<PiecewiseFn>& fs, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("power_sum: rho must be > 0");
  for (const auto& f : fs)
    if (!f.is_step())
      throw std::invalid_argument("power_sum: all inputs must be step functions");
  std::vector<double> grid;
  for (const auto& f : fs)
    for (const auto& p : f.pieces()) {
      grid.push_back(p.lo);
      grid.push_back(p.hi);
    }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    double acc = 0.0;
    for (const auto& f : fs) {
      const double v = evaluate(f, mid);
      if (v > 0.0) acc += std::pow(v, rho);
    }
    if (acc > 0.0)
      out.push_back({grid[i], grid[i + 1], std::pow(acc, 1.0 / rho), 0.0,
                     nullptr, 0, 0});
  }
  return PiecewiseFn(std::move(out));
}

// Canonical-form equality at tolerance kTolEq.
inline bool canonical_equal(const PiecewiseFn& f, const PiecewiseFn& g) {
  const auto& a = f.pieces();
  const auto& b = g.pieces();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].implicit() != b[i].implicit()) return false;
    if (!rel_close(a[i].lo, b[i].lo) || !rel_close(a[i].hi, b[i].hi))
      return false;
    if (a[i].implicit()) {
      if (!rel_close(a[i].tlo, b[i].tlo) || !rel_close(a[i].thi, b[i].thi))
        return false;
      if (!rel_close(a[i].band->A, b[i].band->A, kTolEq, 1e-300)) return false;
      auto ta = a[i].band->terms, tb = b[i].band->terms;
      if (ta.size() != tb.size()) return false;
      auto by_gamma = [](const BandTerm& x, const BandTerm& y) {
        return x.gamma < y.gamma;
      };
      std::sort(ta.begin(), ta.end(), by_gamma);
      std::sort(tb.begin(), tb.end(), by_gamma);
      for (std::size_t j = 0; j < ta.size(); ++j)
        if (!rel_close(ta[j].gamma, tb[j].gamma) ||
            !rel_close(ta[j].B, tb[j].B))
          return false;
    } else {
      if (!rel_close(a[i].coef, b[i].coef) || !rel_close(a[i].exp, b[i].exp))
        return false;
    }
  }
  return true;
}

}  // namespace boydkit
