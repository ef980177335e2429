#pragma once

// The six Hardy-type transforms of a decreasing rearrangement, evaluated
// exactly where the input is piecewise power and by stable quadrature where
// it is implicit.
//
// Conventions:
//   * the input is rearranged on construction, so every transform acts on a
//     nonincreasing right-continuous f* supported from 0;
//   * a divergent defining integral or supremum yields the value +inf at the
//     affected points, never an exception: downstream norm code decides what
//     finiteness means;
//   * integral kinds (r < inf) keep a per-piece table of exact inner
//     integrands (LogPowerSum) plus accumulated bases, so evaluation is a
//     closed partial integral; implicit pieces fall back to the substitution
//     quadrature shared with power_integral;
//   * sup kinds (r = inf) locate suprema analytically per piece.

#include <cmath>
#include <cstddef>
#include <optional>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "boydkit/logpow.hpp"
#include "boydkit/piecewise.hpp"
#include "boydkit/quadrature.hpp"
#include "boydkit/reals.hpp"
#include "boydkit/spaces.hpp"

namespace boydkit {

// Which of the six transforms.  Upper integrates/takes sup over (0, t) with
// weight (s/t)^(1/p); Lower works over (t, inf) with weight (s/t)^(1/q) and
// admits index = inf (weight 1).  r = inf switches integral to supremum;
// Lower(inf, inf) is the rearrangement itself.
struct HardyKind {
  enum class Family { Upper, Lower };
  Family family = Family::Upper;
  double index = 1.0;  // p for Upper (finite), q for Lower (may be inf)
  double r = 1.0;      // may be inf

  static HardyKind upper(double p, double r) {
    if (!(p > 0.0) || std::isinf(p))
      throw InvalidSpec("hardy kind: upper index p must be a finite positive real");
    if (!(r > 0.0)) throw InvalidSpec("hardy kind: r must be positive or inf");
    return {Family::Upper, p, r};
  }
  static HardyKind lower(double q, double r) {
    if (!(q > 0.0)) throw InvalidSpec("hardy kind: lower index q must be positive or inf");
    if (!(r > 0.0)) throw InvalidSpec("hardy kind: r must be positive or inf");
    return {Family::Lower, q, r};
  }

  bool upper_family() const { return family == Family::Upper; }
  bool sup_type() const { return std::isinf(r); }
};

// Exact eventual behaviour C * t^e valid for t >= from.
struct AsymptoticPower {
  double coef = 0.0;
  double exp = 0.0;
  double from = 0.0;
};

namespace detail {

// integral of f^r / s ds over [x1, x2] inside an implicit piece.  The
// inversion is stable everywhere, and x1 > 0 on every call path (suffix
// tables never integrate an implicit piece from 0), so plain s-space
// quadrature suffices.
inline double implicit_log_weight_integral(const Piece& p, double r,
                                           double x1, double x2) {
  const double a = std::max(x1, p.lo);
  const double b = std::min(x2, p.hi);
  if (!(b > a)) return 0.0;
  const QuadTol qt{1e-12, 1e-16};
  auto h = [&](double s) { return pow_pos(p.invert(s), r) / s; };
  if (std::isinf(b)) return integrate_up_to_inf(h, a, qt);
  return integrate_finite(h, a, b, qt);
}

}  // namespace detail

// One source piece of f* with its inner-integral bookkeeping.  For a pure
// piece the inner integrand is the exact LogPowerSum g with
// integral over [x1, x2] = integrand.integrate(x1, x2); implicit pieces are
// integrated on demand.  base accumulates the inner integral over the pieces
// before lo (upper family) or after hi (lower family).
struct HardyCell {
  double lo = 0.0;
  double hi = 0.0;
  double base = 0.0;
  bool closed = false;
  LogPowerSum integrand;
  std::size_t piece_index = 0;
};

class HardyTransform {
 public:
  HardyTransform(HardyKind kind, const PiecewiseFn& f)
      : kind_(kind), fstar_(rearrange(f)) {
    if (!kind_.sup_type()) build_cells_();
  }

  const HardyKind& kind() const { return kind_; }
  const PiecewiseFn& rearranged() const { return fstar_; }

  // Inner integral at t: I(t) over (0, t] for the upper family, J(t) over
  // [t, inf) for the lower family.  Sup kinds have no inner integral.
  double inner(double t) const {
    check_t_(t);
    if (kind_.sup_type())
      throw std::logic_error("hardy: sup kinds have no inner integral");
    return kind_.upper_family() ? inner_upper_(t) : inner_lower_(t);
  }

  // The transform value; +inf where the defining integral or sup diverges.
  double operator()(double t) const {
    check_t_(t);
    if (fstar_.empty()) return 0.0;
    const double inv_idx = inv_ext(kind_.index);
    if (!kind_.sup_type()) {
      const double in =
          kind_.upper_family() ? inner_upper_(t) : inner_lower_(t);
      if (in == 0.0) return 0.0;
      return pow_pos(t, -inv_idx) * std::pow(in, 1.0 / kind_.r);
    }
    if (kind_.upper_family()) {
      // sup over 0 < s <= t of (s/t)^(1/p) f*(s).
      double best = 0.0;
      for (const auto& pc : fstar_.pieces()) {
        if (!(pc.lo < t)) break;
        best = std::max(best,
                        detail::piece_weighted_sup(pc, kind_.index, 0.0, t));
      }
      return pow_pos(t, -inv_idx) * best;
    }
    if (std::isinf(kind_.index)) return evaluate(fstar_, t);
    const PiecewiseFn tail = restrict_to(fstar_, t, kInf);
    double best = 0.0;
    for (const auto& pc : tail.pieces())
      best = std::max(best,
                      detail::piece_weighted_sup(pc, kind_.index, 0.0, kInf));
    return pow_pos(t, -inv_idx) * best;
  }

  // Integral-kind decomposition table; empty for sup kinds.
  const std::vector<HardyCell>& cells() const { return cells_; }

  // Beyond a bounded support the transform is an exact power of t: the upper
  // family freezes at C t^(-1/index), the lower family vanishes.  Unbounded
  // support has no single eventual power; empty optional.
  std::optional<AsymptoticPower> eventual_power() const {
    const double end = fstar_.support_end();
    if (std::isinf(end)) return std::nullopt;
    AsymptoticPower out;
    out.from = end;
    if (!kind_.upper_family() || fstar_.empty()) return out;
    out.exp = -1.0 / kind_.index;
    if (kind_.sup_type()) {
      double best = 0.0;
      for (const auto& pc : fstar_.pieces())
        best = std::max(
            best, detail::piece_weighted_sup(pc, kind_.index, 0.0, kInf));
      out.coef = best;
    } else {
      out.coef = std::pow(total_, 1.0 / kind_.r);
    }
    return out;
  }

 private:
  static void check_t_(double t) {
    if (!(t > 0.0) || std::isinf(t))
      throw std::invalid_argument("hardy: t must be a finite positive real");
  }

  double partial_(const HardyCell& cell, double x1, double x2) const {
    if (!(x2 > x1)) return 0.0;
    if (cell.closed) return cell.integrand.integrate(x1, x2);
    const Piece& pc = fstar_.pieces()[cell.piece_index];
    if (log_weight_)
      return detail::implicit_log_weight_integral(pc, kind_.r, x1, x2);
    return detail::implicit_power_integral(pc, kind_.r, beta_, x1, x2);
  }

  double inner_upper_(double t) const {
    if (cells_.empty()) return 0.0;
    std::size_t idx = cells_.size();
    while (idx > 0 && cells_[idx - 1].lo >= t) --idx;
    if (idx == 0) return 0.0;
    const HardyCell& cell = cells_[idx - 1];
    return cell.base + partial_(cell, cell.lo, std::min(t, cell.hi));
  }

  double inner_lower_(double t) const {
    if (cells_.empty()) return 0.0;
    std::size_t idx = cells_.size();
    while (idx > 0 && cells_[idx - 1].lo >= t) --idx;
    if (idx == 0) idx = 1;  // t below the first piece: full suffix from lo
    const HardyCell& cell = cells_[idx - 1];
    return cell.base + partial_(cell, std::max(t, cell.lo), cell.hi);
  }

  void build_cells_() {
    const auto& ps = fstar_.pieces();
    beta_ = std::isinf(kind_.index) ? 0.0 : kind_.r / kind_.index;
    log_weight_ = !kind_.upper_family() && std::isinf(kind_.index);
    cells_.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Piece& pc = ps[i];
      HardyCell cell;
      cell.lo = pc.lo;
      cell.hi = pc.hi;
      cell.piece_index = i;
      if (!pc.implicit()) {
        cell.closed = true;
        const double cr = pow_pos(pc.coef, kind_.r);
        if (log_weight_) {
          cell.integrand = LogPowerSum({{cr, kind_.r * pc.exp - 1.0, 0}});
        } else {
          cell.integrand = LogPowerSum(
              {{beta_ * cr, kind_.r * pc.exp + beta_ - 1.0, 0}});
        }
      }
      cells_.push_back(std::move(cell));
    }
    if (kind_.upper_family()) {
      double acc = 0.0;
      for (auto& cell : cells_) {
        cell.base = acc;
        acc += partial_(cell, cell.lo, cell.hi);
      }
      total_ = acc;
    } else {
      double acc = 0.0;
      for (std::size_t k = cells_.size(); k-- > 0;) {
        cells_[k].base = acc;
        // The first piece's full integral feeds no base; skipping it avoids
        // integrating a possibly divergent head that no J(t), t > 0, needs.
        if (k > 0) acc += partial_(cells_[k], cells_[k].lo, cells_[k].hi);
      }
      total_ = acc;
    }
  }

  HardyKind kind_;
  PiecewiseFn fstar_;
  std::vector<HardyCell> cells_;
  double beta_ = 0.0;
  double total_ = 0.0;
  bool log_weight_ = false;
};

inline HardyTransform apply(HardyKind kind, const PiecewiseFn& f) {
  return HardyTransform(kind, f);
}

// (n+1)-fold iterate of the upper transform with finite p, r, through the
// closed log-kernel form: value(t) = (beta^(n+1)/n! *
// integral over x in (0, inf) of x^n e^(-beta x) f*(t e^(-x))^r dx)^(1/r),
// beta = r/p.  The substitution s = t e^(-x) removes both the log power and
// the moving endpoint from the quadrature.
class IteratedHardy {
 public:
  IteratedHardy(double p, double r, int n, const PiecewiseFn& f)
      : p_(p), r_(r), n_(n), fstar_(rearrange(f)) {
    if (!(p > 0.0) || std::isinf(p))
      throw InvalidSpec("iterated hardy: p must be a finite positive real");
    if (!(r > 0.0) || std::isinf(r))
      throw InvalidSpec("iterated hardy: r must be a finite positive real");
    if (n < 0) throw InvalidSpec("iterated hardy: n must be nonnegative");
    beta_ = r_ / p_;
    log_pref_ = (n_ + 1.0) * std::log(beta_) - std::lgamma(n_ + 1.0);
  }

  double p() const { return p_; }
  double r() const { return r_; }
  int n() const { return n_; }
  const PiecewiseFn& rearranged() const { return fstar_; }

  double operator()(double t) const {
    if (!(t > 0.0) || std::isinf(t))
      throw std::invalid_argument("hardy: t must be a finite positive real");
    if (fstar_.empty()) return 0.0;
    // Exact head pretest: a pure power head c s^alpha makes every point
    // divergent as soon as r alpha + beta <= 0.  Implicit heads are bounded
    // near 0 (unbounded rearranged values always land in a pure piece), so
    // the quadrature's growth detection covers the rest.
    const Piece& head = fstar_.pieces().front();
    if (head.lo == 0.0 && !head.implicit() && head.coef > 0.0 &&
        r_ * head.exp + beta_ <= 0.0)
      return kInf;
    auto g = [&](double x) {
      const double v = evaluate(fstar_, t * std::exp(-x));
      if (v == 0.0) return 0.0;
      const double xn = n_ == 0 ? 1.0 : std::pow(x, n_);
      const double vr = pow_pos(v, r_);
      if (is_finite(vr)) return xn * std::exp(-beta_ * x) * vr;
      // t e^(-x) underflowed (or v^r overflowed) inside a divergent pure
      // power head; continue in log space, where the pretest guarantees
      // the combined exponent decays.
      const Piece& hd = fstar_.pieces().front();
      if (hd.lo == 0.0 && !hd.implicit() && hd.coef > 0.0 && hd.exp < 0.0) {
        const double lg = std::log(hd.coef) + hd.exp * (std::log(t) - x);
        return xn * std::exp(-beta_ * x + r_ * lg);
      }
      return kInf;
    };
    // Each breakpoint b < t of f* is a kink of g at x = log(t/b); a jump
    // interior to a panel can defeat the error estimate, so the quadrature
    // is segmented there.  Beyond the last kink g lives on the head piece
    // alone and the geometric chain is safe.
    std::vector<double> xs{0.0};
    for (double b : fstar_.breakpoints())
      if (b < t) xs.push_back(std::log(t / b));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const double reach = xs.back() + std::max(1.0, (n_ + 4.0) / beta_);
    const QuadTol qt{1e-11, 1e-15};
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size() && !std::isinf(integral); ++i)
      integral += integrate_finite(g, xs[i], xs[i + 1], qt);
    if (!std::isinf(integral))
      integral += integrate_finite(g, xs.back(), reach, qt);
    if (!std::isinf(integral)) {
      const double up = integrate_up_to_inf(g, reach, qt);
      integral = std::isinf(up) ? kInf : integral + up;
    }
    if (std::isinf(integral)) return kInf;
    if (integral == 0.0) return 0.0;
    return std::pow(std::exp(log_pref_) * integral, 1.0 / r_);
  }

 private:
  double p_ = 1.0;
  double r_ = 1.0;
  int n_ = 0;
  PiecewiseFn fstar_;
  double beta_ = 1.0;
  double log_pref_ = 0.0;
};

inline IteratedHardy iterated_apply(double p, double r, int n,
                                    const PiecewiseFn& f) {
  return IteratedHardy(p, r, n, f);
}

// Certified pointwise lower bound for the (n+1)-fold iterate:
// (a^(r/p) ((r/p) log(1/a))^n / n!)^(1/r) * f*(a t), any 0 < a < 1.
inline double dilation_minorant(double p, double r, int n, double a,
                                const PiecewiseFn& f, double t) {
  if (!(p > 0.0) || std::isinf(p) || !(r > 0.0) || std::isinf(r))
    throw InvalidSpec("dilation minorant: p and r must be finite positive reals");
  if (n < 0) throw InvalidSpec("dilation minorant: n must be nonnegative");
  if (!(a > 0.0) || !(a < 1.0))
    throw InvalidSpec("dilation minorant: a must lie in (0, 1)");
  if (!(t > 0.0) || std::isinf(t))
    throw std::invalid_argument("hardy: t must be a finite positive real");
  const PiecewiseFn fstar = rearrange(f);
  const double v = evaluate(fstar, a * t);
  if (v == 0.0) return 0.0;
  const double beta = r / p;
  const double log_factor =
      beta * std::log(a) +
      (n == 0 ? 0.0 : n * std::log(beta * std::log(1.0 / a))) -
      std::lgamma(n + 1.0);
  return std::exp(log_factor / r) * v;
}

}  // namespace boydkit
