#pragma once

// Adaptive Gauss-Kronrod quadrature over (0, inf).
//
// This is the numeric workhorse used two ways: as an independent oracle for
// every closed-form integral in the library, and as the evaluation engine for
// integrands that leave the closed-form class (truncation remainders,
// iterated kernels, implicitly represented rearrangements).
//
// Strategy: a 7-15 Gauss-Kronrod rule with recursive bisection on finite
// intervals, plus geometric panel chains toward 0 and toward inf.  Panel
// chains double toward the open end; for integrands with power-law behaviour
// the panel sums form a geometric series, so a ratio test both detects
// divergence (+inf is returned as a value, never thrown) and accelerates the
// convergent tail.  Nodes are interior, so end points are never evaluated.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "boydkit/reals.hpp"

namespace boydkit {

struct QuadTol {
  double rel = 1e-10;   // relative target
  double abs = 1e-14;   // absolute floor
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1], positive half.
inline constexpr double kKronrodX[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993945,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
inline constexpr double kKronrodW[8] = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.0630920926299786,
    0.0229353220105292,
};
// Gauss weights for Kronrod nodes 0, 2, 4, 6.
inline constexpr double kGaussW[4] = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
};

struct Panel {
  double value = 0.0;
  double error = 0.0;
  bool finite = true;
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0;
  Panel out;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kKronrodX[i];
    double fsum;
    if (i == 0) {
      fsum = f(c);
    } else {
      fsum = f(c - dx) + f(c + dx);
    }
    if (!std::isfinite(fsum)) {
      out.finite = false;
      return out;
    }
    kron += kKronrodW[i] * fsum;
    if (i % 2 == 0) gauss += kGaussW[i / 2] * fsum;
  }
  out.value = kron * h;
  out.error = std::abs(kron - gauss) * std::abs(h);
  return out;
}

}  // namespace detail

// Adaptive integral of f over the finite interval [a, b].  The integrand is
// evaluated only at interior points.  A non-finite sample is treated as a
// divergent integral.
template <class F>
double integrate_finite(const F& f, double a, double b, QuadTol tol = {}) {
  if (!(b > a)) return 0.0;
  struct Seg {
    double a, b;
    detail::Panel p;
    int depth;
  };
  detail::Panel whole = detail::gk15(f, a, b);
  if (!whole.finite) {
    // Retry once on a split; a genuine interior pole keeps misbehaving and
    // is reported as +inf.
    detail::Panel l = detail::gk15(f, a, 0.5 * (a + b));
    detail::Panel r = detail::gk15(f, 0.5 * (a + b), b);
    if (!l.finite || !r.finite) return kInf;
    whole.value = l.value + r.value;
    whole.error = l.error + r.error;
  }
  std::vector<Seg> stack{{a, b, whole, 0}};
  double total = whole.value;
  double err = whole.error;
  const int kMaxDepth = 48;
  const std::size_t kMaxSegs = 20000;
  std::size_t splits = 0;
  while (!stack.empty() && splits < kMaxSegs) {
    const double budget = std::max(tol.rel * std::abs(total), tol.abs);
    if (err <= budget) break;
    // Split the worst segment.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < stack.size(); ++i)
      if (stack[i].p.error > stack[worst].p.error) worst = i;
    Seg seg = stack[worst];
    stack.erase(stack.begin() + static_cast<std::ptrdiff_t>(worst));
    if (seg.depth >= kMaxDepth) continue;  // accept as is
    const double mid = 0.5 * (seg.a + seg.b);
    detail::Panel l = detail::gk15(f, seg.a, mid);
    detail::Panel r = detail::gk15(f, mid, seg.b);
    if (!l.finite || !r.finite) return kInf;
    total += l.value + r.value - seg.p.value;
    err += l.error + r.error - seg.p.error;
    stack.push_back({seg.a, mid, l, seg.depth + 1});
    stack.push_back({mid, seg.b, r, seg.depth + 1});
    ++splits;
  }
  return total;
}

namespace detail {

// Shared engine for the two open-ended panel chains.  next_interval maps the
// panel index to [a_k, b_k]; panels must tile the range monotonically toward
// the open end.  Nonnegative integrands are assumed for the divergence test.
template <class F, class NextInterval>
double panel_chain(const F& f, const NextInterval& next, QuadTol tol) {
  double total = 0.0;
  double prev = -1.0;
  double ratio_acc = 0.0;
  int ratio_count = 0;
  bool seen_mass = false;
  const int kMaxPanels = 6000;
  for (int k = 0; k < kMaxPanels; ++k) {
    auto [a, b] = next(k);
    if (!(b > a)) break;
    double p = integrate_finite(f, a, b, tol);
    if (std::isinf(p)) return kInf;
    total += p;
    if (p > 0.0) seen_mass = true;
    if (!seen_mass) {
      // Keep scanning until the support is reached; 2^96 panels of doubling
      // exhaust the representable range.
      if (k >= 96) return total;
      continue;
    }
    const double floor = std::max(tol.abs, tol.rel * std::abs(total));
    if (p <= floor && k >= 2) {
      // Remainder of a still-decaying geometric chain, bounded by the floor.
      if (p > 0.0 && ratio_count >= 4 && ratio_acc < 1.0)
        total += p * ratio_acc / (1.0 - ratio_acc);
      return total;
    }
    if (prev > 0.0 && p > 0.0) {
      const double r = p / prev;
      ratio_acc = 0.7 * ratio_acc + 0.3 * r;
      ++ratio_count;
      if (ratio_count >= 8) {
        if (ratio_acc >= 0.9995) return kInf;  // non-decaying panel chain
        if (ratio_acc < 1.0 && k + 1 == kMaxPanels) break;
      }
    }
    prev = p;
  }
  // Geometric remainder estimate for a slowly decaying convergent chain.
  if (prev > 0.0 && ratio_acc > 0.0 && ratio_acc < 1.0)
    total += prev * ratio_acc / (1.0 - ratio_acc);
  return total;
}

}  // namespace detail

// Integral of f over (0, a] with a possible power singularity at 0.
template <class F>
double integrate_down_to_zero(const F& f, double a, QuadTol tol = {}) {
  if (!(a > 0.0)) return 0.0;
  auto next = [a](int k) {
    const double hi = a * std::ldexp(1.0, -k);
    return std::pair<double, double>{0.5 * hi, hi};
  };
  return detail::panel_chain(f, next, tol);
}

// Integral of f over [a, inf) with power-law decay or divergence.
template <class F>
double integrate_up_to_inf(const F& f, double a, QuadTol tol = {}) {
  if (!(a > 0.0)) a = 1.0;
  auto next = [a](int k) {
    const double lo = a * std::ldexp(1.0, k);
    return std::pair<double, double>{lo, 2.0 * lo};
  };
  return detail::panel_chain(f, next, tol);
}

// General orchestrator on (lo, hi) with open-end handling.  pivot_hint
// anchors the panel chains; pass a scale typical of the integrand support.
template <class F>
double integrate_open(const F& f, double lo, double hi, QuadTol tol = {},
                      double pivot_hint = 1.0) {
  if (!(hi > lo)) return 0.0;
  double pivot = pivot_hint > 0.0 && std::isfinite(pivot_hint) ? pivot_hint
                                                               : 1.0;
  double total = 0.0;
  if (lo == 0.0 && std::isinf(hi)) {
    total += integrate_down_to_zero(f, pivot, tol);
    if (std::isinf(total)) return kInf;
    double up = integrate_up_to_inf(f, pivot, tol);
    if (std::isinf(up)) return kInf;
    return total + up;
  }
  if (lo == 0.0) {
    double head = integrate_down_to_zero(f, hi, tol);
    return head;
  }
  if (std::isinf(hi)) {
    return integrate_up_to_inf(f, lo, tol);
  }
  return integrate_finite(f, lo, hi, tol);
}

}  // namespace boydkit
