#pragma once

// Finite sums of terms c * t^a * ln(t)^m and their exact integrals.
//
// This class of functions is closed under the inner integration step of the
// upper and lower Hardy transforms (integrate against beta * s^(beta-1) ds,
// then divide by a power of t), which is what makes repeated application of
// a transform exactly computable.  The only numerically delicate spot is an
// exponent near -1, where t^(a+1)/(a+1) loses precision; definite integrals
// therefore run through expm1-stable forms and a series branch.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "boydkit/reals.hpp"

namespace boydkit {

// Exact integral of t^a over [t1, t2], 0 < t1 <= t2 finite; stable as the
// exponent crosses -1.
inline double int_pow(double a, double t1, double t2) {
  if (!(t2 > t1)) return 0.0;
  const double e = a + 1.0;
  if (e == 0.0) return std::log(t2 / t1);
  const double L1 = std::log(t1), L2 = std::log(t2);
  if (std::abs(e) * std::max(std::abs(L1), std::abs(L2)) < 0.25) {
    // t^e = exp(e ln t); expm1 keeps the difference exact as e -> 0.
    return std::exp(e * L1) * std::expm1(e * (L2 - L1)) / e;
  }
  return (pow_pos(t2, e) - pow_pos(t1, e)) / e;
}

namespace detail {

// integral of e^(eps u) u^m du over [u1, u2] (exact, stable for small eps).
inline double int_exp_mono(double eps, int m, double u1, double u2) {
  if (!(u2 > u1)) return 0.0;
  const double span = std::max(std::abs(u1), std::abs(u2));
  if (std::abs(eps) * span <= 0.5) {
    // Series in eps: sum_k eps^k/k! * (u2^(m+k+1) - u1^(m+k+1))/(m+k+1).
    double sum = 0.0;
    double coef = 1.0;  // eps^k / k!
    for (int k = 0; k < 40; ++k) {
      const int mk = m + k + 1;
      const double inc =
          coef * (std::pow(u2, mk) - std::pow(u1, mk)) / static_cast<double>(mk);
      sum += inc;
      coef *= eps / static_cast<double>(k + 1);
      if (std::abs(coef) * std::pow(span, mk + 1) <
          1e-18 * (std::abs(sum) + 1e-300))
        break;
    }
    return sum;
  }
  // Integration by parts downward in m.
  double acc = (std::exp(eps * u1) * std::expm1(eps * (u2 - u1))) / eps;  // m=0
  for (int j = 1; j <= m; ++j) {
    acc = (std::exp(eps * u2) * std::pow(u2, j) -
           std::exp(eps * u1) * std::pow(u1, j)) /
              eps -
          (static_cast<double>(j) / eps) * acc;
  }
  return acc;
}

}  // namespace detail

// Exact integral of t^a ln(t)^m over [t1, t2], 0 < t1 <= t2 finite.
inline double int_pow_log(double a, int m, double t1, double t2) {
  if (!(t2 > t1)) return 0.0;
  if (m == 0) return int_pow(a, t1, t2);
  return detail::int_exp_mono(a + 1.0, m, std::log(t1), std::log(t2));
}

// Integral of t^a ln(t)^m over (0, x]; requires a > -1 for convergence and
// the caller decides divergent cases from the leading term of the full sum.
inline double int_pow_log_from_zero(double a, int m, double x) {
  const double eps = a + 1.0;
  const double U = std::log(x);
  if (m == 0) return std::exp(eps * U) / eps;
  double acc = std::exp(eps * U) / eps;
  for (int j = 1; j <= m; ++j)
    acc = std::exp(eps * U) * std::pow(U, j) / eps -
          (static_cast<double>(j) / eps) * acc;
  return acc;
}

// Integral of t^a ln(t)^m over [x, inf); requires a < -1.
inline double int_pow_log_to_inf(double a, int m, double x) {
  const double eps = a + 1.0;
  const double U = std::log(x);
  if (m == 0) return -std::exp(eps * U) / eps;
  double acc = -std::exp(eps * U) / eps;
  for (int j = 1; j <= m; ++j)
    acc = -std::exp(eps * U) * std::pow(U, j) / eps -
          (static_cast<double>(j) / eps) * acc;
  return acc;
}

// One monomial c * t^a * ln(t)^m.
struct LogPowTerm {
  double c = 0.0;
  double a = 0.0;
  int m = 0;
};

// Finite sum of LogPowTerm, kept with exactly matching (a, m) combined.
class LogPowerSum {
 public:
  LogPowerSum() = default;
  explicit LogPowerSum(std::vector<LogPowTerm> terms) : terms_(std::move(terms)) {
    normalize();
  }
  static LogPowerSum constant(double c) {
    return LogPowerSum({{c, 0.0, 0}});
  }

  const std::vector<LogPowTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double eval(double t) const {
    double s = 0.0;
    const double L = std::log(t);
    for (const auto& tm : terms_)
      s += tm.c * pow_pos(t, tm.a) * (tm.m == 0 ? 1.0 : std::pow(L, tm.m));
    return s;
  }

  void add_term(const LogPowTerm& tm) {
    if (tm.c == 0.0) return;
    for (auto& have : terms_) {
      if (have.a == tm.a && have.m == tm.m) {
        have.c += tm.c;
        return;
      }
    }
    terms_.push_back(tm);
  }
  void add(const LogPowerSum& o) {
    for (const auto& tm : o.terms_) add_term(tm);
  }
  void scale(double k) {
    for (auto& tm : terms_) tm.c *= k;
    if (k == 0.0) terms_.clear();
  }
  // Multiply by one monomial.
  LogPowerSum times(double c, double a, int m) const {
    std::vector<LogPowTerm> out;
    out.reserve(terms_.size());
    for (const auto& tm : terms_) out.push_back({tm.c * c, tm.a + a, tm.m + m});
    return LogPowerSum(std::move(out));
  }
  LogPowerSum times(const LogPowerSum& o) const {
    LogPowerSum out;
    for (const auto& tm : o.terms_) out.add(times(tm.c, tm.a, tm.m));
    return out;
  }
  // Small nonnegative integer power by repeated multiplication.
  LogPowerSum pow_int(int k) const {
    LogPowerSum out = constant(1.0);
    for (int i = 0; i < k; ++i) out = out.times(*this);
    return out;
  }

  // Leading term as t -> 0+ (smallest exponent, then highest log power).
  const LogPowTerm* leading_at_zero() const {
    const LogPowTerm* best = nullptr;
    for (const auto& tm : terms_) {
      if (tm.c == 0.0) continue;
      if (!best || tm.a < best->a || (tm.a == best->a && tm.m > best->m))
        best = &tm;
    }
    return best;
  }
  // Leading term as t -> inf (largest exponent, then highest log power).
  const LogPowTerm* leading_at_inf() const {
    const LogPowTerm* best = nullptr;
    for (const auto& tm : terms_) {
      if (tm.c == 0.0) continue;
      if (!best || tm.a > best->a || (tm.a == best->a && tm.m > best->m))
        best = &tm;
    }
    return best;
  }

  // Exact integral over [t1, t2] within (0, inf); open ends allowed.
  // Divergence is returned as +-inf according to the leading term's sign.
  double integrate(double t1, double t2) const {
    if (terms_.empty() || !(t2 > t1)) return 0.0;
    double total = 0.0;
    double lo = t1, hi = t2;
    if (t1 == 0.0) {
      const LogPowTerm* lead = leading_at_zero();
      if (lead && lead->a <= -1.0) {
        const double sgn = (lead->m % 2 == 0) ? 1.0 : -1.0;
        return (lead->c * sgn > 0.0) ? kInf : -kInf;
      }
      const double cut = std::isinf(hi) ? 1.0 : hi;
      for (const auto& tm : terms_)
        total += tm.c * int_pow_log_from_zero(tm.a, tm.m, cut);
      if (std::isinf(hi)) lo = 1.0; else return total;
    }
    if (std::isinf(t2)) {
      const LogPowTerm* lead = leading_at_inf();
      if (lead && lead->a >= -1.0) return lead->c > 0.0 ? kInf : -kInf;
      for (const auto& tm : terms_)
        total += tm.c * int_pow_log_to_inf(tm.a, tm.m, lo);
      return total;
    }
    for (const auto& tm : terms_)
      total += tm.c * int_pow_log(tm.a, tm.m, lo, hi);
    return total;
  }

  // d/dt of the sum; stays in the class.
  LogPowerSum derivative() const {
    LogPowerSum out;
    for (const auto& tm : terms_) {
      out.add_term({tm.c * tm.a, tm.a - 1.0, tm.m});
      if (tm.m > 0) out.add_term({tm.c * tm.m, tm.a - 1.0, tm.m - 1});
    }
    return out;
  }

  // True when the sum is a single pure power (no log factor).
  bool single_power(double* coef = nullptr, double* expo = nullptr) const {
    if (terms_.size() != 1 || terms_[0].m != 0) return false;
    if (coef) *coef = terms_[0].c;
    if (expo) *expo = terms_[0].a;
    return true;
  }

 private:
  void normalize() {
    std::vector<LogPowTerm> merged;
    for (const auto& tm : terms_) {
      if (tm.c == 0.0) continue;
      bool hit = false;
      for (auto& have : merged)
        if (have.a == tm.a && have.m == tm.m) {
          have.c += tm.c;
          hit = true;
          break;
        }
      if (!hit) merged.push_back(tm);
    }
    terms_ = std::move(merged);
  }

  std::vector<LogPowTerm> terms_;
};

}  // namespace boydkit
