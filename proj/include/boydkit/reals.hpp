#pragma once

// Extended-real scalar helpers shared across the library.
//
// Conventions used everywhere:
//   * the half line is (0, inf); +inf is a legal value for interval ends,
//     exponents p, q, r and for divergent integrals or norms;
//   * equality of derived quantities is tested at a relative tolerance of
//     kTolEq, which is also the canonical-form tolerance for functions;
//   * the textual form of +inf is the literal "inf" in JSON, CSV and the
//     compact command-line spellings.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace boydkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Canonical-form comparison tolerance (relative where the scale allows it).
inline constexpr double kTolEq = 1e-12;

inline bool is_finite(double x) { return std::isfinite(x); }

// Relative closeness with an absolute floor; infinities compare equal to
// infinities of the same sign and to nothing else.
inline bool rel_close(double a, double b, double tol = kTolEq,
                      double abs_floor = 0.0) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(tol * scale, abs_floor);
}

// pow for a positive base; short-circuits the exact exponents that dominate
// our call sites so that 0 and 1 never pick up rounding noise.
inline double pow_pos(double base, double e) {
  if (e == 0.0) return 1.0;
  if (e == 1.0) return base;
  return std::pow(base, e);
}

// x^e extended to the closed end points of (0, inf) the way monotone power
// functions behave there: 0^neg = inf, inf^neg = 0, etc.
inline double pow_ext(double x, double e) {
  if (e == 0.0) return 1.0;
  if (x == 0.0) return e > 0.0 ? 0.0 : kInf;
  if (std::isinf(x)) return e > 0.0 ? kInf : 0.0;
  return std::pow(x, e);
}

// Reciprocal with 1/inf = 0 and 1/0 = inf; used for exponent arithmetic
// such as 1/p where p may be the literal inf.
inline double inv_ext(double x) {
  if (x == 0.0) return kInf;
  if (std::isinf(x)) return 0.0;
  return 1.0 / x;
}

// Shortest round-trip decimal form; "inf" for +infinity.  All emitters
// (JSON, CSV, CLI tables) go through this so reruns are byte identical.
inline std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// Parses a decimal number or the literal "inf"; empty optional on garbage.
inline std::optional<double> parse_ext_real(std::string_view s) {
  if (s == "inf" || s == "+inf" || s == "Inf") return kInf;
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return value;
}

inline double parse_ext_real_or_throw(std::string_view s,
                                      const std::string& what) {
  auto v = parse_ext_real(s);
  if (!v) throw std::invalid_argument(what + ": cannot parse '" +
                                      std::string(s) + "'");
  return *v;
}

}  // namespace boydkit
