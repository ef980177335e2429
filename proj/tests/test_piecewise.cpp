#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "boydkit/piecewise.hpp"
#include "boydkit/quadrature.hpp"

using namespace boydkit;

namespace {

// Independent oracle: decreasing rearrangement of a step function by value
// sort with sequential length accumulation.
PiecewiseFn step_oracle(const PiecewiseFn& f) {
  struct Entry {
    double v, len;
  };
  std::vector<Entry> es;
  for (const auto& p : f.pieces()) es.push_back({p.coef, p.hi - p.lo});
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

bool exactly_equal(const PiecewiseFn& f, const PiecewiseFn& g) {
  const auto& a = f.pieces();
  const auto& b = g.pieces();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].lo != b[i].lo || a[i].hi != b[i].hi || a[i].coef != b[i].coef ||
        a[i].exp != b[i].exp || a[i].implicit() || b[i].implicit())
      return false;
  return true;
}

PiecewiseFn random_step(std::mt19937_64& rng) {
  static const double levels[] = {0.5, 1.0, 1.5, 2.0, 2.718281828459045, 2.0};
  std::uniform_int_distribution<int> npieces(1, 7);
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

PiecewiseFn random_power_fn(std::mt19937_64& rng, bool allow_tail) {
  std::uniform_int_distribution<int> npieces(1, 5);
  std::uniform_real_distribution<double> width(0.1, 2.0);
  std::uniform_real_distribution<double> coef(0.2, 3.0);
  std::uniform_real_distribution<double> expd(-1.8, 1.8);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<int> gap(0, 1);
  const int n = npieces(rng);
  double at = gap(rng) ? 0.0 : width(rng);
  std::vector<Piece> ps;
  for (int i = 0; i < n; ++i) {
    const double lo = at;
    double hi = lo + width(rng);
    double e = kind(rng) == 0 ? 0.0 : expd(rng);
    if (lo == 0.0 && e < -0.9) e = -0.5;  // keep integrals testable
    const bool last = i + 1 == n;
    if (last && allow_tail && kind(rng) == 0) {
      hi = kInf;
      e = std::min(e, -1.1);
    }
    ps.push_back({lo, hi, coef(rng), e, nullptr, 0, 0});
    at = hi + (gap(rng) ? 0.0 : width(rng));
    if (std::isinf(hi)) break;
  }
  return PiecewiseFn(std::move(ps));
}

double numeric_power_integral(const PiecewiseFn& f, double r, double beta,
                              double lo, double hi) {
  double total = 0.0;
  for (const auto& p : f.pieces()) {
    const double x1 = std::max(p.lo, lo);
    double x2 = std::min(p.hi, hi);
    if (!(x2 > x1)) continue;
    auto g = [&](double s) {
      return std::pow(p.value(s), r) * beta * std::pow(s, beta - 1.0);
    };
    if (std::isinf(x2)) {
      total += integrate_up_to_inf(g, std::max(x1, 1e-6));
      continue;
    }
    if (x1 == 0.0) {
      total += integrate_down_to_zero(g, x2);
    } else {
      total += integrate_finite(g, x1, x2);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("evaluate covers pieces and gaps") {
  const auto f = PiecewiseFn::indicator(0.0, 1.0);
  REQUIRE(evaluate(f, 0.5) == 1.0);
  const auto g = PiecewiseFn::power(1.0, -0.5, 1.0, 4.0);
  REQUIRE(evaluate(g, 4.0) == 0.0);  // right-open
  REQUIRE(rel_close(evaluate(g, 2.0), std::pow(2.0, -0.5)));
  REQUIRE(evaluate(g, 0.5) == 0.0);  // gap before support
}

TEST_CASE("distribution inverts monotone pieces exactly") {
  const auto f = PiecewiseFn::indicator(0.0, 2.0);
  REQUIRE(distribution(f, 0.5) == 2.0);
  REQUIRE(distribution(f, 1.0) == 0.0);  // strict inequality
  const auto g = PiecewiseFn::power(1.0, -1.0, 1.0, kInf);
  REQUIRE(rel_close(distribution(g, 0.25), 3.0));  // {s in [1,4)}
  REQUIRE(distribution(g, 0.0) == kInf);
  const auto mix = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 2.0, 0.0}, {1.0, 3.0, 1.0, 0.0}});
  REQUIRE(distribution(mix, 1.5) == 1.0);
  REQUIRE(distribution(mix, 0.5) == 3.0);
}

TEST_CASE("rearrange matches the sort oracle on step functions") {
  const auto f = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 1.0, 0.0}, {3.0, 4.0, 2.0, 0.0}});
  const auto fs = rearrange(f);
  const auto expect = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 2.0, 0.0}, {1.0, 2.0, 1.0, 0.0}});
  REQUIRE(exactly_equal(fs, expect));

  std::mt19937_64 rng(0x5eed0001ULL);
  for (int it = 0; it < 400; ++it) {
    const auto g = random_step(rng);
    REQUIRE(exactly_equal(rearrange(g), step_oracle(g)));
  }
}

TEST_CASE("rearrange fixed points are returned unchanged") {
  const auto f = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 2.0, 0.0}, {1.0, 3.0, 1.0, 0.0}});
  REQUIRE(exactly_equal(rearrange(f), f));
  const auto g = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 1.0, 0.0}, {1.0, kInf, 1.0, -0.5}});
  REQUIRE(canonical_equal(rearrange(g), g));
}

TEST_CASE("rearrange of an off-origin power is the exact shifted inverse") {
  // f = s^(-1) on [1,2): distribution(t) = 1/t - 1 on (1/2, 1), so
  // f*(s) = 1/(s+1) on [0,1).
  const auto f = PiecewiseFn::power(1.0, -1.0, 1.0, 2.0);
  const auto fs = rearrange(f);
  REQUIRE(fs.pieces().size() == 1);
  REQUIRE(fs.pieces()[0].lo == 0.0);
  REQUIRE(rel_close(fs.pieces()[0].hi, 1.0));
  for (double s : {0.0, 0.1, 0.25, 0.5, 0.9, 0.999}) {
    REQUIRE(std::abs(evaluate(fs, s) - 1.0 / (s + 1.0)) < 1e-12);
  }
}

TEST_CASE("rearrange reverses an increasing piece") {
  // f = s on [0,1)  ->  f* = 1 - s on [0,1).
  const auto f = PiecewiseFn::power(1.0, 1.0, 0.0, 1.0);
  const auto fs = rearrange(f);
  for (double s : {0.05, 0.3, 0.5, 0.77, 0.99}) {
    REQUIRE(std::abs(evaluate(fs, s) - (1.0 - s)) < 1e-12);
  }
  REQUIRE(std::abs(power_integral(fs, 1.0, 1.0, 0.0, kInf) - 0.5) < 1e-10);
}

TEST_CASE("rearrange restores anchored power chains to pure pieces") {
  // s^(-1) on (0,1) plus s^(-2) on [1,2) is already nonincreasing; shuffle it
  // through a split and a bump to force the general path.
  const auto f = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 1.0, -1.0}, {1.0, 2.0, 1.0, -2.0}});
  const auto g = PiecewiseFn::from_power_pieces(
      {{1.0, 2.0, 1.0, -2.0}, {2.0, 3.0, 1.0, -1.0}});
  // g has the same pieces translated in s only for the first; just check the
  // anchored original is a fixed point and equimeasurable with itself.
  REQUIRE(canonical_equal(rearrange(f), f));
  const auto gs = rearrange(g);
  for (double level : {0.05, 0.3, 0.6, 0.9}) {
    REQUIRE(std::abs(distribution(g, level) - distribution(gs, level)) <
            1e-12 * (1.0 + distribution(g, level)));
  }
  REQUIRE(is_nonincreasing_from_zero(gs));
}

TEST_CASE("rearrange throws NonVanishing on fat tails") {
  const auto f = PiecewiseFn::indicator(0.0, kInf);
  REQUIRE_THROWS_AS(rearrange(f), NonVanishingError);
  const auto g = PiecewiseFn::power(0.5, 1.0, 1.0, kInf);
  REQUIRE_THROWS_AS(rearrange(g), NonVanishingError);
}

TEST_CASE("dilate follows the substitution rule") {
  const auto f = PiecewiseFn::indicator(0.0, 1.0);
  REQUIRE(exactly_equal(dilate(f, 2.0), PiecewiseFn::indicator(0.0, 0.5)));
  const auto g = PiecewiseFn::power(1.0, -1.0, 1.0, 2.0);
  REQUIRE(exactly_equal(dilate(g, 1.0), g));
  // f(s) = s^-1 on [1,2): (D_{1/2} f)(s) = f(s/2) = 2 s^-1 on [2,4).
  // Dilation preserves the attained values, so the coefficient follows
  // coef * a^exp; the interval scales by 1/a.
  const auto h = dilate(g, 0.5);
  const auto expect = PiecewiseFn::power(2.0, -1.0, 2.0, 4.0);
  REQUIRE(canonical_equal(h, expect));
  REQUIRE(rel_close(evaluate(h, 2.0), evaluate(g, 1.0)));  // h(s) = f(s/2)
}

TEST_CASE("dilate group law and measure scaling") {
  std::mt19937_64 rng(0x5eed0002ULL);
  for (int it = 0; it < 50; ++it) {
    const auto f = random_power_fn(rng, true);
    const double a = 0.25 + 3.0 * (it % 7) / 7.0;
    const double b = 0.5 + 2.0 * (it % 5) / 5.0;
    REQUIRE(canonical_equal(dilate(dilate(f, a), b), dilate(f, a * b)));
    for (double t : {0.1, 0.7, 1.3}) {
      const double lhs = distribution(dilate(f, a), t);
      const double rhs = distribution(f, t) / a;
      if (std::isinf(lhs) || std::isinf(rhs)) {
        REQUIRE(std::isinf(lhs) == std::isinf(rhs));
      } else {
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * (1.0 + rhs));
      }
    }
  }
}

TEST_CASE("power_integral closed forms") {
  const auto f = PiecewiseFn::indicator(0.0, 1.0);
  REQUIRE(power_integral(f, 1.0, 1.0, 0.0, 1.0) == 1.0);
  REQUIRE(rel_close(power_integral(f, 2.0, 2.0 / 3.0, 0.0, 1.0), 1.0));
  const auto g = PiecewiseFn::power(1.0, -1.0, 1.0, std::exp(1.0));
  REQUIRE(std::abs(power_integral(g, 1.0, 1.0, 1.0, std::exp(1.0)) - 1.0) <
          1e-14);
}

TEST_CASE("power_integral divergence is +inf") {
  const auto f = PiecewiseFn::power(1.0, -1.0, 0.0, 1.0);
  REQUIRE(power_integral(f, 1.0, 1.0, 0.0, 1.0) == kInf);
  const auto g = PiecewiseFn::power(1.0, -0.5, 1.0, kInf);
  REQUIRE(power_integral(g, 2.0, 1.0, 0.0, kInf) == kInf);
  // f^3 = s^(-3/2): integral over [1, inf) is 2.
  REQUIRE(rel_close(power_integral(g, 3.0, 1.0, 0.0, kInf), 2.0));
}

TEST_CASE("power_integral agrees with quadrature on random functions") {
  std::mt19937_64 rng(0x5eed0003ULL);
  for (int it = 0; it < 60; ++it) {
    const auto f = random_power_fn(rng, false);
    const double r = 0.5 + (it % 4) * 0.75;
    const double beta = 0.5 + (it % 3) * 0.5;
    const double exact = power_integral(f, r, beta, 0.0, kInf);
    const double approx = numeric_power_integral(f, r, beta, 0.0, kInf);
    if (std::isinf(exact) || std::isinf(approx)) {
      // Divergent draw: both routes must agree on divergence.
      REQUIRE(std::isinf(exact));
      REQUIRE(approx > 1e10);
    } else {
      REQUIRE(std::abs(exact - approx) <= 1e-8 * (1.0 + std::abs(exact)));
    }
  }
}

TEST_CASE("power_integral on implicit pieces via substitution") {
  // f* of s^(-1) on [1,2) is 1/(s+1) on [0,1): closed-form references.
  const auto fs = rearrange(PiecewiseFn::power(1.0, -1.0, 1.0, 2.0));
  REQUIRE(std::abs(power_integral(fs, 1.0, 1.0, 0.0, kInf) - std::log(2.0)) <
          1e-9);
  REQUIRE(std::abs(power_integral(fs, 2.0, 1.0, 0.0, kInf) - 0.5) < 1e-9);
  // Partial range [0, 1/2]: integral of (s+1)^-1 = log(3/2).
  REQUIRE(std::abs(power_integral(fs, 1.0, 1.0, 0.0, 0.5) - std::log(1.5)) <
          1e-9);
  // Stieltjes weight beta = 1/2 against quadrature.
  const double num = numeric_power_integral(fs, 1.0, 0.5, 0.0, 1.0);
  REQUIRE(std::abs(power_integral(fs, 1.0, 0.5, 0.0, kInf) - num) < 1e-8);
}

TEST_CASE("power_sum aligns grids") {
  const auto a = PiecewiseFn::indicator(0.0, 1.0);
  REQUIRE(exactly_equal(power_sum({a}, 2.0), a));
  const auto s2 = power_sum({a, a}, 2.0);
  REQUIRE(s2.pieces().size() == 1);
  REQUIRE(rel_close(s2.pieces()[0].coef, std::sqrt(2.0)));
  const auto b = PiecewiseFn::indicator(0.0, 1.0, 2.0);
  const auto c = PiecewiseFn::indicator(0.0, 2.0, 1.0);
  const auto s1 = power_sum({b, c}, 1.0);
  const auto expect = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 3.0, 0.0}, {1.0, 2.0, 1.0, 0.0}});
  REQUIRE(canonical_equal(s1, expect));
  REQUIRE_THROWS_AS(power_sum({PiecewiseFn::power(1.0, -1.0, 1.0, 2.0)}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("equimeasurability on a 50-level grid") {
  std::mt19937_64 rng(0x5eed0004ULL);
  for (int it = 0; it < 60; ++it) {
    const auto f = random_power_fn(rng, true);
    const auto fs = rearrange(f);
    const double top = sup_value(f);
    const double cap = is_finite(top) ? top * 1.05 : 10.0;
    for (int k = 1; k <= 50; ++k) {
      const double level = cap * k / 51.0;
      const double d1 = distribution(f, level);
      const double d2 = distribution(fs, level);
      if (std::isinf(d1) || std::isinf(d2)) {
        REQUIRE(std::isinf(d1) == std::isinf(d2));
      } else {
        REQUIRE(std::abs(d1 - d2) <= 1e-12 * (1.0 + d1));
      }
    }
  }
}

TEST_CASE("rearrange output is nonincreasing on evaluation grids") {
  std::mt19937_64 rng(0x5eed0005ULL);
  for (int it = 0; it < 60; ++it) {
    const auto fs = rearrange(random_power_fn(rng, true));
    REQUIRE(is_nonincreasing_from_zero(fs));
    double prev = kInf;
    const double end = is_finite(fs.support_end()) ? fs.support_end() : 20.0;
    for (int k = 1; k <= 64; ++k) {
      const double s = end * k / 65.0;
      const double v = evaluate(fs, s);
      REQUIRE(v <= prev * (1.0 + 1e-11) + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("rearrange idempotence and dilation commutation") {
  std::mt19937_64 rng(0x5eed0006ULL);
  for (int it = 0; it < 60; ++it) {
    const auto f = random_power_fn(rng, true);
    const auto fs = rearrange(f);
    REQUIRE(canonical_equal(rearrange(fs), fs));
    const double a = 0.3 + 2.5 * (it % 9) / 9.0;
    REQUIRE(canonical_equal(rearrange(dilate(f, a)), dilate(fs, a)));
  }
}

TEST_CASE("canonical form merges and validates") {
  const auto merged = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 1.5, 0.0}, {1.0, 2.0, 1.5, 0.0}, {2.0, 3.0, 0.0, 0.0}});
  REQUIRE(merged.pieces().size() == 1);
  REQUIRE(merged.pieces()[0].hi == 2.0);
  REQUIRE_THROWS_WITH(
      PiecewiseFn::from_power_pieces({{0.0, 2.0, 1.0, 0.0}, {1.0, 3.0, 1.0, 0.0}}),
      Catch::Matchers::ContainsSubstring("piece 1"));
  REQUIRE_THROWS_WITH(
      PiecewiseFn::from_power_pieces({{0.0, 1.0, -1.0, 0.0}}),
      Catch::Matchers::ContainsSubstring("piece 0"));
  REQUIRE_THROWS_AS(PiecewiseFn::from_power_pieces({{1.0, 1.0, 1.0, 0.0}}),
                    std::invalid_argument);
}

TEST_CASE("restriction, capping, and scaling behave pointwise") {
  const auto fs = rearrange(PiecewiseFn::power(1.0, -1.0, 1.0, 2.0));
  const auto head = restrict_to(fs, 0.0, 0.5);
  const auto tail = restrict_to(fs, 0.5, kInf);
  for (double s : {0.1, 0.3, 0.45}) {
    REQUIRE(evaluate(head, s) == evaluate(fs, s));
    REQUIRE(evaluate(tail, s) == 0.0);
  }
  for (double s : {0.55, 0.8, 0.95}) {
    REQUIRE(evaluate(tail, s) == evaluate(fs, s));
    REQUIRE(evaluate(head, s) == 0.0);
  }
  const auto capped = min_with(fs, 0.8);
  for (double s : {0.05, 0.2, 0.5, 0.9}) {
    REQUIRE(std::abs(evaluate(capped, s) -
                     std::min(0.8, evaluate(fs, s))) < 1e-12);
  }
  const auto doubled = scale_values(fs, 2.0);
  for (double s : {0.1, 0.4, 0.9}) {
    REQUIRE(std::abs(evaluate(doubled, s) - 2.0 * evaluate(fs, s)) < 1e-12);
  }
  // Cap an increasing piece: min(s on [0,1), 1/2).
  const auto inc = min_with(PiecewiseFn::power(1.0, 1.0, 0.0, 1.0), 0.5);
  REQUIRE(std::abs(evaluate(inc, 0.25) - 0.25) < 1e-15);
  REQUIRE(std::abs(evaluate(inc, 0.75) - 0.5) < 1e-15);
}

TEST_CASE("sup_value and left limits") {
  const auto f = PiecewiseFn::from_power_pieces(
      {{0.0, 1.0, 2.0, 0.0}, {1.0, 2.0, 1.0, 1.0}});
  REQUIRE(sup_value(f) == 2.0);
  REQUIRE(left_limit(f, 1.0) == 2.0);
  REQUIRE(left_limit(f, 2.0) == 2.0);
  REQUIRE(evaluate(f, 2.0) == 0.0);
}
