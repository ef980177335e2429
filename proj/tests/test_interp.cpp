#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "boydkit/interp.hpp"
#include "boydkit/piecewise.hpp"
#include "boydkit/reals.hpp"
#include "boydkit/spaces.hpp"

using namespace boydkit;

namespace {

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> g;
  g.reserve(n);
  for (int i = 0; i < n; ++i)
    g.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
  return g;
}

PiecewiseFn two_step() {
  return PiecewiseFn::from_power_pieces({{0.0, 1.0, 2.0, 0.0},
                                         {1.0, 3.0, 1.0, 0.0}});
}

}  // namespace

TEST_CASE("k functional closed examples") {
  const auto chi = PiecewiseFn::indicator(0.0, 1.0);

  const auto small = k_bruteforce(chi, 0.5, 1.0, 1.0, kInf, kInf);
  CHECK_THAT(small.brute_inf, Catch::Matchers::WithinRel(1.0, 1e-12));
  CHECK_THAT(small.operator_sum, Catch::Matchers::WithinRel(2.0, 1e-12));
  CHECK_THAT(small.ratio, Catch::Matchers::WithinRel(0.5, 1e-12));

  const auto large = k_bruteforce(chi, 4.0, 1.0, 1.0, kInf, kInf);
  CHECK_THAT(large.brute_inf, Catch::Matchers::WithinRel(0.25, 1e-12));
  CHECK_THAT(large.operator_sum, Catch::Matchers::WithinRel(0.25, 1e-12));
  CHECK_THAT(large.ratio, Catch::Matchers::WithinRel(1.0, 1e-12));

  const auto zero = k_bruteforce(PiecewiseFn::zero(), 1.0, 1.0, 1.0, kInf, kInf);
  CHECK(zero.brute_inf == 0.0);
  CHECK(zero.operator_sum == 0.0);
  CHECK(zero.ratio == 1.0);
}

TEST_CASE("k infimum dominates every candidate cut") {
  const auto f = PiecewiseFn::power(1.0, -0.5, 1e-2, 1.0);
  const auto fstar = rearrange(f);
  const double p = 1.0, r = 2.0, q = 3.0, s = 1.0;
  for (double t : {0.03, 1.0, 30.0}) {
    const auto rep = k_bruteforce(f, t, p, r, q, s);
    REQUIRE(is_finite(rep.brute_inf));
    // u = t and u = 1 are always members of the candidate family.
    for (double u : {t, 1.0}) {
      const double cost = detail::k_cut_cost(fstar, t, p, r, q, s, u);
      CHECK(rep.brute_inf <= cost * (1.0 + 1e-12));
    }
    // Off-grid cuts may undercut the family minimum only by grid resolution.
    for (double u : {0.02, 0.1, 0.5, 2.0, 10.0}) {
      const double cost = detail::k_cut_cost(fstar, t, p, r, q, s, u);
      CHECK(rep.brute_inf <= cost * 1.01);
    }
    const double all_first =
        pow_pos(t, -1.0 / p) * lorentz_norm_rearranged(p, r, fstar);
    const double all_second =
        pow_pos(t, -1.0 / q) * lorentz_norm_rearranged(q, s, fstar);
    CHECK(rep.brute_inf <= all_first * (1.0 + 1e-12));
    CHECK(rep.brute_inf <= all_second * (1.0 + 1e-12));
  }
}

TEST_CASE("holmstedt sweep on the indicator") {
  const auto chi = PiecewiseFn::indicator(0.0, 1.0);
  const auto sweep =
      holmstedt_sweep(chi, 1.0, 1.0, kInf, kInf, log_grid(1e-3, 1e3, 15));
  REQUIRE(sweep.reports.size() == 15);
  for (const auto& rep : sweep.reports) {
    CHECK(rep.ratio >= 0.5 - 1e-9);
    CHECK(rep.ratio <= 1.0 + 1e-9);
    CHECK(rep.brute_inf <= rep.operator_sum * (1.0 + 1e-9));
  }
  CHECK_THAT(sweep.min_ratio, Catch::Matchers::WithinRel(0.5, 1e-6));
  CHECK_THAT(sweep.max_ratio, Catch::Matchers::WithinRel(1.0, 1e-6));
}

TEST_CASE("holmstedt ratios are scale invariant") {
  const auto f = two_step();
  const auto g = PiecewiseFn::from_power_pieces({{0.0, 1.0, 7.4, 0.0},
                                                 {1.0, 3.0, 3.7, 0.0}});
  const auto grid = log_grid(1e-2, 1e2, 9);
  const auto sf = holmstedt_sweep(f, 1.0, 1.0, 2.0, 2.0, grid);
  const auto sg = holmstedt_sweep(g, 1.0, 1.0, 2.0, 2.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK_THAT(sg.reports[i].ratio,
               Catch::Matchers::WithinRel(sf.reports[i].ratio, 1e-12));
}

TEST_CASE("holmstedt equivalence bands across the corpus") {
  // Bands calibrated on this corpus and frozen; the two-sided equivalence
  // must keep every ratio inside them.
  std::vector<PiecewiseFn> corpus;
  corpus.push_back(PiecewiseFn::indicator(0.0, 1.0));
  corpus.push_back(two_step());
  corpus.push_back(PiecewiseFn::power(1.0, -0.25, 0.0, 2.0));
  corpus.push_back(PiecewiseFn::power(1.0, -0.5, 1e-2, 1.0));
  const auto grid = log_grid(1e-3, 1e3, 11);

  struct Band {
    double p, r, q, s;
    double lo, hi;
  };
  const Band bands[] = {{1.0, 1.0, kInf, kInf, 0.45, 1.0},
                        {1.0, 1.0, 2.0, 2.0, 0.65, 1.0},
                        {2.0, 2.0, kInf, kInf, 0.45, 1.0},
                        {1.0, 2.0, 3.0, 1.0, 0.70, 3.0}};
  for (const auto& band : bands) {
    for (const auto& f : corpus) {
      const auto sweep =
          holmstedt_sweep(f, band.p, band.r, band.q, band.s, grid, 48);
      CHECK(sweep.min_ratio >= band.lo - 1e-9);
      CHECK(sweep.max_ratio <= band.hi + 1e-6);
      for (const auto& rep : sweep.reports) {
        CHECK(is_finite(rep.ratio));
        CHECK(rep.ratio > 0.0);
      }
    }
  }
}

TEST_CASE("truncated power band stays within the calibrated window") {
  const auto f = PiecewiseFn::power(1.0, -0.5, 1e-2, 1.0);
  const auto sweep =
      holmstedt_sweep(f, 1.0, 1.0, kInf, kInf, log_grid(1e-3, 1e3, 15));
  CHECK(sweep.min_ratio > 0.1);
  CHECK(sweep.min_ratio >= 0.49);
  CHECK(sweep.min_ratio <= 0.52);
  CHECK(sweep.max_ratio <= 1.0 + 1e-9);
}

TEST_CASE("cut grid refinement is stable") {
  const PiecewiseFn fns[] = {PiecewiseFn::power(1.0, -0.25, 0.0, 2.0),
                             PiecewiseFn::power(1.0, -0.5, 1e-2, 1.0)};
  const double params[][4] = {{2.0, 2.0, kInf, kInf}, {1.0, 1.0, 2.0, 2.0}};
  for (const auto& f : fns)
    for (const auto& pr : params)
      for (double t : {1e-2, 1.0, 1e2}) {
        const auto coarse = k_bruteforce(f, t, pr[0], pr[1], pr[2], pr[3], 64);
        const auto fine = k_bruteforce(f, t, pr[0], pr[1], pr[2], pr[3], 128);
        REQUIRE(coarse.brute_inf > 0.0);
        CHECK(std::abs(coarse.brute_inf - fine.brute_inf) <
              0.01 * coarse.brute_inf);
      }
}

TEST_CASE("averaging operators on closed cells") {
  const auto e1 = e_operator(PiecewiseFn::indicator(0.0, 2.0));
  CHECK(evaluate(e1, 0.5) == 1.0);
  CHECK(evaluate(e1, 1.5) == 0.0);
  CHECK(e1.support_end() == 1.0);

  const auto e2 = e_operator(PiecewiseFn::power(1.0, -1.0, 0.5, 2.0));
  CHECK_THAT(evaluate(e2, 0.75), Catch::Matchers::WithinRel(4.0 / 3.0, 1e-12));
  CHECK(evaluate(e2, 1.25) == 0.0);

  const auto f1 = f_operator(PiecewiseFn::indicator(1.0, 2.0));
  CHECK(evaluate(f1, 1.5) == 1.0);
  CHECK(evaluate(f1, 2.5) == 0.0);
  CHECK(f1.support_end() == 2.0);

  const auto f2 = f_operator(PiecewiseFn::power(1.0, -1.0, 1.0, 2.0));
  CHECK_THAT(evaluate(f2, 1.5),
             Catch::Matchers::WithinRel(std::log(2.0), 1e-12));
  CHECK(evaluate(f2, 1.1) == evaluate(f2, 1.9));

  CHECK(f_operator(PiecewiseFn::indicator(0.0, 1.0)).empty());
  CHECK(f_operator(PiecewiseFn::zero()).empty());
  CHECK_THROWS_AS(f_operator(PiecewiseFn::power(1.0, -2.0, 1.0, kInf)),
                  std::invalid_argument);
  CHECK_THROWS_AS(f_operator(PiecewiseFn::indicator(0.0, 2e6)),
                  std::invalid_argument);

  // Cell averaging preserves the mass beyond the unit interval exactly.
  const auto g = PiecewiseFn::from_power_pieces(
      {{0.0, 0.7, 3.0, 0.0}, {0.7, 2.3, 2.0, 0.0}, {2.3, 7.9, 0.5, -0.3}});
  const auto fg = f_operator(g);
  const double m1 = power_integral(g, 1.0, 1.0, 1.0, 8.0);
  const double m2 = power_integral(fg, 1.0, 1.0, 1.0, 8.0);
  CHECK_THAT(m2, Catch::Matchers::WithinRel(m1, 1e-12));
}

TEST_CASE("sandwich inequality on the corpus") {
  const auto grid = log_grid(1e-3, 1e3, 200);
  CHECK(sandwich_check(PiecewiseFn::indicator(0.0, 1.0), grid));
  CHECK(sandwich_check(two_step(), grid));
  CHECK(sandwich_check(PiecewiseFn::power(1.0, -1.0, 1e-2, 1e2), grid));
  CHECK(sandwich_check(PiecewiseFn::power(1.0, -0.25, 0.0, 2.0), grid));
  CHECK(sandwich_check(PiecewiseFn::zero(), grid));

  // Hand values for the two-step input: unit cell keeps the function, the
  // integer cells hold its averages.
  const auto fstar = rearrange(two_step());
  const auto efn = e_operator(fstar);
  const auto ffn = f_operator(fstar);
  CHECK(evaluate(efn, 0.5) + evaluate(ffn, 0.5) == 2.0);
  CHECK(evaluate(efn, 1.5) + evaluate(ffn, 1.5) == 1.0);
  CHECK(evaluate(efn, 2.5) + evaluate(ffn, 2.5) == 1.0);
  CHECK(evaluate(efn, 3.5) + evaluate(ffn, 3.5) == 0.0);
}

TEST_CASE("theorem seven chain on the unit indicator") {
  const auto X = SpaceSpec::lorentz(2.0, 2.0);
  const auto Y = SpaceSpec::lorentz(1.0, 1.0);
  const auto rep = theorem7_verify(X, Y, PiecewiseFn::indicator(0.0, 1.0));
  CHECK_THAT(rep.c1, Catch::Matchers::WithinRel(1.0, 1e-12));
  CHECK_THAT(rep.c2, Catch::Matchers::WithinRel(4.0, 1e-12));
  CHECK_THAT(rep.c3, Catch::Matchers::WithinRel(1.0, 1e-12));
  CHECK_THAT(rep.norm_sum, Catch::Matchers::WithinRel(1.0, 1e-9));
  CHECK_THAT(rep.norm_h, Catch::Matchers::WithinRel(1.0, 1e-9));
  CHECK(rep.chain_ok);
  CHECK(rep.corpus.size() == 13);
  for (const auto& [id, ratio] : rep.corpus) {
    CHECK(!id.empty());
    CHECK(ratio <= 1.0 + 1e-12);
  }

  const auto zero = theorem7_verify(X, Y, PiecewiseFn::zero());
  CHECK(zero.norm_sum == 0.0);
  CHECK(zero.norm_h == 0.0);
  CHECK(zero.chain_ok);
}

TEST_CASE("theorem seven regression fixture") {
  // Frozen run: f(s) = s^(-2/3) on [1e-3, 1e3) against L(2,2) + L(1,1).
  const auto X = SpaceSpec::lorentz(2.0, 2.0);
  const auto Y = SpaceSpec::lorentz(1.0, 1.0);
  const auto f = PiecewiseFn::power(1.0, -2.0 / 3.0, 1e-3, 1e3);
  const auto rep = theorem7_verify(X, Y, f);
  CHECK_THAT(rep.norm_sum,
             Catch::Matchers::WithinRel(5.44977063737548, 1e-9));
  CHECK_THAT(rep.norm_h,
             Catch::Matchers::WithinRel(32.1952489159098, 1e-9));
  CHECK(rep.norm_sum <= rep.norm_h);
  CHECK(rep.chain_ok);
}

TEST_CASE("theorem seven rejects a reversed pair") {
  const auto X = SpaceSpec::lorentz(2.0, 2.0);
  const auto Y = SpaceSpec::lorentz(1.0, 1.0);
  const auto chi = PiecewiseFn::indicator(0.0, 1.0);
  CHECK_THROWS_AS(theorem7_verify(Y, X, chi), HypothesisFailed);
  CHECK_THROWS_AS(theorem7_verify(SpaceSpec::sum(X, Y), Y, chi), InvalidSpec);
  CHECK_THROWS_AS(theorem7_verify(X, Y, chi, 0), std::invalid_argument);
}

TEST_CASE("k parameter validation") {
  const auto chi = PiecewiseFn::indicator(0.0, 1.0);
  CHECK_THROWS_AS(k_bruteforce(chi, 1.0, 2.0, 1.0, 1.0, 1.0), InvalidSpec);
  CHECK_THROWS_AS(k_bruteforce(chi, 1.0, 2.0, 1.0, 2.0, 1.0), InvalidSpec);
  CHECK_THROWS_AS(k_bruteforce(chi, 1.0, kInf, 1.0, kInf, kInf), InvalidSpec);
  CHECK_THROWS_AS(k_bruteforce(chi, 1.0, 1.0, 0.0, 2.0, 2.0), InvalidSpec);
  CHECK_THROWS_AS(k_bruteforce(chi, 1.0, 1.0, 1.0, kInf, 2.0), InvalidSpec);
  CHECK_THROWS_AS(k_bruteforce(chi, 0.0, 1.0, 1.0, 2.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(k_bruteforce(chi, kInf, 1.0, 1.0, 2.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(k_bruteforce(chi, 1.0, 1.0, 1.0, 2.0, 2.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(holmstedt_sweep(chi, 1.0, 1.0, 2.0, 2.0, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(holmstedt_sweep(chi, 1.0, 1.0, 2.0, 2.0, {1.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("k divergence when no cut has finite cost") {
  // The head s^-1 sits outside both target spaces, so every decomposition
  // fails at once.
  const auto f = PiecewiseFn::power(1.0, -1.0, 0.0, 1.0);
  CHECK_THROWS_AS(k_bruteforce(f, 1.0, 1.0, 1.0, 2.0, 2.0), Divergent);
}
