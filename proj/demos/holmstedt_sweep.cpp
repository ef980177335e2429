// Sweeps the brute-force K-functional for (L(1,1), L(2,2)) against the
// operator-sum bound across six decades and prints the equivalence ratio.

#include <cmath>
#include <cstdio>
#include <vector>

#include "boydkit/interp.hpp"
#include "boydkit/piecewise.hpp"

using namespace boydkit;

int main() {
  const auto f = PiecewiseFn::from_power_pieces({{0.0, 1.0, 2.0, 0.0},
                                                 {1.0, 3.0, 1.0, 0.0}});
  std::vector<double> grid;
  for (int i = 0; i < 13; ++i) grid.push_back(1e-3 * std::pow(10.0, i * 0.5));

  const auto sweep = holmstedt_sweep(f, 1.0, 1.0, 2.0, 2.0, grid, 64);
  std::printf("%10s %14s %14s %8s\n", "t", "K(t)", "bound(t)", "ratio");
  for (const auto& rep : sweep.reports)
    std::printf("%10.4g %14.8g %14.8g %8.4f\n", rep.t, rep.brute_inf,
                rep.operator_sum, rep.ratio);
  std::printf("ratio range: [%.4f, %.4f]\n", sweep.min_ratio, sweep.max_ratio);
  return 0;
}
