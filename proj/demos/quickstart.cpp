// Tour of the core API: build a function, rearrange it, take norms, apply a
// transform, probe boundedness, and read off Boyd indices.

#include <cstdio>

#include "boydkit/boyd.hpp"
#include "boydkit/hardy.hpp"
#include "boydkit/piecewise.hpp"
#include "boydkit/spaces.hpp"

using namespace boydkit;

int main() {
  // Two steps out of order; the rearrangement packs them by height.
  const auto f = PiecewiseFn::from_power_pieces({{0.0, 1.0, 1.0, 0.0},
                                                 {2.0, 3.0, 2.0, 0.0}});
  const auto fstar = rearrange(f);
  std::printf("f*(0.5) = %g, f*(1.5) = %g\n", evaluate(fstar, 0.5),
              evaluate(fstar, 1.5));

  const auto L21 = SpaceSpec::lorentz(2.0, 1.0);
  std::printf("|f|_{2,1} = %.12g\n", space_norm(L21, f));

  // The averaging Hardy operator on the decreasing rearrangement.
  const auto H = apply(HardyKind::upper(1.0, 1.0), f);
  std::printf("Hf(1) = %.12g\n", H(1.0));

  // Sharp constant p' = 2 shows up as the measured bound on L(2,2).
  const auto L22 = SpaceSpec::lorentz(2.0, 2.0);
  const auto probe =
      boundedness_probe(HardyKind::upper(1.0, 1.0), L22, default_probe_family(L22), 12);
  std::printf("H bounded on L(2,2): %s, C = %.6g\n",
              probe.bounded ? "yes" : "no", probe.constant);

  const auto rep = estimate_indices(L21, default_dilation_grid(), {});
  std::printf("Boyd indices of L(2,1): [%g, %g]\n", rep.lower_index,
              rep.upper_index);
  return 0;
}
