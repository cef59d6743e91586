// Minimal library use: band gap at the zone edge, one driven passage through
// it, and the two-mode estimate for the same passage.
//
//   landau_zener [V1 V2 alpha]

#include <cstdio>
#include <cstdlib>

#include "ptlattice/dynamics.hpp"
#include "ptlattice/twomode.hpp"

int main(int argc, char** argv) {
  const double v1 = argc > 1 ? std::atof(argv[1]) : 0.2;
  const double v2 = argc > 2 ? std::atof(argv[2]) : 0.15;
  const double alpha = argc > 3 ? std::atof(argv[3]) : 0.03;

  const ptlattice::LatticeParams lattice{v1, v2, ptlattice::default_truncation};
  const auto e = ptlattice::band_energies(lattice, 1.0);
  std::printf("gap at q = 1:        %.6f\n", e[1].real() - e[0].real());

  const auto result = ptlattice::transition_probability(lattice, {alpha, 0.0, 1.8});
  std::printf("P (lattice, RK4):    %.6f\n", result.probability);
  std::printf("P (two-mode):        %.6f\n", ptlattice::lz_probability(2 * v1, 2 * v2, 4 * alpha));
  std::printf("power after passage: %.6f\n", result.final_power);
  return 0;
}
