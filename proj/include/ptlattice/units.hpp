#pragma once

#include <cmath>
#include <numbers>

#include "ptlattice/errors.hpp"

namespace ptlattice {

// Physical description of the driven complex lattice.
// The refractive index modulation is U(x) = U1 cos(2 pi x / a) + i U2 sin(2 pi x / a)
// and the transverse index gradient F plays the role of a constant force.
struct PhysicalParams {
  double wavelength = 0.0;      // vacuum wavelength (any length unit, shared with period)
  double substrate_index = 0.0; // n_s
  double lattice_period = 0.0;  // a
  double real_amplitude = 0.0;  // U1
  double imag_amplitude = 0.0;  // U2
  double force = 0.0;           // F, index units per length
};

struct DimensionlessParams {
  double v1 = 0.0;
  double v2 = 0.0;
  double alpha = 0.0;   // dq~/dz
  double z_scale = 0.0; // physical propagation length per unit z
  double recoil_energy = 0.0;
};

/// Recoil energy E_k = lambdabar^2 k^2 / (2 n_s) with lambdabar = lambda / 2 pi and k = pi / a.
inline double recoil_energy(const PhysicalParams& p) {
  const double lambdabar = p.wavelength / (2.0 * std::numbers::pi);
  const double k = std::numbers::pi / p.lattice_period;
  return lambdabar * lambdabar * k * k / (2.0 * p.substrate_index);
}

inline DimensionlessParams physical_to_dimensionless(const PhysicalParams& p) {
  if (!(p.wavelength > 0.0))
    throw invalid_parameter("wavelength must be positive");
  if (!(p.substrate_index > 0.0))
    throw invalid_parameter("substrate index must be positive");
  if (!(p.lattice_period > 0.0))
    throw invalid_parameter("lattice period must be positive");

  const double ek = recoil_energy(p);
  const double k = std::numbers::pi / p.lattice_period;
  const double lambdabar = p.wavelength / (2.0 * std::numbers::pi);

  DimensionlessParams out;
  out.recoil_energy = ek;
  out.v1 = p.real_amplitude / (2.0 * ek);
  out.v2 = p.imag_amplitude / (2.0 * ek);
  out.alpha = p.force / (k * ek);
  out.z_scale = lambdabar / ek;
  return out;
}

} // namespace ptlattice
