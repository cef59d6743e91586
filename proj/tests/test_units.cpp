#include <catch_amalgamated.hpp>

#include <numbers>

#include "ptlattice/units.hpp"

using namespace ptlattice;
using Catch::Approx;

TEST_CASE("recoil energy unit ratio gives V1 = 1") {
  PhysicalParams p{1.0, 1.5, 3.0, 0.0, 0.0, 0.0};
  const double ek = recoil_energy(p);
  p.real_amplitude = 2.0 * ek;
  const auto d = physical_to_dimensionless(p);
  CHECK(d.v1 == Approx(1.0).epsilon(1e-14));
  CHECK(d.v2 == 0.0);
  CHECK(d.alpha == 0.0);
}

TEST_CASE("alpha is linear in the force") {
  PhysicalParams p{0.8, 2.2, 4.0, 0.0, 0.0, 1e-4};
  const double a1 = physical_to_dimensionless(p).alpha;
  p.force *= 2.0;
  CHECK(physical_to_dimensionless(p).alpha == Approx(2.0 * a1).epsilon(1e-14));
}

TEST_CASE("waveguide example: lambda = 1, n_s = 2, a = 5") {
  // E_k = (lambda/2pi)^2 (pi/a)^2 / (2 n_s) simplifies to lambda^2 / (8 n_s a^2).
  const double lambda = 1.0, ns = 2.0, a = 5.0;
  const double ek_oracle = lambda * lambda / (8.0 * ns * a * a);
  CHECK(ek_oracle == Approx(0.0025).epsilon(1e-15));

  PhysicalParams p{lambda, ns, a, 0.4 * ek_oracle, -0.3 * ek_oracle, 0.0};
  p.force = 0.03 * (std::numbers::pi / a) * ek_oracle;
  const auto d = physical_to_dimensionless(p);
  CHECK(d.recoil_energy == Approx(ek_oracle).epsilon(1e-14));
  CHECK(d.v1 == Approx(0.2).epsilon(1e-13));
  CHECK(d.v2 == Approx(-0.15).epsilon(1e-13));
  CHECK(d.alpha == Approx(0.03).epsilon(1e-13));
  CHECK(d.z_scale == Approx(lambda / (2.0 * std::numbers::pi) / ek_oracle).epsilon(1e-14));
}

TEST_CASE("non-positive physical scales are rejected") {
  const PhysicalParams good{1.0, 2.0, 5.0, 0.0, 0.0, 0.0};
  auto bad = good;
  bad.wavelength = 0.0;
  CHECK_THROWS_AS(physical_to_dimensionless(bad), invalid_parameter);
  bad = good;
  bad.substrate_index = -1.0;
  CHECK_THROWS_AS(physical_to_dimensionless(bad), invalid_parameter);
  bad = good;
  bad.lattice_period = 0.0;
  CHECK_THROWS_AS(physical_to_dimensionless(bad), invalid_parameter);
}
