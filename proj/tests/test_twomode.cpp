#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ptlattice/twomode.hpp"

using namespace ptlattice;
using Catch::Approx;

TEST_CASE("two_mode_eigenvalues") {
  auto [p, m] = two_mode_eigenvalues(0.0, 0.4, 0.3);
  CHECK(p.real() == Approx(0.13228756555322952).epsilon(1e-14));
  CHECK(m.real() == Approx(-0.13228756555322952).epsilon(1e-14));
  CHECK(p.imag() == 0.0);

  std::tie(p, m) = two_mode_eigenvalues(0.0, 0.4, 0.4);
  CHECK(p == std::complex<double>(0.0, 0.0));
  CHECK(m == std::complex<double>(0.0, 0.0));

  std::tie(p, m) = two_mode_eigenvalues(0.0, 0.4, 0.5);
  CHECK(p.real() == 0.0);
  CHECK(p.imag() == Approx(0.15).epsilon(1e-14));
  CHECK(m.imag() == Approx(-0.15).epsilon(1e-14));

  std::tie(p, m) = two_mode_eigenvalues(3.0, 0.4, 0.0);
  CHECK(p.real() == Approx(std::sqrt(9.04)));
}

TEST_CASE("gamma") {
  CHECK(gamma(0.4, 0.0) == 1.0);
  CHECK(gamma(0.4, 0.2) == Approx(3.0).epsilon(1e-15));
  CHECK(gamma(0.4, -0.2) == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(gamma(0.4, 0.4), domain_error);
}

TEST_CASE("lz_probability") {
  CHECK(lz_probability(0.4, 0.0, 0.12) == Approx(0.1231).margin(5e-5));
  CHECK(lz_probability(0.4, 0.3, 0.12) == Approx(0.400).margin(5e-4));
  CHECK(lz_probability(0.4, 0.3, -0.12) == lz_probability(0.4, 0.3, 0.12));
  CHECK(lz_probability(0.4, 0.3, 1e12) == Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(lz_probability(0.4, 0.4, 0.12), domain_error);
  CHECK_THROWS_AS(lz_probability(0.4, -0.5, 0.12), domain_error);
  CHECK_THROWS_AS(lz_probability(0.4, 0.1, 0.0), domain_error);
}

TEST_CASE("lz_survival") {
  CHECK(lz_survival(0.4, 0.0, 0.12) == Approx(1.0 - lz_probability(0.4, 0.0, 0.12)).epsilon(1e-15));
  CHECK(lz_survival(0.4, 0.3, 0.12) == Approx(4.20).margin(5e-3));
  CHECK(lz_survival(0.4, 0.2, 1e-9) == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("critical_lambda and anti-critical limit") {
  CHECK(critical_lambda(0.4, 0.12) == Approx(8.3776).margin(5e-5));
  CHECK(critical_lambda(0.4, 0.004) == Approx(251.33).margin(5e-3));
  CHECK(critical_lambda(0.0, 0.12) == 0.0);
  CHECK_THROWS_AS(critical_lambda(0.4, 0.0), domain_error);
  CHECK(anti_critical_limit() == std::pair{0.0, 1.0});
  // delta -> +Delta approaches (Lambda, 1)
  const double d = 0.4 - 1e-9;
  CHECK(lz_survival(0.4, d, 0.12) == Approx(critical_lambda(0.4, 0.12)).epsilon(1e-6));
  CHECK(lz_probability(0.4, d, 0.12) == Approx(1.0).epsilon(1e-6));
  CHECK(lz_survival(0.4, -d, 0.12) < 1e-8);
}

TEST_CASE("multicross_power") {
  CHECK(multicross_power(0.4, 0.3, 0.12, 0) == 1.0);
  CHECK(multicross_power(0.4, 0.3, 0.12, 1) == Approx(4.6).margin(5e-3));
  CHECK(multicross_power(0.4, 0.3, 0.12, 2) == Approx(19.72).margin(5e-3));
  CHECK(multicross_power(0.4, -0.4 + 1e-12, 0.12, 3) == Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(multicross_power(0.4, 0.3, 0.12, -1), domain_error);
}

TEST_CASE("staircase_power handles the limits and negative sweeps") {
  CHECK(staircase_power(0.4, 0.3, 0.12, 2) == multicross_power(0.4, 0.3, 0.12, 2));
  CHECK(staircase_power(0.4, 0.3, -0.12, 2) == multicross_power(0.4, -0.3, 0.12, 2));
  const double lambda = critical_lambda(0.4, 0.12);
  CHECK(staircase_power(0.4, 0.4, 0.12, 1) == Approx(1.0 + lambda));
  CHECK(staircase_power(0.4, 0.4, 0.12, 2) == Approx(1.0 + lambda + lambda * lambda));
  CHECK(staircase_power(0.4, 0.4, -0.12, 3) == 1.0);
  CHECK(staircase_power(0.4, -0.4, 0.12, 3) == 1.0);
}

TEST_CASE("exact identities") {
  for (double beta : {0.01, 0.12, 3.0}) {
    for (double coupling : {0.1, 0.4, 1.0}) {
      const double classic = std::exp(-std::numbers::pi * (coupling * coupling) / (2.0 * beta));
      CHECK(lz_probability(coupling, 0.0, beta) == classic);
      for (double ratio : {-0.9, -0.3, 0.0, 0.5, 0.99}) {
        const double delta = ratio * coupling;
        CHECK(multicross_power(coupling, delta, beta, 1) ==
              lz_survival(coupling, delta, beta) + lz_probability(coupling, delta, beta));
        CHECK(lz_probability(coupling, delta, beta) == lz_probability(coupling, -delta, beta));
      }
    }
  }
}

TEST_CASE("monotone in delta on [0, Delta)") {
  double last_p = 0.0;
  double last_s = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double delta = 0.4 * i / 40.0;
    const double p = lz_probability(0.4, delta, 0.12);
    const double s = lz_survival(0.4, delta, 0.12);
    if (i > 0) {
      CHECK(p > last_p);
      CHECK(s > last_s);
    }
    last_p = p;
    last_s = s;
  }
}

TEST_CASE("from_lattice mapping") {
  const auto p = TwoModeParams::from_lattice(0.2, 0.15, 0.03);
  CHECK(p.coupling == Approx(0.4));
  CHECK(p.asymmetry == Approx(0.3));
  CHECK(p.sweep_rate == Approx(0.12));
  CHECK(p.detuning_offset == Approx(2.0));
  CHECK(p.detuning(10.0) == Approx(-0.6));
}

TEST_CASE("evolve_two_mode: critical coupling decouples a2") {
  const TwoModeParams p{0.4, 0.4, 0.12, 0.0};
  TwoModeConfig cfg;
  cfg.target_samples = 500;
  const auto trace = evolve_two_mode(p, 300.0, TwoModeState::lower_level(p.sweep_rate, -300.0), cfg);
  for (const auto& s : trace.samples)
    CHECK(std::abs(std::abs(s.a2) - 1.0) < 1e-8);
}

TEST_CASE("evolve_two_mode: Fresnel limit Lambda") {
  const TwoModeParams p{0.4, 0.4, 0.12, 0.0};
  const auto a = two_mode_asymptotics(p, 300.0);
  CHECK(a.a1 == Approx(8.3776).epsilon(0.02));
  CHECK(a.a2 == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("evolve_two_mode: Hermitian Landau-Zener value") {
  const TwoModeParams p{0.4, 0.0, 0.12, 0.0};
  const auto a = two_mode_asymptotics(p);
  CHECK(a.a2 == Approx(0.12313).epsilon(0.01));
  const auto start = TwoModeState::adiabatic_lower(p, -a.half_span);
  CHECK(std::abs(start.a2) == 1.0);
  CHECK(a.power == Approx(std::norm(start.a1) + std::norm(start.a2)).epsilon(1e-6));
}

TEST_CASE("evolve_two_mode: oracle grid") {
  for (double coupling : {0.2, 0.4}) {
    for (double delta : {-0.3, 0.0, 0.3}) {
      if (std::abs(delta) >= coupling)
        continue; // outside the gapped domain
      for (double beta : {0.05, 0.12, 0.5}) {
        const TwoModeParams p{coupling, delta, beta, 0.0};
        const auto num = two_mode_asymptotics(p);
        const auto ref = analytic_asymptotics(p);
        REQUIRE(ref.has_value());
        INFO("Delta = " << coupling << ", delta = " << delta << ", beta = " << beta);
        auto close = [](double x, double y) {
          return y < 0.1 ? std::abs(x - y) <= 0.005 : std::abs(x - y) <= 0.02 * y;
        };
        CHECK(close(num.a2, lz_probability(coupling, delta, beta)));
        CHECK(close(num.a1, lz_survival(coupling, delta, beta)));
        CHECK(ref->first == lz_survival(coupling, delta, beta));
        CHECK(ref->second == lz_probability(coupling, delta, beta));
      }
    }
  }
}

TEST_CASE("negative sweep starts in a1 and sees -delta") {
  const TwoModeParams p{0.4, 0.3, -0.12, 0.0};
  const auto num = two_mode_asymptotics(p);
  const auto ref = analytic_asymptotics(p);
  REQUIRE(ref.has_value());
  CHECK(ref->first == Approx(lz_probability(0.4, -0.3, 0.12)));
  CHECK(ref->second == Approx(lz_survival(0.4, -0.3, 0.12)));
  CHECK(num.a1 == Approx(ref->first).epsilon(0.02));
  CHECK(num.a2 == Approx(ref->second).epsilon(0.02));
}

TEST_CASE("analytic_asymptotics is empty in the broken phase") {
  CHECK_FALSE(analytic_asymptotics({0.2, 0.3, 0.12, 0.0}).has_value());
  CHECK_THROWS_AS(analytic_asymptotics({0.2, 0.1, 0.0, 0.0}), domain_error);
}

TEST_CASE("evolve_two_mode: input checks and step halving") {
  const TwoModeParams p{0.4, 0.3, 0.12, 0.0};
  CHECK_THROWS_AS(evolve_two_mode(p, -1.0, TwoModeState::lower_level(0.12, 0.0)), invalid_parameter);
  TwoModeConfig cfg;
  cfg.check_convergence = true;
  const auto trace = evolve_two_mode(p, 300.0, TwoModeState::lower_level(0.12, -300.0), cfg);
  REQUIRE(trace.halving_difference.has_value());
  CHECK(*trace.halving_difference < 1e-6);
  CHECK(trace.warnings.empty());
  CHECK(default_half_span(0.12) == 300.0);
  CHECK(default_half_span(1e-3) == Approx(632.4555).epsilon(1e-6));
}
