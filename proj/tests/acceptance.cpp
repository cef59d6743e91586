// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance [--jobs N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ptlattice/dynamics.hpp"
#include "ptlattice/experiments.hpp"
#include "ptlattice/lattice.hpp"
#include "ptlattice/twomode.hpp"

using namespace ptlattice;

namespace {

int jobs = 1;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty())
      detail += "; ";
    detail += what;
    if (!ok) {
      pass = false;
      detail += " [x]";
    }
  }
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

bool within_rel(double x, double target, double rel) { return std::abs(x - target) <= rel * std::abs(target); }

EvolutionTrace lattice_run(double v2, double alpha, double q_fin, int target_samples = 4000) {
  const LatticeParams p{0.2, v2, 12};
  const DriveParams d{alpha, 0.0, q_fin};
  IntegratorConfig cfg;
  cfg.target_samples = target_samples;
  cfg.record_projections = false;
  return evolve(prepare_band_state(p, 0.0, 1), p, d, cfg);
}

Outcome adiabatic_gain_loss() {
  Outcome o;
  const double plus = power(lattice_run(0.1, 1e-3, 2.0).final_state);
  const double minus = power(lattice_run(0.1, -1e-3, -2.0).final_state);
  o.require(within_rel(plus, 3.0, 0.05), "rho+ = " + fmt(plus) + " (3 +- 5%)");
  o.require(within_rel(minus, 1.0 / 3.0, 0.05), "rho- = " + fmt(minus) + " (1/3 +- 5%)");
  return o;
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
  return out;
}

Outcome sweep_agreement() {
  Outcome o;
  const std::vector<double> alphas = log_grid(2e-3, 0.3, 20);
  for (double v2 : {0.0, 0.15, 0.19}) {
    std::vector<double> diff(alphas.size());
    detail::parallel_for(alphas.size(), jobs, [&](std::size_t i) {
      const double p = transition_probability({0.2, v2, 12}, {alphas[i], 0.0, 1.8}).probability;
      diff[i] = std::abs(p - lz_probability(0.4, 2.0 * v2, 4.0 * alphas[i]));
    });
    const auto worst = std::max_element(diff.begin(), diff.end());
    o.require(*worst <= 0.03, "V2=" + fmt(v2) + " max|dP| = " + fmt(*worst, "%.4f") + " at alpha=" +
                                  fmt(alphas[static_cast<std::size_t>(worst - diff.begin())], "%.3g"));
  }
  return o;
}

double plateau_mean(const std::vector<Plateau>& plateaus, int crossings) {
  for (const auto& p : plateaus)
    if (p.crossings == crossings)
      return p.mean_power;
  return std::numeric_limits<double>::quiet_NaN();
}

Outcome staircase_plateaus() {
  Outcome o;
  const double critical_v2 = 0.2 - 1e-7;
  std::vector<EvolutionTrace> traces(3);
  const double v2s[] = {0.15, critical_v2, critical_v2};
  const double alphas[] = {0.03, 0.03, -0.03};
  detail::parallel_for(3, jobs, [&](std::size_t i) {
    traces[i] = lattice_run(v2s[i], alphas[i], alphas[i] > 0.0 ? 3.9 : -3.9, 8000);
  });

  const auto gain = plateau_averages(traces[0], 0.0);
  const double rho1 = multicross_power(0.4, 0.3, 0.12, 1);
  const double rho2 = multicross_power(0.4, 0.3, 0.12, 2);
  o.require(within_rel(plateau_mean(gain, 1), rho1, 0.1),
            "rho1 = " + fmt(plateau_mean(gain, 1), "%.4f") + " (" + fmt(rho1, "%.4f") + " +- 10%)");
  o.require(within_rel(plateau_mean(gain, 2), rho2, 0.1),
            "rho2 = " + fmt(plateau_mean(gain, 2), "%.4f") + " (" + fmt(rho2, "%.4f") + " +- 10%)");

  const double one_plus_lambda = 1.0 + critical_lambda(0.4, 0.12);
  const double crit = plateau_mean(plateau_averages(traces[1], 0.0), 1);
  o.require(within_rel(crit, one_plus_lambda, 0.1),
            "critical rho1 = " + fmt(crit, "%.4f") + " (" + fmt(one_plus_lambda, "%.4f") + " +- 10%)");

  double worst = 0.0;
  for (const auto& s : traces[2].samples)
    if (crossings_between(0.0, s.q) >= 1)
      worst = std::max(worst, std::abs(s.power - 1.0));
  o.require(worst < 1e-3, "alpha<0 critical max|rho-1| after first crossing = " + fmt(worst, "%.2e") + " (< 1e-3)");
  return o;
}

Outcome hermitian_conservation() {
  Outcome o;
  struct Drive {
    double alpha, q_fin;
  };
  std::vector<Drive> drives = {{1e-3, 2.0}, {-1e-3, -2.0}, {0.03, 3.9}, {-0.03, -3.9}};
  for (double a : log_grid(2e-3, 0.3, 20))
    drives.push_back({a, 1.8});
  std::vector<double> worst(drives.size(), 0.0);
  detail::parallel_for(drives.size(), jobs, [&](std::size_t i) {
    const LatticeParams p{0.2, 0.0, 12};
    const DriveParams d{drives[i].alpha, 0.0, drives[i].q_fin};
    IntegratorConfig cfg;
    cfg.sample_stride = 1;
    cfg.record_projections = false;
    for (const auto& s : evolve(prepare_band_state(p, 0.0, 1), p, d, cfg).samples)
      worst[i] = std::max(worst[i], std::abs(s.power - 1.0));
  });
  const double w = *std::max_element(worst.begin(), worst.end());
  o.require(w < 1e-6, fmt(static_cast<double>(drives.size()), "%.0f") + " drives, every step: max|rho-1| = " +
                          fmt(w, "%.2e") + " (< 1e-6)");
  return o;
}

std::vector<complex> sorted_dense(double v1, double v2, double q) {
  const Eigen::MatrixXd h = build_hamiltonian({v1, v2, 12}, q).dense();
  Eigen::EigenSolver<Eigen::MatrixXd> es(h, false);
  std::vector<complex> e(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(e.begin(), e.end(), [](complex a, complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return e;
}

Outcome spectral_properties() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double max_imag = 0.0, max_transpose = 0.0, max_solver = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double v1 = 0.5 * (1.0 - unit(rng));
    const double v2 = (2.0 * unit(rng) - 1.0) * v1 * (1.0 - 1e-6);
    const double q = -2.0 + 4.0 * unit(rng);
    const auto e = band_energies({v1, v2, 12}, q);
    const auto t = band_energies({v1, -v2, 12}, q);
    const auto g = sorted_dense(v1, v2, q);
    for (std::size_t k = 0; k < e.size(); ++k) {
      max_imag = std::max(max_imag, std::abs(e[k].imag()));
      max_transpose = std::max(max_transpose, std::abs(e[k] - t[k]));
      max_solver = std::max(max_solver, std::abs(e[k] - g[k]));
    }
  }
  o.require(max_imag < 1e-9, "max|Im| = " + fmt(max_imag, "%.1e"));
  o.require(max_transpose < 1e-10, "V2->-V2 " + fmt(max_transpose, "%.1e"));
  o.require(max_solver < 1e-9, "symmetrized vs general " + fmt(max_solver, "%.1e"));
  return o;
}

Outcome gap_oracle() {
  Outcome o;
  for (double v2 : {0.0, 0.1, 0.15, 0.19}) {
    const auto e = band_energies({0.2, v2, 12}, 1.0);
    const double gap = e[1].real() - e[0].real();
    const double ref = 2.0 * std::sqrt(0.04 - v2 * v2);
    o.require(within_rel(gap, ref, 0.1), "V2=" + fmt(v2) + " gap " + fmt(gap, "%.5f") + " vs " + fmt(ref, "%.5f"));
  }
  return o;
}

Outcome two_mode_oracle() {
  Outcome o;
  auto close = [](double x, double y) { return y < 0.1 ? std::abs(x - y) <= 0.005 : std::abs(x - y) <= 0.02 * y; };
  struct Case {
    double coupling, delta, beta;
  };
  std::vector<Case> cases;
  for (double c : {0.2, 0.4})
    for (double d : {-0.3, 0.0, 0.3})
      for (double b : {0.05, 0.12, 0.5})
        if (std::abs(d) < c)
          cases.push_back({c, d, b});
  std::vector<TwoModeAsymptotics> num(cases.size());
  detail::parallel_for(cases.size(), jobs, [&](std::size_t i) {
    num[i] = two_mode_asymptotics({cases[i].coupling, cases[i].delta, cases[i].beta, 0.0});
  });
  int failures = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const double p = lz_probability(cases[i].coupling, cases[i].delta, cases[i].beta);
    const double s = lz_survival(cases[i].coupling, cases[i].delta, cases[i].beta);
    if (!close(num[i].a2, p) || !close(num[i].a1, s))
      ++failures;
    worst = std::max({worst, std::abs(num[i].a2 - p) / std::max(p, 0.1), std::abs(num[i].a1 - s) / std::max(s, 0.1)});
  }
  o.require(failures == 0, fmt(static_cast<double>(cases.size()), "%.0f") + " gapped grid points, " +
                               fmt(failures, "%.0f") + " outside tolerance, worst scaled error " + fmt(worst, "%.2e"));
  const auto crit = two_mode_asymptotics({0.4, 0.4, 0.12, 0.0}, 300.0);
  const double lambda = critical_lambda(0.4, 0.12);
  o.require(within_rel(crit.a1, lambda, 0.02), "delta=Delta |a1|^2 = " + fmt(crit.a1, "%.4f") + " vs Lambda " +
                                                   fmt(lambda, "%.4f"));
  return o;
}

bool machine_equal(double a, double b) {
  return std::abs(a - b) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
}

Outcome exact_identities() {
  Outcome o;
  int checked = 0, lz = 0, n1 = 0, sym = 0;
  for (double beta : {0.004, 0.05, 0.12, 0.5, 2.0}) {
    for (double c : {0.1, 0.2, 0.4, 1.0}) {
      if (!machine_equal(lz_probability(c, 0.0, beta), std::exp(-std::numbers::pi * (c * c) / (2.0 * beta))))
        ++lz;
      for (double r : {-0.95, -0.5, -0.1, 0.0, 0.3, 0.75, 0.999}) {
        const double d = r * c;
        ++checked;
        if (!machine_equal(multicross_power(c, d, beta, 1), lz_survival(c, d, beta) + lz_probability(c, d, beta)))
          ++n1;
        if (!machine_equal(lz_probability(c, d, beta), lz_probability(c, -d, beta)))
          ++sym;
      }
    }
  }
  o.require(lz == 0, "classic LZ mismatches " + std::to_string(lz));
  o.require(n1 == 0, "n=1 staircase mismatches " + std::to_string(n1));
  o.require(sym == 0, "+-delta mismatches " + std::to_string(sym) + " of " + std::to_string(checked));
  return o;
}

} // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc)
      jobs = std::max(1, std::atoi(argv[++i]));
  }

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"adiabatic gain/loss", adiabatic_gain_loss},
      {"transition probability sweep", sweep_agreement},
      {"staircase plateaus", staircase_plateaus},
      {"Hermitian conservation", hermitian_conservation},
      {"spectral properties", spectral_properties},
      {"band-gap oracle", gap_oracle},
      {"two-mode oracle suite", two_mode_oracle},
      {"exact identities", exact_identities},
  };

  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
