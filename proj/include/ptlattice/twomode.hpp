#pragma once

// Non-symmetric two-level Landau-Zener problem
//
//   i d/dt (a1, a2) = [[ eps,          (D + d)/2 ],
//                      [ (D - d)/2,    -eps      ]] (a1, a2),   eps = -beta t / 2
//
// with D the coupling scale and d the antisymmetric (gain/loss) coupling.
// a1, a2 are diabatic amplitudes. For beta > 0 the a2 level is the lower one at
// t -> -inf and the a1 level is the lower one at t -> +inf, so starting from
// (a1, a2) = (0, 1) the late-time |a2|^2 is the transition probability P and
// |a1|^2 the survival Gamma (1 - P).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ptlattice/errors.hpp"

namespace ptlattice {

struct TwoModeParams {
  double coupling = 0.0;   // Delta = 2 V1
  double asymmetry = 0.0;  // delta = 2 V2
  double sweep_rate = 0.0; // beta = 4 alpha
  double detuning_offset = 0.0; // eps0 = 2 (1 - 2l); absorbed by the time shift

  /// Reduction of the lattice crossing between modes l and l - 1, located at q = 1 - 2l.
  static TwoModeParams from_lattice(double v1, double v2, double alpha, int l = 0) {
    return {2.0 * v1, 2.0 * v2, 4.0 * alpha, 2.0 * (1.0 - 2.0 * l)};
  }

  [[nodiscard]] double detuning(double t) const { return -0.5 * sweep_rate * t; }
};

struct TwoModeState {
  std::complex<double> a1;
  std::complex<double> a2;
  double t = 0.0;

  /// Unit amplitude in the level that is lower at early times.
  static TwoModeState lower_level(double sweep_rate, double t0) {
    if (sweep_rate >= 0.0)
      return {{0.0, 0.0}, {1.0, 0.0}, t0};
    return {{1.0, 0.0}, {0.0, 0.0}, t0};
  }

  /// Instantaneous lower eigenvector at t0, dominant (diabatic) component set to 1.
  /// Removes the O(Delta / eps) start-up transient of the bare level at finite t0.
  static TwoModeState adiabatic_lower(const TwoModeParams& p, double t0);
};

inline TwoModeState TwoModeState::adiabatic_lower(const TwoModeParams& p, double t0) {
  TwoModeState out = lower_level(p.sweep_rate, t0);
  const double eps = p.detuning(t0);
  const double up = 0.5 * (p.coupling + p.asymmetry);
  const double down = 0.5 * (p.coupling - p.asymmetry);
  const std::complex<double> root = std::sqrt(std::complex<double>(eps * eps + up * down, 0.0));
  const std::complex<double> denom = root + std::abs(eps);
  if (std::abs(denom) == 0.0)
    return out;
  if (eps >= 0.0)
    out.a1 = -up / denom;
  else
    out.a2 = -down / denom;
  return out;
}

inline std::pair<std::complex<double>, std::complex<double>> two_mode_eigenvalues(double eps, double coupling,
                                                                                    double asymmetry) {
  const double radicand = eps * eps + 0.25 * (coupling - asymmetry) * (coupling + asymmetry);
  const std::complex<double> root = std::sqrt(std::complex<double>(radicand, 0.0));
  return {root, -root};
}

/// Amplification ratio (D + d) / (D - d).
inline double gamma(double coupling, double asymmetry) {
  if (coupling == asymmetry)
    throw domain_error("gamma is singular at delta = Delta");
  return (coupling + asymmetry) / (coupling - asymmetry);
}

namespace detail {

inline void check_gapped(double coupling, double asymmetry, double sweep_rate) {
  if (sweep_rate == 0.0 || !std::isfinite(sweep_rate))
    throw domain_error("sweep rate beta must be non-zero and finite");
  if (!(std::abs(asymmetry) < coupling))
    throw domain_error("closed-form transition probabilities need |delta| < Delta");
}

// -pi (D^2 - d^2) / (2 |beta|)
inline double lz_exponent(double coupling, double asymmetry, double sweep_rate) {
  // fma keeps delta^2 exact so that P(delta) == P(-delta) bit for bit
  const double gap2 = std::fma(coupling, coupling, -(asymmetry * asymmetry));
  return -std::numbers::pi * gap2 / (2.0 * std::abs(sweep_rate));
}

} // namespace detail

/// P = exp[-pi (D^2 - d^2) / (2 |beta|)]
inline double lz_probability(double coupling, double asymmetry, double sweep_rate) {
  detail::check_gapped(coupling, asymmetry, sweep_rate);
  return std::exp(detail::lz_exponent(coupling, asymmetry, sweep_rate));
}

/// Gamma (1 - P)
inline double lz_survival(double coupling, double asymmetry, double sweep_rate) {
  detail::check_gapped(coupling, asymmetry, sweep_rate);
  return gamma(coupling, asymmetry) * -std::expm1(detail::lz_exponent(coupling, asymmetry, sweep_rate));
}

/// Lambda = 2 pi D^2 / |beta|, the survival in the limit d -> D.
inline double critical_lambda(double coupling, double sweep_rate) {
  if (sweep_rate == 0.0)
    throw domain_error("critical_lambda is singular at beta = 0");
  return 2.0 * std::numbers::pi * coupling * coupling / std::abs(sweep_rate);
}

/// Late-time (|a1|^2, |a2|^2) in the limit d -> -D: full transfer, no survival.
inline constexpr std::pair<double, double> anti_critical_limit() { return {0.0, 1.0}; }

/// Power after n crossings: (Gamma(1-P))^n + P sum_{i<n} (Gamma(1-P))^i.
inline double multicross_power(double coupling, double asymmetry, double sweep_rate, int n) {
  if (n < 0)
    throw domain_error("crossing count must be non-negative");
  const double p = lz_probability(coupling, asymmetry, sweep_rate);
  const double survival = lz_survival(coupling, asymmetry, sweep_rate);
  double head = 1.0;
  double tail = 0.0;
  for (int i = 0; i < n; ++i) {
    tail += head;
    head *= survival;
  }
  return head + p * tail;
}

/// Power after n lattice crossings for a drive of either sign. A negative sweep
/// rate is the delta -> -delta problem; |delta| = Delta uses the critical limits.
inline double staircase_power(double coupling, double asymmetry, double sweep_rate, int n) {
  if (sweep_rate == 0.0)
    throw domain_error("sweep rate beta must be non-zero");
  if (n < 0)
    throw domain_error("crossing count must be non-negative");
  const double effective = sweep_rate < 0.0 ? -asymmetry : asymmetry;
  if (std::abs(effective) < coupling)
    return multicross_power(coupling, effective, sweep_rate, n);
  if (effective < 0.0)
    return anti_critical_limit().second;
  if (effective > coupling)
    throw domain_error("staircase power is undefined in the broken phase |delta| > Delta");
  const double lambda = critical_lambda(coupling, sweep_rate);
  double sum = 0.0;
  double term = 1.0;
  for (int i = 0; i <= n; ++i) {
    sum += term;
    term *= lambda;
  }
  return sum;
}

struct TwoModeSample {
  double t = 0.0;
  std::complex<double> a1;
  std::complex<double> a2;

  [[nodiscard]] double power() const { return std::norm(a1) + std::norm(a2); }
};

struct TwoModeConfig {
  double dt = 0.0; // <= 0: 0.01 / max(1, max |eps|)
  int target_samples = 4000;
  bool check_convergence = false;
};

inline constexpr double two_mode_halving_tolerance = 1e-6;

struct TwoModeTrace {
  std::vector<TwoModeSample> samples;
  double dt = 0.0;
  std::optional<double> halving_difference;
  std::vector<std::string> warnings;
};

namespace detail {

struct TwoModeRun {
  std::vector<TwoModeSample> samples;
  std::complex<double> a1, a2;
  double dt = 0.0;
};

inline TwoModeRun integrate_two_mode(const TwoModeParams& p, double t0, double t1, const TwoModeState& init,
                                     double dt_request, std::size_t stride) {
  const double span = t1 - t0;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_request - 1e-9)));
  const double h = span / static_cast<double>(steps);
  const std::complex<double> up{0.5 * (p.coupling + p.asymmetry), 0.0};
  const std::complex<double> down{0.5 * (p.coupling - p.asymmetry), 0.0};
  constexpr std::complex<double> minus_i{0.0, -1.0};

  auto f = [&](double t, std::complex<double> x1, std::complex<double> x2) {
    const double eps = p.detuning(t);
    return std::pair{minus_i * (eps * x1 + up * x2), minus_i * (down * x1 - eps * x2)};
  };

  TwoModeRun run;
  run.dt = h;
  std::complex<double> a1 = init.a1;
  std::complex<double> a2 = init.a2;
  if (stride > 0)
    run.samples.push_back({t0, a1, a2});
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = t0 + h * static_cast<double>(n);
    const auto [k1a, k1b] = f(t, a1, a2);
    const auto [k2a, k2b] = f(t + 0.5 * h, a1 + 0.5 * h * k1a, a2 + 0.5 * h * k1b);
    const auto [k3a, k3b] = f(t + 0.5 * h, a1 + 0.5 * h * k2a, a2 + 0.5 * h * k2b);
    const auto [k4a, k4b] = f(t + h, a1 + h * k3a, a2 + h * k3b);
    a1 += (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    a2 += (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    const std::size_t done = n + 1;
    if (stride > 0 && (done % stride == 0 || done == steps))
      run.samples.push_back({done == steps ? t1 : t0 + h * static_cast<double>(done), a1, a2});
  }
  run.a1 = a1;
  run.a2 = a2;
  return run;
}

} // namespace detail

/// RK4 integration of the two-level problem from initial.t to t_end.
inline TwoModeTrace evolve_two_mode(const TwoModeParams& p, double t_end, const TwoModeState& initial,
                                    const TwoModeConfig& cfg = {}) {
  if (!std::isfinite(t_end) || !std::isfinite(initial.t) || !(t_end > initial.t))
    throw invalid_parameter("two-mode time span must be finite and ordered");
  const double max_eps = std::max(std::abs(p.detuning(initial.t)), std::abs(p.detuning(t_end)));
  const double dt = cfg.dt > 0.0 ? cfg.dt : 0.01 / std::max(1.0, max_eps);
  const double steps = std::ceil((t_end - initial.t) / dt);
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::floor(steps / std::max(1, cfg.target_samples))));

  detail::TwoModeRun run = detail::integrate_two_mode(p, initial.t, t_end, initial, dt, stride);
  TwoModeTrace trace;
  trace.samples = std::move(run.samples);
  trace.dt = run.dt;
  if (cfg.check_convergence) {
    const detail::TwoModeRun fine = detail::integrate_two_mode(p, initial.t, t_end, initial, 0.5 * run.dt, 0);
    const double diff = std::hypot(std::abs(fine.a1 - run.a1), std::abs(fine.a2 - run.a2));
    trace.halving_difference = diff;
    const double power_diff =
        std::abs((std::norm(fine.a1) + std::norm(fine.a2)) - (std::norm(run.a1) + std::norm(run.a2)));
    if (!(power_diff <= two_mode_halving_tolerance))
      trace.warnings.push_back("two-mode step halving changed the final power by " + std::to_string(power_diff));
  }
  return trace;
}

/// Default half-width of the integration window: max(300, 20 / sqrt|beta|).
inline double default_half_span(double sweep_rate) {
  return std::max(300.0, 20.0 / std::sqrt(std::abs(sweep_rate)));
}

struct TwoModeAsymptotics {
  double a1 = 0.0; // late-time |a1|^2
  double a2 = 0.0; // late-time |a2|^2
  double power = 0.0;
  double half_span = 0.0;
};

/// Mean |a1|^2, |a2|^2 over the samples in the last `fraction` of the run.
inline TwoModeAsymptotics late_time_average(const TwoModeTrace& trace, double fraction = 0.05) {
  if (trace.samples.empty())
    throw invalid_parameter("empty two-mode trace");
  const double t0 = trace.samples.front().t;
  const double t1 = trace.samples.back().t;
  const double t_cut = t1 - fraction * (t1 - t0);
  TwoModeAsymptotics out;
  out.half_span = 0.5 * (t1 - t0);
  std::size_t count = 0;
  for (const auto& s : trace.samples) {
    if (s.t < t_cut)
      continue;
    out.a1 += std::norm(s.a1);
    out.a2 += std::norm(s.a2);
    ++count;
  }
  out.a1 /= static_cast<double>(count);
  out.a2 /= static_cast<double>(count);
  out.power = out.a1 + out.a2;
  return out;
}

/// Late-time intensities from a run over [-T, T] started in the early lower adiabatic level,
/// averaged over the final 5% of samples.
inline TwoModeAsymptotics two_mode_asymptotics(const TwoModeParams& p, std::optional<double> half_span = {},
                                               const TwoModeConfig& cfg = {}) {
  if (p.sweep_rate == 0.0)
    throw domain_error("sweep rate beta must be non-zero");
  const double T = half_span.value_or(default_half_span(p.sweep_rate));
  const TwoModeTrace trace = evolve_two_mode(p, T, TwoModeState::adiabatic_lower(p, -T), cfg);
  TwoModeAsymptotics out = late_time_average(trace);
  out.half_span = T;
  return out;
}

/// Closed-form late-time (|a1|^2, |a2|^2) for a start in the early lower level.
/// For beta < 0 the roles of a1 and a2 swap and delta enters with opposite sign.
/// Empty in the broken phase |delta| > Delta.
inline std::optional<std::pair<double, double>> analytic_asymptotics(const TwoModeParams& p) {
  if (p.sweep_rate == 0.0)
    throw domain_error("sweep rate beta must be non-zero");
  const double effective = p.sweep_rate < 0.0 ? -p.asymmetry : p.asymmetry;
  double stay = 0.0;   // early lower level, diabatic passage
  double switched = 0.0;
  if (std::abs(effective) < p.coupling) {
    stay = lz_probability(p.coupling, effective, p.sweep_rate);
    switched = lz_survival(p.coupling, effective, p.sweep_rate);
  } else if (effective == p.coupling) {
    stay = 1.0;
    switched = critical_lambda(p.coupling, p.sweep_rate);
  } else if (effective == -p.coupling) {
    std::tie(switched, stay) = anti_critical_limit();
  } else {
    return std::nullopt;
  }
  if (p.sweep_rate > 0.0)
    return std::pair{switched, stay};
  return std::pair{stay, switched};
}

} // namespace ptlattice
