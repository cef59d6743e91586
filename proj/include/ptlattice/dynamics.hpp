#pragma once

// Driven mode dynamics  i da_l/dz = (2l + q(z))^2 a_l + (V1+V2) a_{l+1} + (V1-V2) a_{l-1}
// with q(z) = q_ini + alpha z, integrated with fixed-step classical RK4 in the
// laboratory-frame plane-wave basis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptlattice/errors.hpp"
#include "ptlattice/lattice.hpp"

namespace ptlattice {

struct ModeVector {
  Eigen::VectorXcd a; // slot i holds l = i - L
  double q_ref = 0.0;

  [[nodiscard]] int truncation() const { return static_cast<int>((a.size() - 1) / 2); }
  [[nodiscard]] complex& at_mode(int l) { return a(l + truncation()); }
  [[nodiscard]] const complex& at_mode(int l) const { return a(l + truncation()); }
};

inline double power(const ModeVector& state) { return state.a.squaredNorm(); }

struct DriveParams {
  double alpha = 0.0;
  double q_ini = 0.0;
  double q_fin = 0.0;

  [[nodiscard]] double q_at(double z) const { return q_ini + alpha * z; }
  [[nodiscard]] double z_end() const { return (q_fin - q_ini) / alpha; }
  [[nodiscard]] double q_max() const { return std::max(std::abs(q_ini), std::abs(q_fin)); }

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(q_ini) || !std::isfinite(q_fin))
      throw invalid_parameter("drive parameters must be finite");
    if (alpha == 0.0)
      throw invalid_parameter("drive rate alpha must be non-zero");
    if (!((q_fin - q_ini) / alpha > 0.0))
      throw invalid_parameter("q_fin - q_ini must have the sign of alpha");
  }
};

struct IntegratorConfig {
  double dz = 0.0;        // <= 0 selects default_step()
  int sample_stride = 0;  // <= 0 selects roughly target_samples samples
  int target_samples = 2000;
  bool check_convergence = false;
  bool record_projections = true;
};

/// Accuracy threshold on |rho(dz) - rho(dz/2)| used by the step-halving check.
inline constexpr double halving_power_tolerance = 1e-6;

/// 0.01 / max(1, q_max^2), capped so that dz * (2L + q_max)^2 <= 2 keeps the
/// highest basis mode inside the RK4 stability interval.
inline double default_step(const LatticeParams& params, const DriveParams& drive) {
  const double qmax = drive.q_max();
  const double top = 2.0 * params.truncation + qmax;
  return std::min(0.01 / std::max(1.0, qmax * qmax), 2.0 / (top * top));
}

struct EvolutionSample {
  double z = 0.0;
  double q = 0.0;
  double power = 0.0;
  double band1 = std::numeric_limits<double>::quiet_NaN(); // |c_1|^2 at q
  double band2 = std::numeric_limits<double>::quiet_NaN(); // |c_2|^2 at q
};

struct EvolutionTrace {
  std::vector<EvolutionSample> samples;
  ModeVector final_state;
  double dz = 0.0;
  std::size_t steps = 0;
  std::optional<double> halving_state_difference;
  std::optional<double> halving_power_difference;
  std::vector<std::string> warnings;
};

struct BandProjection {
  complex amplitude;
  double probability = 0.0;
};

/// Normalized right eigenvector of band `band` (1 = lowest) at momentum q.
inline ModeVector prepare_band_state(const LatticeParams& params, double q, int band) {
  if (band < 1 || band > params.mode_count())
    throw invalid_parameter("band index out of range: " + std::to_string(band));
  const auto pairs = eigensystem(params, q, band);
  const BandEigenpair& pair = pairs.back();
  if (pair.degenerate)
    throw degenerate_state("band " + std::to_string(band) + " is degenerate at q = " + std::to_string(q));
  ModeVector out;
  out.q_ref = q;
  out.a = pair.right / pair.right.norm();
  return out;
}

namespace detail {

// Amplitude of the unit-power band mode v/|v| in the biorthogonal expansion of a.
inline BandProjection project(const BandEigenpair& pair, const Eigen::VectorXcd& a) {
  const complex c = pair.right.norm() * bilinear(pair.left, a) * static_cast<double>(pair.norm_sign);
  return {c, std::norm(c)};
}

} // namespace detail

inline BandProjection project_onto_band(const ModeVector& state, const LatticeParams& params, double q,
                                        int band) {
  if (state.a.size() != params.mode_count())
    throw invalid_parameter("state size does not match lattice truncation");
  if (band < 1 || band > params.mode_count())
    throw invalid_parameter("band index out of range: " + std::to_string(band));
  const auto pairs = eigensystem(params, q, band);
  const BandEigenpair& pair = pairs.back();
  if (pair.degenerate)
    throw degenerate_state("band " + std::to_string(band) + " is degenerate at q = " + std::to_string(q));
  return detail::project(pair, state.a);
}

/// Right-hand side of the mode equations at propagation distance z.
inline void rhs(const LatticeParams& params, const DriveParams& drive, double z, const Eigen::VectorXcd& a,
                Eigen::VectorXcd& out) {
  const double q = drive.q_at(z);
  const double up = params.hop_up();
  const double down = params.hop_down();
  const Eigen::Index n = a.size();
  const int L = static_cast<int>((n - 1) / 2);
  out.resize(n);
  constexpr complex minus_i{0.0, -1.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = 2.0 * (static_cast<int>(i) - L) + q;
    complex acc = k * k * a(i);
    if (i + 1 < n)
      acc += up * a(i + 1);
    if (i > 0)
      acc += down * a(i - 1);
    out(i) = minus_i * acc;
  }
}

inline Eigen::VectorXcd rhs(const LatticeParams& params, const DriveParams& drive, double z,
                            const ModeVector& state) {
  Eigen::VectorXcd out;
  rhs(params, drive, z, state.a, out);
  return out;
}

namespace detail {

struct Rk4Workspace {
  Eigen::VectorXcd k1, k2, k3, k4, tmp;
};

inline void rk4_step(const LatticeParams& params, const DriveParams& drive, double z, double h,
                     Eigen::VectorXcd& a, Rk4Workspace& w) {
  rhs(params, drive, z, a, w.k1);
  w.tmp = a + (0.5 * h) * w.k1;
  rhs(params, drive, z + 0.5 * h, w.tmp, w.k2);
  w.tmp = a + (0.5 * h) * w.k2;
  rhs(params, drive, z + 0.5 * h, w.tmp, w.k3);
  w.tmp = a + h * w.k3;
  rhs(params, drive, z + h, w.tmp, w.k4);
  a += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

inline EvolutionSample make_sample(const LatticeParams& params, double z, double q, const Eigen::VectorXcd& a,
                                   bool projections) {
  EvolutionSample s;
  s.z = z;
  s.q = q;
  s.power = a.squaredNorm();
  if (projections) {
    const auto pairs = eigensystem(params, q, 2);
    if (!pairs[0].degenerate)
      s.band1 = project(pairs[0], a).probability;
    if (pairs.size() > 1 && !pairs[1].degenerate)
      s.band2 = project(pairs[1], a).probability;
  }
  return s;
}

struct RawRun {
  Eigen::VectorXcd final_state;
  std::vector<EvolutionSample> samples;
  std::size_t steps = 0;
  double dz = 0.0;
};

inline RawRun integrate(const ModeVector& initial, const LatticeParams& params, const DriveParams& drive,
                        double dz_request, int stride, bool sampled, bool projections) {
  const double z_end = drive.z_end();
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(z_end / dz_request - 1e-9)));
  const double h = z_end / static_cast<double>(steps);

  RawRun run;
  run.steps = steps;
  run.dz = h;
  Eigen::VectorXcd a = initial.a;
  Rk4Workspace work;
  if (sampled)
    run.samples.push_back(make_sample(params, 0.0, drive.q_at(0.0), a, projections));
  for (std::size_t n = 0; n < steps; ++n) {
    const double z = h * static_cast<double>(n);
    rk4_step(params, drive, z, h, a, work);
    const std::size_t done = n + 1;
    if (sampled && (done % static_cast<std::size_t>(stride) == 0 || done == steps)) {
      const double z_now = done == steps ? z_end : h * static_cast<double>(done);
      const double q_now = done == steps ? drive.q_fin : drive.q_at(z_now);
      run.samples.push_back(make_sample(params, z_now, q_now, a, projections));
    }
  }
  run.final_state = std::move(a);
  return run;
}

} // namespace detail

inline EvolutionTrace evolve(const ModeVector& state, const LatticeParams& params, const DriveParams& drive,
                             const IntegratorConfig& cfg = {}) {
  params.validate();
  drive.validate();
  if (state.a.size() != params.mode_count())
    throw invalid_parameter("state size does not match lattice truncation");
  if (!state.a.allFinite())
    throw invalid_parameter("state amplitudes must be finite");

  const double dz = cfg.dz > 0.0 ? cfg.dz : default_step(params, drive);
  const double z_end = drive.z_end();
  int stride = cfg.sample_stride;
  if (stride <= 0) {
    const double steps = std::ceil(z_end / dz);
    stride = static_cast<int>(std::max(1.0, std::floor(steps / std::max(1, cfg.target_samples))));
  }

  detail::RawRun run = detail::integrate(state, params, drive, dz, stride, true, cfg.record_projections);

  EvolutionTrace trace;
  trace.samples = std::move(run.samples);
  trace.final_state.a = std::move(run.final_state);
  trace.final_state.q_ref = drive.q_fin;
  trace.dz = run.dz;
  trace.steps = run.steps;

  if (cfg.check_convergence) {
    const detail::RawRun fine = detail::integrate(state, params, drive, 0.5 * run.dz, 1, false, false);
    const double state_diff = (fine.final_state - trace.final_state.a).norm();
    const double power_diff = std::abs(fine.final_state.squaredNorm() - power(trace.final_state));
    trace.halving_state_difference = state_diff;
    trace.halving_power_difference = power_diff;
    if (!(power_diff <= halving_power_tolerance))
      trace.warnings.push_back("step halving changed the final power by " + std::to_string(power_diff) +
                               " (dz = " + std::to_string(run.dz) + ")");
  }
  return trace;
}

/// Number of Bragg points (odd integers) strictly between q_a and q_b.
inline int crossings_between(double q_a, double q_b) {
  const double lo = std::min(q_a, q_b);
  const double hi = std::max(q_a, q_b);
  // odd m with lo < m < hi, m = 2j + 1
  const double j_lo = std::floor((lo - 1.0) / 2.0) + 1.0;
  const double j_hi = std::ceil((hi - 1.0) / 2.0) - 1.0;
  return static_cast<int>(std::max(0.0, j_hi - j_lo + 1.0));
}

struct TransitionResult {
  double probability = 0.0;
  double final_power = 0.0;
  std::vector<std::string> warnings;
};

/// Band-2 occupation after sweeping band 1 once through a Bragg point.
inline TransitionResult transition_probability(const LatticeParams& params, const DriveParams& drive,
                                               IntegratorConfig cfg = {}) {
  drive.validate();
  if (crossings_between(drive.q_ini, drive.q_fin) != 1)
    throw invalid_parameter("transition_probability needs exactly one Bragg point between q_ini and q_fin");
  const ModeVector start = prepare_band_state(params, drive.q_ini, 1);
  cfg.record_projections = false;
  const EvolutionTrace trace = evolve(start, params, drive, cfg);
  TransitionResult out;
  out.probability = project_onto_band(trace.final_state, params, drive.q_fin, 2).probability;
  out.final_power = power(trace.final_state);
  out.warnings = trace.warnings;
  return out;
}

struct Plateau {
  int crossings = 0; // Bragg points passed before this plateau
  double q_begin = 0.0;
  double q_end = 0.0;
  double mean_power = 0.0;
  std::size_t sample_count = 0;
};

/// Distance from q to the nearest odd integer.
inline double bragg_distance(double q) {
  return std::abs(q - (2.0 * std::round((q - 1.0) / 2.0) + 1.0));
}

/// Mean power over each window with |q - nearest odd integer| > 0.5, grouped by
/// the number of Bragg points already passed.
inline std::vector<Plateau> plateau_averages(const EvolutionTrace& trace, double q_ini) {
  std::vector<Plateau> out;
  for (const auto& s : trace.samples) {
    if (bragg_distance(s.q) <= 0.5)
      continue;
    const int passed = crossings_between(q_ini, s.q);
    if (out.empty() || out.back().crossings != passed) {
      Plateau p;
      p.crossings = passed;
      p.q_begin = s.q;
      out.push_back(p);
    }
    Plateau& p = out.back();
    p.q_end = s.q;
    p.mean_power += s.power;
    ++p.sample_count;
  }
  for (auto& p : out)
    p.mean_power /= static_cast<double>(p.sample_count);
  return out;
}

} // namespace ptlattice
