#pragma once

// Truncated Bloch Hamiltonian of the PT-symmetric cosine/sine lattice and its
// biorthogonal band structure.
//
// In the plane-wave basis exp(i(2l + q)x), l = -L..L, the operator is the real,
// non-symmetric tridiagonal matrix
//
//   H[l][l]   = (2l + q)^2
//   H[l][l+1] = V1 + V2
//   H[l][l-1] = V1 - V2
//
// truncated with open ends in l. For |V2| < V1 it is similar to a real symmetric
// tridiagonal matrix and the spectrum is real; |V2| = V1 is the exceptional
// (critical) point and |V2| > V1 produces complex-conjugate pairs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ptlattice/errors.hpp"

namespace ptlattice {

using complex = std::complex<double>;

/// Default basis truncation: modes l = -12..12.
inline constexpr int default_truncation = 12;
/// |Im Omega| below this counts as real.
inline constexpr double reality_tolerance = 1e-9;
/// ||V2| - V1| below this counts as the critical point.
inline constexpr double critical_window = 1e-9;

struct LatticeParams {
  double v1 = 0.0;
  double v2 = 0.0;
  int truncation = default_truncation;

  [[nodiscard]] int mode_count() const { return 2 * truncation + 1; }
  [[nodiscard]] double hop_up() const { return v1 + v2; }   // couples a_l to a_{l+1}
  [[nodiscard]] double hop_down() const { return v1 - v2; } // couples a_l to a_{l-1}

  void validate() const {
    if (truncation < 4)
      throw invalid_parameter("basis truncation L must be >= 4, got " + std::to_string(truncation));
    if (!std::isfinite(v1) || !std::isfinite(v2))
      throw invalid_parameter("lattice amplitudes must be finite");
    if (v1 < 0.0)
      throw invalid_parameter("V1 must be non-negative");
  }
};

/// Plane-wave index l of basis slot i (slot 0 is l = -L).
inline int mode_index(int slot, int truncation) { return slot - truncation; }

struct TridiagonalOperator {
  Eigen::VectorXd diag;
  double super = 0.0;
  double sub = 0.0;
  int truncation = 0;
  double q = 0.0;

  [[nodiscard]] Eigen::Index size() const { return diag.size(); }

  [[nodiscard]] Eigen::MatrixXd dense() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = diag(i);
      if (i + 1 < n) {
        m(i, i + 1) = super;
        m(i + 1, i) = sub;
      }
    }
    return m;
  }

  [[nodiscard]] TridiagonalOperator transposed() const {
    TridiagonalOperator t = *this;
    std::swap(t.super, t.sub);
    return t;
  }

  /// out = H x
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& out) const {
    const Eigen::Index n = size();
    out.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      complex acc = diag(i) * x(i);
      if (i + 1 < n)
        acc += super * x(i + 1);
      if (i > 0)
        acc += sub * x(i - 1);
      out(i) = acc;
    }
  }
};

inline TridiagonalOperator build_hamiltonian(const LatticeParams& params, double q) {
  params.validate();
  if (!std::isfinite(q))
    throw invalid_parameter("Bloch momentum must be finite");
  TridiagonalOperator h;
  h.truncation = params.truncation;
  h.q = q;
  h.super = params.hop_up();
  h.sub = params.hop_down();
  h.diag.resize(params.mode_count());
  for (int i = 0; i < params.mode_count(); ++i) {
    const double k = 2.0 * mode_index(i, params.truncation) + q;
    h.diag(i) = k * k;
  }
  return h;
}

struct SymmetricTridiagonal {
  Eigen::VectorXd diag;
  double offdiag = 0.0;
};

struct Symmetrized {
  SymmetricTridiagonal matrix;
  Eigen::VectorXd gauge; // d_l, so that S = D^-1 H D
};

/// Diagonal similarity D^-1 H D with d_l = ((V1-V2)/(V1+V2))^(l/2).
/// Requires super * sub > 0, i.e. the unbroken phase.
inline Symmetrized symmetrize(const TridiagonalOperator& op) {
  const double product = op.super * op.sub;
  if (!(product > 0.0))
    throw phase_error("symmetrize requires (V1+V2)(V1-V2) > 0; use the general eigensolver");
  Symmetrized out;
  out.matrix.diag = op.diag;
  out.matrix.offdiag = std::copysign(std::sqrt(product), op.super);
  const double log_ratio = std::log(op.sub / op.super);
  out.gauge.resize(op.size());
  for (Eigen::Index i = 0; i < op.size(); ++i)
    out.gauge(i) = std::exp(0.5 * mode_index(static_cast<int>(i), op.truncation) * log_ratio);
  return out;
}

struct BandEigenpair {
  complex energy;
  Eigen::VectorXcd right; // H v = Omega v
  Eigen::VectorXcd left;  // H^T w = Omega w, w . v = norm_sign, ||w|| = ||v||
  int norm_sign = 1;
  bool degenerate = false; // on an exceptional point: vectors are not usable
};

namespace detail {

inline bool energy_less(const complex& a, const complex& b) {
  if (a.real() != b.real())
    return a.real() < b.real();
  return a.imag() < b.imag();
}

enum class SolverRoute { triangular, symmetric, general };

inline SolverRoute select_route(const TridiagonalOperator& op) {
  if (op.sub == 0.0 || op.super == 0.0)
    return SolverRoute::triangular;
  if (op.super * op.sub > 0.0)
    return SolverRoute::symmetric;
  return SolverRoute::general;
}

// Largest ratio between gauge weights. Above this the D u / D^-1 u construction
// amplifies the absolute rounding of u past what biorthogonality tests tolerate.
inline constexpr double max_gauge_spread = 1e6;

inline double gauge_spread(const TridiagonalOperator& op) {
  const double r = std::abs(std::log(std::abs(op.sub / op.super)));
  return std::exp(r * op.truncation);
}

inline std::vector<complex> sorted(std::vector<complex> values) {
  std::stable_sort(values.begin(), values.end(), energy_less);
  return values;
}

// Inverse iteration on (M - sigma I) for the eigenvector of a known eigenvalue.
inline Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXd& m, complex eigenvalue) {
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
  const complex sigma = eigenvalue + complex(64.0 * std::numeric_limits<double>::epsilon() * scale, 0.0);
  Eigen::MatrixXcd shifted = m.cast<complex>();
  shifted.diagonal().array() -= sigma;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);

  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x(i) = complex(1.0 + 0.01 * static_cast<double>(i % 7), 0.0);
  x.normalize();
  for (int iter = 0; iter < 4; ++iter) {
    x = lu.solve(x);
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm == 0.0)
      break;
    x /= norm;
  }
  return x;
}

// Rotate so that the largest-magnitude component is real and positive.
inline complex phase_fix(Eigen::VectorXcd& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (std::abs(v(arg)) == 0.0)
    return {1.0, 0.0};
  const complex phase = std::abs(v(arg)) / v(arg);
  v *= phase;
  return phase;
}

// Bilinear w . v (no conjugation).
inline complex bilinear(const Eigen::VectorXcd& w, const Eigen::VectorXcd& v) {
  return (w.array() * v.array()).sum();
}

inline constexpr double degeneracy_overlap = 1e-6;

// Scale the pair to w . v = 1 and ||v|| = ||w||; flag exceptional points.
inline void biorthonormalize(BandEigenpair& pair) {
  phase_fix(pair.right);
  const double vn = pair.right.norm();
  const double wn = pair.left.norm();
  const complex overlap = bilinear(pair.left, pair.right);
  if (!(std::abs(overlap) > degeneracy_overlap * vn * wn)) {
    pair.degenerate = true;
    pair.right /= vn;
    pair.left /= wn;
    pair.norm_sign = 1;
    return;
  }
  pair.left /= overlap;
  const double balance = std::sqrt(pair.left.norm() / pair.right.norm());
  pair.right *= balance;
  pair.left /= balance;
  pair.norm_sign = 1;
}

struct RawSpectrum {
  std::vector<complex> values;
  Eigen::MatrixXd symmetric_vectors; // filled on the symmetric route only, columns in sorted order
  SolverRoute route = SolverRoute::general;
};

inline RawSpectrum raw_spectrum(const TridiagonalOperator& op, bool want_vectors) {
  RawSpectrum out;
  out.route = select_route(op);
  const Eigen::Index n = op.size();
  switch (out.route) {
  case SolverRoute::triangular: {
    out.values.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i)
      out.values.emplace_back(op.diag(i), 0.0);
    out.values = sorted(std::move(out.values));
    break;
  }
  case SolverRoute::symmetric: {
    const Symmetrized s = symmetrize(op);
    Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, s.matrix.offdiag);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(s.matrix.diag, off,
                                  want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw error("symmetric tridiagonal eigensolver did not converge");
    // Eigen returns ascending eigenvalues.
    out.values.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i)
      out.values.emplace_back(solver.eigenvalues()(i), 0.0);
    if (want_vectors)
      out.symmetric_vectors = solver.eigenvectors();
    break;
  }
  case SolverRoute::general: {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(op.dense(), false);
    if (solver.info() != Eigen::Success)
      throw error("general eigensolver did not converge");
    out.values.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
    out.values = sorted(std::move(out.values));
    break;
  }
  }
  return out;
}

} // namespace detail

/// Eigenvalues of the truncated Hamiltonian sorted by real part, then imaginary part.
inline std::vector<complex> band_energies(const LatticeParams& params, double q) {
  return detail::raw_spectrum(build_hamiltonian(params, q), false).values;
}

/// Biorthonormal eigenpairs for the lowest `band_count` bands (all bands when omitted).
inline std::vector<BandEigenpair> eigensystem(const LatticeParams& params, double q,
                                              std::optional<int> band_count = std::nullopt) {
  const TridiagonalOperator op = build_hamiltonian(params, q);
  const int n = static_cast<int>(op.size());
  const int wanted = std::clamp(band_count.value_or(n), 0, n);

  const bool gauge_ok = detail::select_route(op) == detail::SolverRoute::symmetric &&
                        detail::gauge_spread(op) <= detail::max_gauge_spread;
  const detail::RawSpectrum raw = detail::raw_spectrum(op, gauge_ok);

  std::vector<BandEigenpair> pairs(static_cast<std::size_t>(wanted));
  if (gauge_ok) {
    const Symmetrized s = symmetrize(op);
    for (int b = 0; b < wanted; ++b) {
      const Eigen::VectorXd u = raw.symmetric_vectors.col(b);
      auto& pair = pairs[static_cast<std::size_t>(b)];
      pair.energy = raw.values[static_cast<std::size_t>(b)];
      pair.right = (s.gauge.array() * u.array()).matrix().cast<complex>();
      pair.left = (u.array() / s.gauge.array()).matrix().cast<complex>();
    }
  } else {
    const Eigen::MatrixXd dense = op.dense();
    const Eigen::MatrixXd dense_t = dense.transpose();
    for (int b = 0; b < wanted; ++b) {
      auto& pair = pairs[static_cast<std::size_t>(b)];
      pair.energy = raw.values[static_cast<std::size_t>(b)];
      pair.right = detail::inverse_iteration(dense, pair.energy);
      pair.left = detail::inverse_iteration(dense_t, pair.energy);
    }
  }
  for (auto& pair : pairs)
    detail::biorthonormalize(pair);

  // Exactly coincident eigenvalues with a shared eigenvector (Jordan block).
  for (int b = 0; b + 1 < wanted; ++b) {
    auto& a = pairs[static_cast<std::size_t>(b)];
    auto& c = pairs[static_cast<std::size_t>(b + 1)];
    if (a.energy == c.energy && !gauge_ok) {
      const double cosine = std::abs(a.right.normalized().dot(c.right.normalized()));
      if (cosine > 1.0 - 1e-8)
        a.degenerate = c.degenerate = true;
    }
  }
  return pairs;
}

struct BandStructure {
  std::vector<double> q_grid;
  std::vector<std::vector<complex>> energies; // [band][q index]
  int band_count = 0;
};

inline BandStructure band_structure(const LatticeParams& params, std::span<const double> q_grid) {
  if (q_grid.empty())
    throw invalid_parameter("q grid must be non-empty");
  params.validate();
  BandStructure out;
  out.q_grid.assign(q_grid.begin(), q_grid.end());
  out.band_count = params.mode_count();
  out.energies.assign(static_cast<std::size_t>(out.band_count), std::vector<complex>(q_grid.size()));
  for (std::size_t j = 0; j < q_grid.size(); ++j) {
    const auto values = band_energies(params, q_grid[j]);
    for (std::size_t b = 0; b < values.size(); ++b)
      out.energies[b][j] = values[b];
  }
  return out;
}

enum class PtPhase { unbroken, critical, broken };

inline std::string_view to_string(PtPhase p) {
  switch (p) {
  case PtPhase::unbroken:
    return "unbroken";
  case PtPhase::critical:
    return "critical";
  case PtPhase::broken:
    return "broken";
  }
  return "unknown";
}

struct PhaseReport {
  PtPhase phase = PtPhase::unbroken;
  double max_imag = 0.0;
};

inline PhaseReport pt_phase(const LatticeParams& params, std::span<const double> q_grid) {
  if (q_grid.empty())
    throw invalid_parameter("q grid must be non-empty");
  params.validate();
  PhaseReport report;
  for (double q : q_grid)
    for (const complex& e : band_energies(params, q))
      report.max_imag = std::max(report.max_imag, std::abs(e.imag()));

  const double excess = std::abs(params.v2) - params.v1;
  if (std::abs(excess) <= critical_window)
    report.phase = PtPhase::critical;
  else if (excess < 0.0 && report.max_imag < reality_tolerance)
    report.phase = PtPhase::unbroken;
  else
    report.phase = PtPhase::broken;
  return report;
}

} // namespace ptlattice
