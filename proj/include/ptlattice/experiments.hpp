#pragma once

// Experiment drivers behind the ptlattice command line: each turns an
// ExperimentConfig into a ResultTable plus a chart of the same data.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptlattice/config.hpp"
#include "ptlattice/dynamics.hpp"
#include "ptlattice/lattice.hpp"
#include "ptlattice/result_table.hpp"
#include "ptlattice/svg.hpp"
#include "ptlattice/twomode.hpp"

namespace ptlattice {

struct ExperimentOutput {
  ResultTable table;
  svg::Chart chart;

  [[nodiscard]] bool has_warnings() const {
    return table.metadata.contains("warnings") && !table.metadata["warnings"].empty();
  }
};

namespace detail {

inline ResultTable make_table(const ExperimentConfig& cfg, std::vector<std::string> columns) {
  ResultTable t;
  t.columns = std::move(columns);
  t.metadata["version"] = version_string;
  t.metadata["config"] = to_json(cfg);
  t.metadata["warnings"] = nlohmann::json::array();
  return t;
}

inline nlohmann::json nan_to_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

// Run fn(i) for i in [0, n) on `jobs` workers. Results are placed by index, so
// the output order does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < n; i = next++)
            fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          next = n;
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace detail

inline ExperimentOutput run_bands(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  out.table = detail::make_table(cfg, {"q", "band", "re_omega", "im_omega"});
  const std::vector<double> grid = cfg.q_grid.values();
  const BandStructure bands = band_structure(cfg.lattice, grid);
  const PhaseReport phase = pt_phase(cfg.lattice, grid);

  for (std::size_t j = 0; j < grid.size(); ++j)
    for (int b = 0; b < cfg.band_count; ++b) {
      const complex e = bands.energies[static_cast<std::size_t>(b)][j];
      out.table.add_row({grid[j], static_cast<double>(b + 1), e.real(), e.imag()});
    }

  double min_gap = std::numeric_limits<double>::infinity();
  double min_gap_q = grid.front();
  if (bands.band_count >= 2) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double gap = std::abs(bands.energies[1][j] - bands.energies[0][j]);
      if (gap < min_gap) {
        min_gap = gap;
        min_gap_q = grid[j];
      }
    }
  }
  out.table.metadata["pt_phase"] = std::string(to_string(phase.phase));
  out.table.metadata["max_abs_imag"] = phase.max_imag;
  out.table.metadata["min_gap_12"] = {{"gap", min_gap}, {"q", min_gap_q}};

  out.chart.title = "Band structure V1=" + svg::detail::fmt(cfg.lattice.v1) + " V2=" + svg::detail::fmt(cfg.lattice.v2);
  out.chart.x_label = "q (units of k)";
  out.chart.y_label = "Omega = E / E_k";
  for (int b = 0; b < cfg.band_count; ++b) {
    svg::Series s;
    s.label = "band " + std::to_string(b + 1);
    s.color = svg::palette()[static_cast<std::size_t>(b) % svg::palette().size()];
    s.x = grid;
    for (std::size_t j = 0; j < grid.size(); ++j)
      s.y.push_back(bands.energies[static_cast<std::size_t>(b)][j].real());
    out.chart.series.push_back(std::move(s));
  }
  return out;
}

namespace detail {

inline nlohmann::json halving_json(const EvolutionTrace& trace) {
  nlohmann::json j = nlohmann::json::object();
  if (trace.halving_state_difference)
    j["state_difference"] = *trace.halving_state_difference;
  if (trace.halving_power_difference)
    j["power_difference"] = *trace.halving_power_difference;
  return j;
}

inline EvolutionTrace run_lattice_trace(const ExperimentConfig& cfg) {
  const ModeVector start = prepare_band_state(cfg.lattice, cfg.drive.q_ini, cfg.initial_band);
  return evolve(start, cfg.lattice, cfg.drive, cfg.integrator);
}

// Two-mode estimate of the power after n crossings, or null outside its domain.
inline nlohmann::json staircase_prediction(const ExperimentConfig& cfg, int n) {
  try {
    return staircase_power(2.0 * cfg.lattice.v1, 2.0 * cfg.lattice.v2, 4.0 * cfg.drive.alpha, n);
  } catch (const domain_error&) {
    return nullptr;
  }
}

} // namespace detail

inline ExperimentOutput run_evolve(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  out.table = detail::make_table(cfg, {"z", "q", "rho", "p1", "p2"});
  const EvolutionTrace trace = detail::run_lattice_trace(cfg);
  for (const auto& s : trace.samples)
    out.table.add_row({s.z, s.q, s.power, s.band1, s.band2});

  const int crossings = crossings_between(cfg.drive.q_ini, cfg.drive.q_fin);
  out.table.metadata["final_power"] = power(trace.final_state);
  out.table.metadata["dz"] = trace.dz;
  out.table.metadata["steps"] = trace.steps;
  out.table.metadata["crossings"] = crossings;
  out.table.metadata["two_mode_power"] =
      cfg.initial_band == 1 ? detail::staircase_prediction(cfg, crossings) : nlohmann::json();
  out.table.metadata["step_halving"] = detail::halving_json(trace);
  for (const auto& w : trace.warnings)
    out.table.metadata["warnings"].push_back(w);

  out.chart.title = "Power vs z, alpha=" + svg::detail::fmt(cfg.drive.alpha) + " V2=" + svg::detail::fmt(cfg.lattice.v2);
  out.chart.x_label = "z";
  out.chart.y_label = "rho";
  svg::Series s;
  s.label = "rho";
  s.dashed = cfg.drive.alpha < 0.0;
  for (const auto& smp : trace.samples) {
    s.x.push_back(smp.z);
    s.y.push_back(smp.power);
  }
  out.chart.series.push_back(std::move(s));
  return out;
}

inline ExperimentOutput run_sweep(const ExperimentConfig& cfg, int jobs = 1) {
  ExperimentOutput out;
  out.table = detail::make_table(cfg, {"alpha", "p_numeric", "p_analytic", "abs_diff"});
  const std::vector<double> alphas = cfg.alpha_grid.values();
  std::vector<TransitionResult> results(alphas.size());
  detail::parallel_for(alphas.size(), jobs, [&](std::size_t i) {
    const DriveParams drive{alphas[i], cfg.drive.q_ini, cfg.drive.q_fin};
    results[i] = transition_probability(cfg.lattice, drive, cfg.integrator);
  });

  std::vector<double> analytic(alphas.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    try {
      analytic[i] = lz_probability(2.0 * cfg.lattice.v1, 2.0 * cfg.lattice.v2, 4.0 * alphas[i]);
    } catch (const domain_error&) {
    }
    const double p = results[i].probability;
    out.table.add_row({alphas[i], p, analytic[i], std::abs(p - analytic[i])});
    for (const auto& w : results[i].warnings)
      out.table.metadata["warnings"].push_back("alpha=" + format_number(alphas[i]) + ": " + w);
  }

  out.chart.title = "Transition probability, V2=" + svg::detail::fmt(cfg.lattice.v2);
  out.chart.x_label = "alpha";
  out.chart.y_label = "P";
  out.chart.log_x = true;
  out.chart.y_min = 0.0;
  out.chart.y_max = 1.0;
  svg::Series num{"simulation", alphas, {}, svg::palette()[0]};
  num.markers = true;
  for (const auto& r : results)
    num.y.push_back(r.probability);
  svg::Series ana{"two-mode formula", alphas, analytic, svg::palette()[1]};
  ana.dashed = true;
  out.chart.series.push_back(std::move(num));
  out.chart.series.push_back(std::move(ana));
  return out;
}

inline ExperimentOutput run_multicross(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  out.table = detail::make_table(cfg, {"z", "q", "rho"});
  const EvolutionTrace trace = detail::run_lattice_trace(cfg);
  for (const auto& s : trace.samples)
    out.table.add_row({s.z, s.q, s.power});

  const int crossings = crossings_between(cfg.drive.q_ini, cfg.drive.q_fin);
  nlohmann::json predictions = nlohmann::json::array();
  for (int n = 0; n <= crossings; ++n)
    predictions.push_back(detail::staircase_prediction(cfg, n));
  nlohmann::json plateaus = nlohmann::json::array();
  for (const auto& p : plateau_averages(trace, cfg.drive.q_ini))
    plateaus.push_back({{"crossings", p.crossings},
                        {"q_begin", p.q_begin},
                        {"q_end", p.q_end},
                        {"mean_power", p.mean_power},
                        {"samples", p.sample_count},
                        {"two_mode_power", predictions.at(static_cast<std::size_t>(p.crossings))}});
  out.table.metadata["plateaus"] = plateaus;
  out.table.metadata["two_mode_power"] = predictions;
  out.table.metadata["final_power"] = power(trace.final_state);
  out.table.metadata["dz"] = trace.dz;
  out.table.metadata["steps"] = trace.steps;
  out.table.metadata["step_halving"] = detail::halving_json(trace);
  for (const auto& w : trace.warnings)
    out.table.metadata["warnings"].push_back(w);

  out.chart.title = "Power staircase, alpha=" + svg::detail::fmt(cfg.drive.alpha) + " V2=" +
                    svg::detail::fmt(cfg.lattice.v2);
  out.chart.x_label = "z";
  out.chart.y_label = "rho";
  svg::Series s;
  s.label = "rho";
  for (const auto& smp : trace.samples) {
    s.x.push_back(smp.z);
    s.y.push_back(smp.power);
  }
  const double z_end = trace.samples.back().z;
  out.chart.series.push_back(std::move(s));
  for (std::size_t n = 1; n < predictions.size(); ++n) {
    if (predictions[n].is_null())
      continue;
    const double v = predictions[n].get<double>();
    svg::Series level{n == 1 ? "two-mode plateaus" : "", {0.0, z_end}, {v, v}, svg::palette()[1]};
    level.dashed = true;
    level.width = 1.0;
    out.chart.series.push_back(std::move(level));
  }
  return out;
}

inline ExperimentOutput run_twomode(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  out.table = detail::make_table(cfg, {"t", "a1_sq", "a2_sq", "rho"});
  const TwoModeParams& p = cfg.twomode.params;
  const double T = cfg.twomode.half_span > 0.0 ? cfg.twomode.half_span : default_half_span(p.sweep_rate);
  TwoModeConfig tcfg;
  tcfg.dt = cfg.twomode.dt;
  tcfg.check_convergence = true;
  const TwoModeTrace trace = evolve_two_mode(p, T, TwoModeState::adiabatic_lower(p, -T), tcfg);
  for (const auto& s : trace.samples)
    out.table.add_row({s.t, std::norm(s.a1), std::norm(s.a2), s.power()});

  const TwoModeAsymptotics late = late_time_average(trace);
  out.table.metadata["numeric_asymptotes"] = {{"a1_sq", late.a1}, {"a2_sq", late.a2}, {"rho", late.power}};
  const auto analytic = analytic_asymptotics(p);
  out.table.metadata["analytic_asymptotes"] =
      analytic ? nlohmann::json{{"a1_sq", analytic->first},
                                {"a2_sq", analytic->second},
                                {"rho", analytic->first + analytic->second}}
               : nlohmann::json();
  if (trace.halving_difference)
    out.table.metadata["step_halving"] = {{"state_difference", *trace.halving_difference}};
  for (const auto& w : trace.warnings)
    out.table.metadata["warnings"].push_back(w);

  out.chart.title = "Two-mode sweep, Delta=" + svg::detail::fmt(p.coupling) + " delta=" +
                    svg::detail::fmt(p.asymmetry) + " beta=" + svg::detail::fmt(p.sweep_rate);
  out.chart.x_label = "t";
  out.chart.y_label = "intensity";
  svg::Series s1{"|a1|^2", {}, {}, svg::palette()[0]};
  svg::Series s2{"|a2|^2", {}, {}, svg::palette()[1]};
  for (const auto& s : trace.samples) {
    s1.x.push_back(s.t);
    s1.y.push_back(std::norm(s.a1));
    s2.x.push_back(s.t);
    s2.y.push_back(std::norm(s.a2));
  }
  out.chart.series.push_back(std::move(s1));
  out.chart.series.push_back(std::move(s2));
  if (analytic) {
    for (double v : {analytic->first, analytic->second}) {
      svg::Series level{"", {-T, T}, {v, v}, "#555555"};
      level.dashed = true;
      level.width = 1.0;
      out.chart.series.push_back(std::move(level));
    }
  }
  return out;
}

inline ExperimentOutput run_experiment(const ExperimentConfig& cfg, int jobs = 1) {
  switch (cfg.kind) {
  case ExperimentKind::bands:
    return run_bands(cfg);
  case ExperimentKind::evolve:
    return run_evolve(cfg);
  case ExperimentKind::sweep:
    return run_sweep(cfg, jobs);
  case ExperimentKind::multicross:
    return run_multicross(cfg);
  case ExperimentKind::twomode:
    return run_twomode(cfg);
  }
  throw config_error("unknown experiment kind");
}

} // namespace ptlattice
