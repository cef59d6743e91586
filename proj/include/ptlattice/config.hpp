#pragma once

// JSON experiment configuration. Unknown fields are rejected; every resolved
// default is written back by to_json() so outputs carry the full configuration.

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptlattice/dynamics.hpp"
#include "ptlattice/errors.hpp"
#include "ptlattice/lattice.hpp"
#include "ptlattice/twomode.hpp"

namespace ptlattice {

class config_error : public error {
public:
  using error::error;
};

enum class ExperimentKind { bands, evolve, sweep, multicross, twomode };

inline std::string_view to_string(ExperimentKind k) {
  switch (k) {
  case ExperimentKind::bands:
    return "bands";
  case ExperimentKind::evolve:
    return "evolve";
  case ExperimentKind::sweep:
    return "sweep";
  case ExperimentKind::multicross:
    return "multicross";
  case ExperimentKind::twomode:
    return "twomode";
  }
  return "unknown";
}

inline ExperimentKind parse_kind(std::string_view s) {
  if (s == "bands")
    return ExperimentKind::bands;
  if (s == "evolve")
    return ExperimentKind::evolve;
  if (s == "sweep")
    return ExperimentKind::sweep;
  if (s == "multicross")
    return ExperimentKind::multicross;
  if (s == "twomode")
    return ExperimentKind::twomode;
  throw config_error("/kind: unknown experiment kind '" + std::string(s) + "'");
}

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool logarithmic = false;

  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      if (logarithmic)
        out.push_back(std::exp(std::log(start) + f * (std::log(stop) - std::log(start))));
      else
        out.push_back(start + f * (stop - start));
    }
    return out;
  }
};

struct TwoModeRunConfig {
  TwoModeParams params;
  double half_span = 0.0; // <= 0: default_half_span(beta)
  double dt = 0.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::bands;
  LatticeParams lattice;
  DriveParams drive;
  Grid q_grid;
  Grid alpha_grid;
  IntegratorConfig integrator;
  TwoModeRunConfig twomode;
  int band_count = 4;   // bands written by the bands experiment
  int initial_band = 1; // evolve / multicross initial band
  std::string output;

  void validate() const;
};

namespace detail {

// Reads fields of one JSON object and rejects anything left unread.
class ObjectReader {
public:
  ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw config_error(path_for("") + ": expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  std::optional<T> get(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null())
      return std::nullopt;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw config_error(path_for(key) + ": wrong type");
    }
  }

  template <class T>
  T require(const std::string& key) {
    auto v = get<T>(key);
    if (!v)
      throw config_error(path_for(key) + ": required field missing");
    return *v;
  }

  const nlohmann::json* child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null() ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.contains(item.key()))
        throw config_error(path_for(item.key()) + ": unknown field");
  }

  [[nodiscard]] std::string path_for(const std::string& key) const {
    return key.empty() ? (path_.empty() ? "/" : path_) : path_ + "/" + key;
  }

private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Grid read_grid(const nlohmann::json& j, const std::string& path) {
  ObjectReader r(j, path);
  Grid g;
  g.start = r.require<double>("start");
  g.stop = r.require<double>("stop");
  g.count = r.require<int>("count");
  const std::string spacing = r.get<std::string>("spacing").value_or("linear");
  if (spacing == "log")
    g.logarithmic = true;
  else if (spacing != "linear")
    throw config_error(path + "/spacing: expected 'linear' or 'log'");
  r.finish();
  if (g.count < 1)
    throw config_error(path + "/count: grid must be non-empty");
  if (g.logarithmic && !(g.start > 0.0 && g.stop > 0.0))
    throw config_error(path + ": log spacing needs positive bounds");
  return g;
}

inline nlohmann::json grid_json(const Grid& g) {
  return {{"start", g.start}, {"stop", g.stop}, {"count", g.count}, {"spacing", g.logarithmic ? "log" : "linear"}};
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  detail::ObjectReader root(j, "");
  ExperimentConfig cfg;
  cfg.kind = parse_kind(root.require<std::string>("kind"));
  cfg.output = root.get<std::string>("output").value_or("");
  cfg.band_count = root.get<int>("band_count").value_or(cfg.band_count);
  cfg.initial_band = root.get<int>("initial_band").value_or(cfg.initial_band);

  const bool lattice_kind = cfg.kind != ExperimentKind::twomode;
  const bool drive_kind = cfg.kind == ExperimentKind::evolve || cfg.kind == ExperimentKind::sweep ||
                          cfg.kind == ExperimentKind::multicross;

  if (const auto* l = root.child("lattice")) {
    detail::ObjectReader r(*l, "/lattice");
    cfg.lattice.v1 = r.require<double>("V1");
    cfg.lattice.v2 = r.require<double>("V2");
    cfg.lattice.truncation = r.get<int>("L").value_or(default_truncation);
    r.finish();
  } else if (lattice_kind) {
    throw config_error("/lattice: required for kind " + std::string(to_string(cfg.kind)));
  }

  if (const auto* d = root.child("drive")) {
    detail::ObjectReader r(*d, "/drive");
    if (cfg.kind == ExperimentKind::sweep) {
      if (r.has("alpha"))
        throw config_error("/drive/alpha: sweep takes alpha from alpha_grid");
    } else {
      cfg.drive.alpha = r.require<double>("alpha");
    }
    cfg.drive.q_ini = r.require<double>("q_ini");
    cfg.drive.q_fin = r.require<double>("q_fin");
    r.finish();
  } else if (drive_kind) {
    throw config_error("/drive: required for kind " + std::string(to_string(cfg.kind)));
  }

  if (const auto* g = root.child("q_grid"))
    cfg.q_grid = detail::read_grid(*g, "/q_grid");
  else if (cfg.kind == ExperimentKind::bands)
    throw config_error("/q_grid: required for kind bands");

  if (const auto* g = root.child("alpha_grid"))
    cfg.alpha_grid = detail::read_grid(*g, "/alpha_grid");
  else if (cfg.kind == ExperimentKind::sweep)
    throw config_error("/alpha_grid: required for kind sweep");

  if (const auto* i = root.child("integrator")) {
    detail::ObjectReader r(*i, "/integrator");
    cfg.integrator.dz = r.get<double>("dz").value_or(0.0);
    cfg.integrator.sample_stride = r.get<int>("sample_stride").value_or(0);
    cfg.integrator.target_samples = r.get<int>("target_samples").value_or(cfg.integrator.target_samples);
    cfg.integrator.check_convergence = r.get<bool>("check_convergence").value_or(false);
    r.finish();
  }

  if (const auto* t = root.child("twomode")) {
    detail::ObjectReader r(*t, "/twomode");
    cfg.twomode.params.coupling = r.require<double>("Delta");
    cfg.twomode.params.asymmetry = r.require<double>("delta");
    cfg.twomode.params.sweep_rate = r.require<double>("beta");
    cfg.twomode.params.detuning_offset = r.get<double>("eps0").value_or(2.0);
    cfg.twomode.half_span = r.get<double>("half_span").value_or(0.0);
    cfg.twomode.dt = r.get<double>("dt").value_or(0.0);
    r.finish();
  } else if (cfg.kind == ExperimentKind::twomode) {
    throw config_error("/twomode: required for kind twomode");
  }

  root.finish();
  cfg.validate();
  return cfg;
}

inline void ExperimentConfig::validate() const {
  auto wrap = [](const char* path, auto&& fn) {
    try {
      fn();
    } catch (const invalid_parameter& e) {
      throw config_error(std::string(path) + ": " + e.what());
    }
  };
  if (kind != ExperimentKind::twomode)
    wrap("/lattice", [&] { lattice.validate(); });
  if (kind == ExperimentKind::evolve || kind == ExperimentKind::multicross)
    wrap("/drive", [&] { drive.validate(); });
  if (kind == ExperimentKind::sweep) {
    for (double a : alpha_grid.values())
      if (!(a > 0.0))
        throw config_error("/alpha_grid: sweep rates must be positive");
    wrap("/drive", [&] { DriveParams{1.0, drive.q_ini, drive.q_fin}.validate(); });
    if (crossings_between(drive.q_ini, drive.q_fin) != 1)
      throw config_error("/drive: sweep range must contain exactly one Bragg point");
  }
  if (kind == ExperimentKind::multicross && crossings_between(drive.q_ini, drive.q_fin) < 2)
    throw config_error("/drive: multicross range must contain at least two Bragg points");
  if (kind == ExperimentKind::bands && (band_count < 1 || band_count > lattice.mode_count()))
    throw config_error("/band_count: must be in [1, 2L+1]");
  if ((kind == ExperimentKind::evolve || kind == ExperimentKind::multicross) &&
      (initial_band < 1 || initial_band > lattice.mode_count()))
    throw config_error("/initial_band: must be in [1, 2L+1]");
  if (integrator.dz < 0.0)
    throw config_error("/integrator/dz: must be positive (0 selects the default)");
  if (kind == ExperimentKind::twomode) {
    if (twomode.params.sweep_rate == 0.0)
      throw config_error("/twomode/beta: must be non-zero");
    if (twomode.params.coupling < 0.0)
      throw config_error("/twomode/Delta: must be non-negative");
  }
}

/// Fully resolved configuration, defaults included.
inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(cfg.kind));
  j["output"] = cfg.output;
  if (cfg.kind != ExperimentKind::twomode)
    j["lattice"] = {{"V1", cfg.lattice.v1}, {"V2", cfg.lattice.v2}, {"L", cfg.lattice.truncation}};
  switch (cfg.kind) {
  case ExperimentKind::bands:
    j["q_grid"] = detail::grid_json(cfg.q_grid);
    j["band_count"] = cfg.band_count;
    break;
  case ExperimentKind::sweep:
    j["drive"] = {{"q_ini", cfg.drive.q_ini}, {"q_fin", cfg.drive.q_fin}};
    j["alpha_grid"] = detail::grid_json(cfg.alpha_grid);
    break;
  case ExperimentKind::evolve:
  case ExperimentKind::multicross:
    j["drive"] = {{"alpha", cfg.drive.alpha}, {"q_ini", cfg.drive.q_ini}, {"q_fin", cfg.drive.q_fin}};
    j["initial_band"] = cfg.initial_band;
    break;
  case ExperimentKind::twomode:
    j["twomode"] = {{"Delta", cfg.twomode.params.coupling},
                    {"delta", cfg.twomode.params.asymmetry},
                    {"beta", cfg.twomode.params.sweep_rate},
                    {"eps0", cfg.twomode.params.detuning_offset},
                    {"half_span", cfg.twomode.half_span > 0.0 ? cfg.twomode.half_span
                                                              : default_half_span(cfg.twomode.params.sweep_rate)},
                    {"dt", cfg.twomode.dt}};
    break;
  }
  if (cfg.kind != ExperimentKind::bands && cfg.kind != ExperimentKind::twomode) {
    j["integrator"] = {{"dz", cfg.integrator.dz},
                       {"sample_stride", cfg.integrator.sample_stride},
                       {"target_samples", cfg.integrator.target_samples},
                       {"check_convergence", cfg.integrator.check_convergence}};
  }
  return j;
}

/// Set a value at a '.'-separated path, e.g. "lattice.V2" = "0.1". The value is
/// parsed as JSON and falls back to a plain string.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw config_error("override '" + assignment + "' is not of the form path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  nlohmann::json* node = &j;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (key.empty())
      throw config_error("override path '" + path + "' has an empty component");
    if (!node->is_object())
      *node = nlohmann::json::object();
    node = &(*node)[key];
    if (dot == std::string::npos)
      break;
    begin = dot + 1;
  }
  *node = std::move(value);
}

} // namespace ptlattice
