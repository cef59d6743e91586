// ptlattice: command-line front end for band structures, driven evolution,
// transition-probability sweeps, power staircases and the two-mode model.
//
//   ptlattice <bands|evolve|sweep|multicross|twomode> --config <file> [--svg] [--jobs N] [--out prefix]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-accuracy failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ptlattice/config.hpp"
#include "ptlattice/experiments.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_accuracy = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ptlattice::config_error(path + ": cannot open config file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json parse_json(const std::string& text, const std::string& path) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ptlattice::config_error(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                  ": invalid JSON (" + e.what() + ")");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << text;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"PT-symmetric lattice Landau-Zener simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_prefix;
  bool want_svg = false;
  int jobs = 1;
  std::vector<std::string> overrides;

  for (const char* kind : {"bands", "evolve", "sweep", "multicross", "twomode"}) {
    CLI::App* sub = app.add_subcommand(kind, std::string("run the ") + kind + " experiment");
    sub->add_option("--config", config_path, "JSON experiment configuration")->required();
    sub->add_flag("--svg", want_svg, "also write <prefix>.svg");
    sub->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_prefix, "output path prefix (overrides config 'output')");
    sub->add_option("--set", overrides, "override a config field, e.g. --set lattice.V2=0.1");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }
  const std::string kind = app.get_subcommands().front()->get_name();

  ptlattice::ExperimentConfig cfg;
  try {
    nlohmann::json j = parse_json(read_file(config_path), config_path);
    if (!j.is_object())
      throw ptlattice::config_error(config_path + ": top level must be an object");
    if (!j.contains("kind"))
      j["kind"] = kind;
    else if (j["kind"] != kind)
      throw ptlattice::config_error(config_path + ": /kind is '" + j["kind"].dump() + "' but subcommand is '" +
                                    kind + "'");
    for (const auto& o : overrides)
      ptlattice::apply_override(j, o);
    if (!out_prefix.empty())
      j["output"] = out_prefix;
    cfg = ptlattice::parse_config(j);
    if (cfg.output.empty())
      cfg.output = "ptlattice_" + kind;
  } catch (const ptlattice::error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }

  try {
    const ptlattice::ExperimentOutput result = ptlattice::run_experiment(cfg, jobs);
    write_text(cfg.output + ".csv", ptlattice::to_csv(result.table));
    std::cout << "wrote " << cfg.output << ".csv (" << result.table.rows.size() << " rows)\n";
    if (want_svg) {
      write_text(cfg.output + ".svg", ptlattice::svg::render(result.chart));
      std::cout << "wrote " << cfg.output << ".svg\n";
    }
    if (result.has_warnings()) {
      for (const auto& w : result.table.metadata["warnings"])
        std::cerr << "accuracy warning: " << w.get<std::string>() << '\n';
      return exit_accuracy;
    }
  } catch (const ptlattice::degenerate_state& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return exit_accuracy;
  } catch (const ptlattice::invalid_parameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ptlattice::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_ok;
}
