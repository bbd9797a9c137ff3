// sand_cli: layout analysis, simulation and layout generation.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sand.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool svg = false;
  std::optional<double> resolution;
  std::optional<std::size_t> max_epochs;

  // generate
  std::string kind = "grid";
  double s = 1.0;
  std::size_t rows = 3, cols = 3, n = 10;
  std::vector<double> area{10.0, 10.0};
};

sand::RunConfig load(const Options& o) {
  auto cfg = sand::load_config(o.config);
  if (o.seed) cfg.scheduler.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.resolution) {
    if (!(*o.resolution > 0)) throw sand::ConfigError("--resolution must be positive");
    cfg.analysis.resolution = *o.resolution;
  }
  if (o.max_epochs) {
    if (*o.max_epochs == 0) throw sand::ConfigError("--max-epochs must be positive");
    cfg.max_epochs = *o.max_epochs;
  }
  return cfg;
}

sand::ojson generator_spec(const Options& o) {
  if (!o.config.empty()) return sand::parse_json(sand::read_file(o.config), o.config);
  sand::ojson spec;
  if (o.kind == "grid") {
    spec["grid"] = {{"s", o.s}, {"rows", o.rows}, {"cols", o.cols}};
  } else if (o.kind == "random") {
    if (o.area.size() != 2) throw sand::ConfigError("--area takes two values");
    spec["random"] = {{"n", o.n}, {"area", o.area}, {"seed", o.seed.value_or(0)}};
  } else {
    throw sand::ConfigError("unknown generator kind '" + o.kind + "'");
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sybil-resilient neighborhood discovery: analysis and simulation"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "search a layout for snares and check the range condition");
  auto* simulate = app.add_subcommand("simulate", "run the discovery protocol and check the problem variants");
  auto* generate = app.add_subcommand("generate", "write a grid or random layout file");

  for (auto* sub : {analyze, simulate}) {
    sub->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "scheduler seed");
    sub->add_option("--out", o.out, "output directory");
  }
  analyze->add_flag("--svg", o.svg, "also write layout.svg");
  analyze->add_option("--resolution", o.resolution, "snare search sampling step");
  simulate->add_option("--max-epochs", o.max_epochs, "step budget");

  generate->add_option("--config", o.config, "generator spec (JSON)")->check(CLI::ExistingFile);
  generate->add_option("--kind", o.kind, "grid or random");
  generate->add_option("--s", o.s, "grid spacing");
  generate->add_option("--rows", o.rows, "grid rows");
  generate->add_option("--cols", o.cols, "grid columns");
  generate->add_option("--n", o.n, "random node count");
  generate->add_option("--area", o.area, "random area width and height")->expected(2);
  generate->add_option("--seed", o.seed, "random seed");
  generate->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sand::exit_code::usage;
  }

  try {
    if (analyze->parsed()) return sand::cmd_analyze(load(o), o.svg);
    if (simulate->parsed()) return sand::cmd_simulate(load(o));
    return sand::cmd_generate(generator_spec(o), o.out.value_or("out"));
  } catch (const sand::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const sand::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return sand::exit_code::usage;
}
