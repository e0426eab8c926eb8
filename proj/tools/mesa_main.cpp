// mesa: command-line front end. Logs go to stderr, artifacts to the run
// directory named in the config.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mesa/app/commands.hpp"
#include "mesa/error.hpp"

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::int64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> workers;
  bool offline = false;
  bool verbose = false;
  bool quiet = false;
};

mesa::app::RunConfig load_config(const Globals& g) {
  auto config = mesa::app::RunConfig::load(g.config_path);
  if (g.seed) config.seed = *g.seed;
  if (g.output_dir) config.paths.output_dir = std::filesystem::absolute(*g.output_dir);
  if (g.workers) config.workers = *g.workers;
  if (g.offline || mesa::app::offline_requested()) config.force_offline();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mesa: music-to-image prompt engine and evaluation harness"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-c,--config", g.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "override the configured seed everywhere");
  app.add_option("--out", g.output_dir, "override paths.output_dir");
  app.add_option("--workers", g.workers, "override pipeline.workers");
  app.add_flag("--offline", g.offline, "use rule/mock backends (same as MESA_OFFLINE=1)");
  app.add_flag("-v,--verbose", g.verbose, "debug logging");
  app.add_flag("-q,--quiet", g.quiet, "warnings and errors only");

  auto* ingest = app.add_subcommand("ingest", "parse, segment, normalize and split the corpora");
  auto* train = app.add_subcommand("train-va", "fit a valence-arousal head and report test metrics");
  std::string side = "music";
  train->add_option("--side", side, "music or image")->check(CLI::IsMember({"music", "image"}));
  auto* pipeline = app.add_subcommand("pipeline", "run the attribute agents and assemble prompts");
  auto* evaluate = app.add_subcommand("evaluate", "compute the metrics report for the pipeline outputs");
  auto* ablate = app.add_subcommand("ablate", "rerun with one agent removed and compare");
  std::string drop;
  ablate->add_option("--drop", drop, "verb, composition, color, style or all")->required();
  auto* pair = app.add_subcommand("pair", "match test-split music clips to images in VA space");
  auto* report = app.add_subcommand("report", "collect all tables of a run into report.md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every usage error is a validation error (1).
    return app.exit(e) == 0 ? 0 : 1;
  }

  auto logger = spdlog::stderr_color_mt("mesa");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(g.verbose ? spdlog::level::debug : g.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    const auto config = load_config(g);
    if (ingest->parsed()) {
      std::cout << mesa::app::cmd_ingest(config).at("counts").dump(2) << "\n";
    } else if (train->parsed()) {
      const auto result = mesa::app::cmd_train_va(config, mesa::affect::side_from_string(side));
      std::cout << fmt::format("lambda = {}\n\n", result.head.lambda)
                << mesa::metrics::render_regression_table(result.test);
    } else if (pipeline->parsed()) {
      const auto outputs = mesa::app::cmd_pipeline(config);
      std::size_t prompts = 0;
      for (const auto& o : outputs) prompts += o.prompt_set.prompts.size();
      std::cout << fmt::format("{} records, {} prompts\n", outputs.size(), prompts);
    } else if (evaluate->parsed()) {
      std::cout << mesa::metrics::render_metrics_table({{"Ours", mesa::app::cmd_evaluate(config)}});
    } else if (ablate->parsed()) {
      std::vector<std::pair<std::string, mesa::metrics::MetricsReport>> rows;
      for (auto& r : mesa::app::cmd_ablate(config, drop)) rows.emplace_back(r.name, r.report);
      std::cout << mesa::metrics::render_metrics_table(rows);
    } else if (pair->parsed()) {
      const auto result = mesa::app::cmd_pair(config);
      std::cout << fmt::format("{} of {} pairs\n", result.pairs.size(), result.requested);
    } else if (report->parsed()) {
      std::cout << mesa::app::cmd_report(config);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return mesa::app::exit_code_for(e);
  }
  return 0;
}
