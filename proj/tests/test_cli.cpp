#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <functional>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/test_support.hpp"

namespace fs = std::filesystem;
namespace ts = testing_support;

namespace {

int shell(const std::string& command) {
  const int status = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run(const std::string& args) { return shell(std::string(MESA_TEST_CLI) + " " + args); }

// The sample config with absolute paths and a private output directory.
fs::path write_config(const fs::path& dir, const std::function<void(nlohmann::json&)>& edit = {}) {
  std::ifstream in(ts::sample_config());
  auto j = nlohmann::json::parse(in);
  const auto base = ts::sample_config().parent_path();
  for (auto& [key, value] : j["paths"].items()) value = fs::weakly_canonical(base / value.get<std::string>()).string();
  j["paths"]["output_dir"] = (dir / "run").string();
  if (edit) edit(j);
  const auto path = dir / "config.json";
  std::ofstream(path) << j.dump(2);
  return path;
}

}  // namespace

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("ingest"), 1) << "missing --config is a usage error";
  EXPECT_EQ(run("-c /nonexistent/config.json ingest"), 1);
}

TEST(Cli, ConfigValidation) {
  const auto dir = ts::scratch_dir("cli_config");
  auto unknown = write_config(dir, [](nlohmann::json& j) { j["pipeline"]["kk"] = 4; });
  EXPECT_EQ(run("-c " + unknown.string() + " pipeline"), 1);
  auto bad_k = write_config(dir, [](nlohmann::json& j) { j["pipeline"]["k"] = 0; });
  EXPECT_EQ(run("-c " + bad_k.string() + " pipeline"), 1);
  auto missing = write_config(dir, [](nlohmann::json& j) { j["paths"]["captions"] = "/no/such/file.jsonl"; });
  EXPECT_EQ(run("-c " + missing.string() + " pipeline"), 1);
  fs::remove_all(dir);
}

TEST(Cli, UnknownAblationTarget) {
  const auto dir = ts::scratch_dir("cli_ablate");
  const auto cfg = write_config(dir);
  EXPECT_EQ(run("-c " + cfg.string() + " ablate --drop scene"), 1);
  fs::remove_all(dir);
}

TEST(Cli, BackendFailureExitsTwoUnlessOffline) {
  const auto dir = ts::scratch_dir("cli_backend");
  const auto cfg = write_config(dir, [](nlohmann::json& j) {
    j["backends"]["chat"] = {{"mode", "http"}, {"endpoint", "http://127.0.0.1:1/v1"}, {"max_retries", 0},
                             {"timeout_ms", 500}};
    j["pipeline"]["rule_fallback"] = false;
  });
  EXPECT_EQ(run("-c " + cfg.string() + " pipeline"), 2);
  EXPECT_EQ(run("-c " + cfg.string() + " --offline pipeline"), 0);
  EXPECT_EQ(shell("MESA_OFFLINE=1 " + std::string(MESA_TEST_CLI) + " -c " + cfg.string() + " pipeline"), 0);
  fs::remove_all(dir);
}

TEST(Cli, RerunIsByteIdentical) {
  const auto dir = ts::scratch_dir("cli_rerun");
  const auto cfg = write_config(dir);
  const auto out = dir / "run" / "pipeline" / "outputs.jsonl";
  ASSERT_EQ(run("-c " + cfg.string() + " pipeline"), 0);
  const auto first = ts::slurp(out);
  ASSERT_EQ(run("-c " + cfg.string() + " pipeline"), 0);
  EXPECT_EQ(first, ts::slurp(out));
  EXPECT_FALSE(first.empty());

  // --seed overrides the config seed.
  ASSERT_EQ(run("-c " + cfg.string() + " --seed 8 pipeline"), 0);
  EXPECT_NE(first, ts::slurp(out));
  fs::remove_all(dir);
}

TEST(Cli, LockedRunDirectory) {
  const auto dir = ts::scratch_dir("cli_lock");
  const auto cfg = write_config(dir);
  fs::create_directories(dir / "run");
  std::ofstream(dir / "run" / ".lock") << "12345\n";
  EXPECT_EQ(run("-c " + cfg.string() + " ingest"), 1);
  fs::remove_all(dir);
}

TEST(Cli, FullOfflineSequence) {
  const auto dir = ts::scratch_dir("cli_full");
  const auto cfg = write_config(dir);
  for (const char* step : {"ingest", "train-va --side music", "train-va --side image", "pipeline", "evaluate",
                           "ablate --drop verb", "pair", "report"}) {
    EXPECT_EQ(run("-q -c " + cfg.string() + " " + step), 0) << step;
  }
  for (const char* artifact : {"ingest/manifest.json", "models/va_head_music.model", "eval/report.json",
                               "eval/table.md", "ablate/table_verb.md", "pairs/pairs.jsonl", "report.md"}) {
    EXPECT_TRUE(fs::exists(dir / "run" / artifact)) << artifact;
  }
  EXPECT_FALSE(fs::exists(dir / "run" / ".lock"));
  fs::remove_all(dir);
}
