#pragma once

#include <exception>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/affect/regression_head.hpp"
#include "mesa/agents/pipeline.hpp"
#include "mesa/app/config.hpp"
#include "mesa/backends/backends.hpp"
#include "mesa/corpus/ingest.hpp"
#include "mesa/corpus/loaders.hpp"
#include "mesa/metrics/report.hpp"
#include "mesa/pairing/pairing.hpp"

namespace mesa::app {

// Every command validates the whole config and takes the run-directory lock
// before touching the disk. Artifacts land under paths.output_dir:
//
//   ingest/    segments.jsonl captions.jsonl images.jsonl manifest.json
//   models/    va_head_<side>.model va_head_<side>.json
//   pipeline/  outputs.jsonl images/ manifest.json
//   eval/      report.json table.md
//   ablate/    <variant>/outputs.jsonl <variant>/report.json table_<drop>.md
//   pairs/     pairs.jsonl summary.json
//   report.md

/// Parsed and split corpora; whichever inputs the config names.
struct Corpora {
  std::size_t tracks = 0;
  std::vector<corpus::AudioSegmentRecord> segments;
  corpus::SplitAssignment music_split;
  std::vector<corpus::CaptionRecord> captions;
  std::vector<corpus::ImageEmotionRecord> images;
  corpus::SplitAssignment image_split;
};

Corpora load_corpora(const RunConfig& config);

struct BackendSet {
  std::unique_ptr<backends::ChatBackend> chat;
  std::unique_ptr<backends::ChatBackend> rule;
  std::unique_ptr<backends::EmbedBackend> embed;
  std::unique_ptr<backends::ImageBackend> image;
  std::unique_ptr<backends::AestheticBackend> aesthetic;
};

/// `image_root` is where mock images are written and resolved.
BackendSet make_backends(const RunConfig& config, const agents::Lexicon& lexicon, const fs::path& image_root);

/// Returns the ingest manifest (counts and checksums).
nlohmann::ordered_json cmd_ingest(const RunConfig& config);

struct TrainResult {
  affect::RegressionHead head;
  affect::RegressionMetrics test;
  std::vector<std::pair<double, double>> validation_rmse;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  std::size_t n_test = 0;
};

TrainResult cmd_train_va(const RunConfig& config, affect::Side side);

std::vector<agents::PipelineOutput> cmd_pipeline(const RunConfig& config);

metrics::MetricsReport cmd_evaluate(const RunConfig& config);

struct AblationRow {
  std::string name;  // "Ours", "w/o Verb", ...
  metrics::MetricsReport report;
};

/// `drop` is verb, composition, color, style, or all (every one of them).
/// The first row is always the full pipeline. Throws UnknownAgent.
std::vector<AblationRow> cmd_ablate(const RunConfig& config, const std::string& drop);

pairing::PairingResult cmd_pair(const RunConfig& config);

/// Collects the tables written by earlier commands into report.md.
std::string cmd_report(const RunConfig& config);

/// 2 for backend failures, 1 for everything else.
int exit_code_for(const std::exception& error) noexcept;

}  // namespace mesa::app
