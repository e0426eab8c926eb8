#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/agents/lexicon.hpp"
#include "mesa/backends/wire.hpp"
#include "mesa/corpus/ingest.hpp"
#include "mesa/metrics/text_metrics.hpp"
#include "mesa/types.hpp"

namespace mesa::app {

namespace fs = std::filesystem;

struct Paths {
  fs::path annotations;
  fs::path captions;
  fs::path images;
  fs::path music_embeddings;
  fs::path image_embeddings;
  fs::path lexicon;
  fs::path templates;
  fs::path output_dir;
};

enum class BackendMode { Http, Mock, Rule };

std::string_view to_string(BackendMode mode) noexcept;

struct BackendSettings {
  BackendMode mode = BackendMode::Mock;
  backends::BackendConfig http;
  /// Vector size of the mock embedder.
  std::size_t mock_dim = 64;
};

struct MetricToggles {
  bool copy_rate = true;
  bool clip_score = true;
  std::size_t copy_run_length = metrics::kCopyRunLength;
  metrics::VASimilarityMode va_mode = metrics::VASimilarityMode::L2;
  /// Sem-score compares the reference caption with the generated prompt
  /// (text) or with the generated image in the shared embedding space (image).
  enum class SemanticSource { Text, Image } sem_mode = SemanticSource::Text;
};

/// Everything a command needs, from one JSON file. Relative paths resolve
/// against the directory holding the config file.
struct RunConfig {
  Paths paths;
  BackendSettings chat;
  BackendSettings embed;
  BackendSettings image;
  BackendSettings aesthetic;

  std::int64_t clip_ms = 5000;
  SourceRange music_range{-1.0, 1.0};
  SourceRange image_range{1.0, 10.0};
  corpus::SplitRatios split;

  std::vector<double> lambda_grid;

  std::size_t k = 4;
  std::size_t workers = 1;
  bool concurrent_agents = true;
  bool rule_fallback = true;
  bool generate_images = true;
  std::string model;
  double temperature = 0.0;
  agents::AffectTables tables;

  std::size_t n_pairs = 400;
  double min_similarity = 0.85;

  MetricToggles metrics;
  std::int64_t seed = 0;

  static RunConfig from_json(const nlohmann::json& j, const fs::path& base_dir);
  static RunConfig load(const fs::path& path);

  /// Numeric ranges and existence of every configured input path. Throws
  /// InvalidConfig.
  void validate() const;

  /// Forces rule chat and mock embed/image/aesthetic backends.
  void force_offline();
};

/// True when MESA_OFFLINE is set to a non-empty value other than "0".
bool offline_requested();

}  // namespace mesa::app
