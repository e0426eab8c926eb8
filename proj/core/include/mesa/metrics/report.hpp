#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/affect/stats.hpp"
#include "mesa/metrics/text_metrics.hpp"

namespace mesa::metrics {

struct MetricsReport {
  double aesthetic = 0.0;
  double va_similarity = 0.0;
  double distinct1 = 0.0;
  double distinct2 = 0.0;
  double jaccard = 0.0;
  double category_entropy = 0.0;
  double sem_score = 0.0;
  std::optional<double> clip_score;
  std::optional<double> copy_rate;
};

struct EmbeddingPairs {
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
};

struct MetricsInputs {
  std::vector<std::string> prompts;
  std::vector<std::string> categories;
  /// (generated prompt, reference caption) for Jaccard and copy rate.
  std::vector<std::pair<std::string, std::string>> prompt_reference;
  /// (prompt or image embedding, reference embedding) for the semantic score.
  EmbeddingPairs semantic;
  std::vector<double> aesthetic_scores;
  std::vector<VAPoint> music_va;
  std::vector<VAPoint> image_va;
  /// (image embedding, prompt embedding); absent means no CLIPScore.
  std::optional<EmbeddingPairs> clip;
  bool with_copy_rate = true;
  std::size_t copy_run_length = kCopyRunLength;
  VASimilarityMode va_mode = VASimilarityMode::L2;
};

MetricsReport build_report(const MetricsInputs& inputs);

nlohmann::ordered_json to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

/// Markdown table in the column order Aesthetic, V-A Sim, Distinct-1,
/// Distinct-2, Jaccard, Category Entropy, Sem-score; one row per method.
std::string render_metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

nlohmann::ordered_json to_json(const affect::RegressionMetrics& metrics);

/// Markdown table with columns RMSE, MAE, Pearson, Spearman, CCC, R².
std::string render_regression_table(const affect::RegressionMetrics& metrics);

}  // namespace mesa::metrics
