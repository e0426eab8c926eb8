#include "mesa/metrics/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mesa/error.hpp"

namespace mesa::metrics {

MetricsReport build_report(const MetricsInputs& in) {
  MetricsReport r;
  const auto set = tokenize_all(in.prompts);
  r.distinct1 = distinct_n(set, 1);
  r.distinct2 = distinct_n(set, 2);
  r.category_entropy = category_entropy(in.categories);

  std::vector<TextPair> pairs;
  pairs.reserve(in.prompt_reference.size());
  for (const auto& [prompt, reference] : in.prompt_reference) {
    pairs.push_back({tokenize(prompt), tokenize(reference)});
  }
  r.jaccard = mean_jaccard(pairs);
  if (in.with_copy_rate) r.copy_rate = copy_rate(pairs, in.copy_run_length);

  r.sem_score = semantic_score(in.semantic.first, in.semantic.second);
  r.aesthetic = aesthetic_mean(in.aesthetic_scores);
  r.va_similarity = va_similarity(in.music_va, in.image_va, in.va_mode);
  if (in.clip) r.clip_score = clip_score_mean(in.clip->first, in.clip->second);

  for (double v : {r.aesthetic, r.va_similarity, r.distinct1, r.distinct2, r.jaccard,
                   r.category_entropy, r.sem_score}) {
    require(std::isfinite(v), ErrorCode::OutOfRange, "metric evaluated to a non-finite value");
  }
  return r;
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j{{"aesthetic", r.aesthetic},
                           {"va_similarity", r.va_similarity},
                           {"distinct1", r.distinct1},
                           {"distinct2", r.distinct2},
                           {"jaccard", r.jaccard},
                           {"category_entropy", r.category_entropy},
                           {"sem_score", r.sem_score}};
  if (r.clip_score) j["clip_score"] = *r.clip_score;
  if (r.copy_rate) j["copy_rate"] = *r.copy_rate;
  return j;
}

MetricsReport report_from_json(const nlohmann::json& j) {
  try {
    MetricsReport r;
    r.aesthetic = j.at("aesthetic").get<double>();
    r.va_similarity = j.at("va_similarity").get<double>();
    r.distinct1 = j.at("distinct1").get<double>();
    r.distinct2 = j.at("distinct2").get<double>();
    r.jaccard = j.at("jaccard").get<double>();
    r.category_entropy = j.at("category_entropy").get<double>();
    r.sem_score = j.at("sem_score").get<double>();
    if (j.contains("clip_score")) r.clip_score = j.at("clip_score").get<double>();
    if (j.contains("copy_rate")) r.copy_rate = j.at("copy_rate").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("metrics report: ") + e.what());
  }
}

std::string render_metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::string out =
      "| Method | Aesthetic | V-A Sim | Distinct-1 | Distinct-2 | Jaccard | Category Entropy | Sem-score |\n"
      "|---|---|---|---|---|---|---|---|\n";
  for (const auto& [name, r] : rows) {
    out += fmt::format("| {} | {:.2f} | {:.3f} | {:.3f} | {:.3f} | {:.3f} | {:.3f} | {:.3f} |\n", name,
                       r.aesthetic, r.va_similarity, r.distinct1, r.distinct2, r.jaccard,
                       r.category_entropy, r.sem_score);
  }
  return out;
}

nlohmann::ordered_json to_json(const affect::RegressionMetrics& m) {
  auto dim = [](const affect::DimensionMetrics& d) {
    return nlohmann::ordered_json{{"rmse", d.rmse},         {"mae", d.mae}, {"pearson", d.pearson},
                                  {"spearman", d.spearman}, {"ccc", d.ccc}, {"r2", d.r2}};
  };
  return {{"valence", dim(m.valence)}, {"arousal", dim(m.arousal)}};
}

std::string render_regression_table(const affect::RegressionMetrics& m) {
  std::string out =
      "| Dimension | RMSE | MAE | Pearson | Spearman | CCC | R² |\n"
      "|---|---|---|---|---|---|---|\n";
  auto row = [&](const char* name, const affect::DimensionMetrics& d) {
    out += fmt::format("| {} | {:.3f} | {:.3f} | {:.3f} | {:.3f} | {:.3f} | {:.3f} |\n", name, d.rmse,
                       d.mae, d.pearson, d.spearman, d.ccc, d.r2);
  };
  row("Valence", m.valence);
  row("Arousal", m.arousal);
  return out;
}

}  // namespace mesa::metrics
