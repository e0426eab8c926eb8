#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "mesa/error.hpp"
#include "mesa/metrics/text_metrics.hpp"

namespace mesa::metrics {
namespace {

using NGram = std::span<const std::string>;

struct NGramLess {
  bool operator()(NGram a, NGram b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

void check_pairs(std::span<const TextPair> pairs) {
  if (pairs.empty()) raise(ErrorCode::EmptyCorpus, "no prompt/reference pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].prompt.empty() && pairs[i].reference.empty()) {
      raise(ErrorCode::EmptyUnion, fmt::format("pair {} has no tokens on either side", i));
    }
  }
}

void check_aligned(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b) {
  if (a.size() != b.size()) {
    raise(ErrorCode::DimensionMismatch, fmt::format("{} vectors vs {} vectors", a.size(), b.size()));
  }
  if (a.empty()) raise(ErrorCode::EmptyCorpus, "no embedding pairs");
}

}  // namespace

double distinct_n(const TokenizedPromptSet& set, std::size_t n) {
  require(n >= 1, ErrorCode::PreconditionViolated, "n must be at least 1");
  std::set<NGram, NGramLess> unique;
  std::size_t total = 0;
  for (const auto& prompt : set.prompts) {
    if (prompt.size() < n) continue;
    for (std::size_t i = 0; i + n <= prompt.size(); ++i) {
      unique.insert(NGram(prompt).subspan(i, n));
      ++total;
    }
  }
  if (total == 0) raise(ErrorCode::EmptyCorpus, fmt::format("prompt set has no {}-grams", n));
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

double category_entropy(std::span<const std::string> labels) {
  if (labels.empty()) raise(ErrorCode::EmptyCorpus, "no category labels");
  std::map<std::string_view, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  const auto n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const auto& [label, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return h == 0.0 ? 0.0 : h;  // avoid -0
}

double mean_jaccard(std::span<const TextPair> pairs) {
  check_pairs(pairs);
  double sum = 0.0;
  for (const auto& pair : pairs) {
    const std::set<std::string> p(pair.prompt.begin(), pair.prompt.end());
    const std::set<std::string> r(pair.reference.begin(), pair.reference.end());
    std::size_t inter = 0;
    for (const auto& t : p) inter += r.count(t);
    const std::size_t uni = p.size() + r.size() - inter;
    sum += static_cast<double>(inter) / static_cast<double>(uni);
  }
  return sum / static_cast<double>(pairs.size());
}

double copy_rate(std::span<const TextPair> pairs, std::size_t run_length) {
  check_pairs(pairs);
  require(run_length >= 1, ErrorCode::PreconditionViolated, "run length must be at least 1");
  std::size_t copied = 0;
  for (const auto& pair : pairs) {
    const auto& p = pair.prompt;
    const auto& r = pair.reference;
    bool hit = false;
    if (p.size() >= run_length && r.size() >= run_length) {
      std::set<NGram, NGramLess> ref_runs;
      for (std::size_t i = 0; i + run_length <= r.size(); ++i) {
        ref_runs.insert(NGram(r).subspan(i, run_length));
      }
      for (std::size_t i = 0; !hit && i + run_length <= p.size(); ++i) {
        hit = ref_runs.contains(NGram(p).subspan(i, run_length));
      }
    }
    copied += hit ? 1 : 0;
  }
  return static_cast<double>(copied) / static_cast<double>(pairs.size());
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    raise(ErrorCode::DimensionMismatch, fmt::format("dims {} and {}", a.size(), b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) raise(ErrorCode::ZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double semantic_score(std::span<const std::vector<double>> prompt_embeddings,
                      std::span<const std::vector<double>> reference_embeddings) {
  check_aligned(prompt_embeddings, reference_embeddings);
  double sum = 0.0;
  for (std::size_t i = 0; i < prompt_embeddings.size(); ++i) {
    sum += cosine(prompt_embeddings[i], reference_embeddings[i]);
  }
  return sum / static_cast<double>(prompt_embeddings.size());
}

double aesthetic_mean(std::span<const double> scores) {
  if (scores.empty()) raise(ErrorCode::EmptyCorpus, "no aesthetic scores");
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

double clip_score_mean(std::span<const std::vector<double>> image_embeddings,
                       std::span<const std::vector<double>> prompt_embeddings) {
  check_aligned(image_embeddings, prompt_embeddings);
  double sum = 0.0;
  for (std::size_t i = 0; i < image_embeddings.size(); ++i) {
    sum += 2.5 * std::max(cosine(image_embeddings[i], prompt_embeddings[i]), 0.0);
  }
  return sum / static_cast<double>(image_embeddings.size());
}

double va_similarity(std::span<const VAPoint> music, std::span<const VAPoint> image,
                     VASimilarityMode mode) {
  if (music.size() != image.size()) {
    raise(ErrorCode::LengthMismatch,
          fmt::format("{} music points vs {} image points", music.size(), image.size()));
  }
  if (music.empty()) raise(ErrorCode::LengthMismatch, "no VA pairs");
  double sum = 0.0;
  for (std::size_t i = 0; i < music.size(); ++i) {
    if (!music[i].in_unit_square() || !image[i].in_unit_square()) {
      raise(ErrorCode::OutOfRange, fmt::format("VA pair {} leaves the unit square", i));
    }
    if (mode == VASimilarityMode::L2) {
      sum += std::hypot(music[i].valence - image[i].valence, music[i].arousal - image[i].arousal);
    } else {
      const double a[2] = {music[i].valence, music[i].arousal};
      const double b[2] = {image[i].valence, image[i].arousal};
      sum += cosine(a, b);
    }
  }
  const double mean = sum / static_cast<double>(music.size());
  return mode == VASimilarityMode::L2 ? 1.0 - mean / std::sqrt(2.0) : mean;
}

}  // namespace mesa::metrics
