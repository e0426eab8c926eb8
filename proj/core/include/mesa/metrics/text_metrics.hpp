#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mesa/types.hpp"

namespace mesa::metrics {

using Tokens = std::vector<std::string>;

inline constexpr std::string_view kTokenizerId = "casefold-punct-ws/1";

/// Unicode case fold, then split on whitespace and on every character of
/// general category P* ("low-angle" -> low, angle). Symbols (category S) stay
/// inside tokens.
Tokens tokenize(std::string_view text);

struct TokenizedPromptSet {
  std::vector<Tokens> prompts;
  std::string tokenizer_id{kTokenizerId};
};

TokenizedPromptSet tokenize_all(std::span<const std::string> prompts);

/// |unique n-grams| / |n-grams|, pooled over the set; n-grams never span two
/// prompts.
double distinct_n(const TokenizedPromptSet& set, std::size_t n);

/// Shannon entropy (natural log) of the empirical label distribution.
double category_entropy(std::span<const std::string> labels);

struct TextPair {
  Tokens prompt;
  Tokens reference;
};

/// Mean over pairs of |P ∩ R| / |P ∪ R| on token sets.
double mean_jaccard(std::span<const TextPair> pairs);

inline constexpr std::size_t kCopyRunLength = 6;

/// Fraction of pairs whose prompt repeats a run of at least `run_length`
/// consecutive reference tokens verbatim.
double copy_rate(std::span<const TextPair> pairs, std::size_t run_length = kCopyRunLength);

double cosine(std::span<const double> a, std::span<const double> b);

/// Mean cosine over aligned (prompt, reference) embedding pairs.
double semantic_score(std::span<const std::vector<double>> prompt_embeddings,
                      std::span<const std::vector<double>> reference_embeddings);

double aesthetic_mean(std::span<const double> scores);

/// Mean of 2.5 * max(cos, 0) over aligned (image, prompt) pairs.
double clip_score_mean(std::span<const std::vector<double>> image_embeddings,
                       std::span<const std::vector<double>> prompt_embeddings);

enum class VASimilarityMode { L2, Cosine };

/// 1 - mean(||music_i - image_i||_2) / sqrt(2). The cosine mode averages the
/// cosine between the two VA vectors instead.
double va_similarity(std::span<const VAPoint> music, std::span<const VAPoint> image,
                     VASimilarityMode mode = VASimilarityMode::L2);

}  // namespace mesa::metrics
