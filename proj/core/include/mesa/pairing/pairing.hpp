#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/types.hpp"

namespace mesa::pairing {

struct MusicPoint {
  std::string clip_id;
  VAPoint va;
};

struct ImagePoint {
  std::string image_id;
  VAPoint va;
};

struct CrossModalPair {
  std::string clip_id;
  std::string image_id;
  double similarity = 0.0;
  friend bool operator==(const CrossModalPair&, const CrossModalPair&) = default;
};

inline constexpr double kDefaultMinSimilarity = 0.85;

struct PairingResult {
  std::vector<CrossModalPair> pairs;
  std::size_t requested = 0;

  /// Fewer qualifying pairs than requested. Not fatal; callers report it.
  bool insufficient() const noexcept { return pairs.size() < requested; }
};

/// 1 - |a - b|_2 / sqrt(2).
double pair_similarity(VAPoint a, VAPoint b) noexcept;

/// Greedy one-to-one matching in the order (similarity desc, clip_id asc,
/// image_id asc), keeping pairs with similarity >= min_similarity until
/// n_pairs are chosen. Equivalent to sorting all candidates, but each clip
/// only keeps its current best unused image in a heap, so memory stays
/// O(clips). Scoring is spread over `threads`.
PairingResult pair_by_va(std::span<const MusicPoint> music, std::span<const ImagePoint> images,
                         std::size_t n_pairs, double min_similarity = kDefaultMinSimilarity,
                         std::size_t threads = 1);

nlohmann::ordered_json to_json(const CrossModalPair& pair);
CrossModalPair pair_from_json(const nlohmann::json& j);

}  // namespace mesa::pairing
