#pragma once

#include <string>
#include <vector>

namespace mesa {

/// A (valence, arousal) point. Every affect computation in the library works
/// on the unit square; source corpora are normalized on ingest.
struct VAPoint {
  double valence = 0.0;
  double arousal = 0.0;

  bool in_unit_square() const noexcept {
    return valence >= 0.0 && valence <= 1.0 && arousal >= 0.0 && arousal <= 1.0;
  }
  friend bool operator==(const VAPoint&, const VAPoint&) = default;
};

/// Closed numeric interval a corpus annotates in, e.g. [-1, 1] or [1, 9].
struct SourceRange {
  double lo = 0.0;
  double hi = 1.0;
  friend bool operator==(const SourceRange&, const SourceRange&) = default;
};

struct EmbeddingVector {
  std::string id;
  std::string modality;
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
};

}  // namespace mesa
