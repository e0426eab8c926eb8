#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "mesa/types.hpp"

namespace mesa::corpus {

struct CaptionRecord {
  std::string clip_id;
  std::string caption;
  std::optional<VAPoint> va;  // normalized
};

struct ImageEmotionRecord {
  std::string image_id;
  std::set<std::string> categories;
  double valence = 0.0;  // normalized
  double arousal = 0.0;
  double dominance = 0.0;

  VAPoint va() const { return {valence, arousal}; }
};

/// The 26 EMOTIC discrete emotion labels.
const std::vector<std::string>& emotic_categories();

/// Captions JSONL. `valence`/`arousal` are optional but must appear together
/// and are normalized from `range`.
std::vector<CaptionRecord> load_captions(std::istream& source, SourceRange range);

std::vector<ImageEmotionRecord> load_image_records(
    std::istream& source, SourceRange range,
    const std::vector<std::string>& vocabulary = emotic_categories());

struct EmbeddingTable {
  std::size_t dim = 0;
  std::string modality;
  std::map<std::string, EmbeddingVector> vectors;
};

/// Embedding file: a `{"dim","modality","count"}` header line followed by
/// `count` lines of `{"id","vec"}`. Lines starting with '#' are comments.
EmbeddingTable load_embeddings(std::istream& source);

/// Writes the same format load_embeddings reads, rows in the given order.
void write_embeddings(std::ostream& out, const std::string& modality,
                      const std::vector<EmbeddingVector>& rows);

}  // namespace mesa::corpus
