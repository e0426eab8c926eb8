#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mesa/types.hpp"

namespace mesa::corpus {

struct AnnotationFrame {
  std::int64_t time_ms = 0;
  double valence = 0.0;  // source range
  double arousal = 0.0;  // source range
};

struct TrackAnnotations {
  std::string track_id;
  std::vector<AnnotationFrame> frames;  // strictly increasing time_ms
};

struct AudioSegmentRecord {
  std::string track_id;
  std::int64_t segment_index = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  VAPoint va;

  /// Stable identifier used across captions, embeddings and splits.
  std::string clip_id() const;
};

inline constexpr std::int64_t kDefaultClipMs = 5000;
inline constexpr SourceRange kDeamRange{-1.0, 1.0};
inline constexpr SourceRange kEmoticRange{1.0, 10.0};

/// Parses the canonical `track_id,time_ms,valence,arousal` CSV. Tracks come
/// back sorted by track_id. Every malformed row is collected before throwing,
/// so the resulting Error lists all offending line numbers.
std::vector<TrackAnnotations> parse_annotation_csv(std::istream& source);

/// (value - lo) / (hi - lo), clamped to [0, 1].
double normalize_va(double value, SourceRange range);

/// Cuts one track into consecutive clip_ms windows starting at t = 0 and
/// averages the frames inside each window. A window counts as covered when it
/// ends no later than last_frame + frame_step, where frame_step is the median
/// gap between frames; the trailing partial window is dropped and windows
/// without frames are skipped.
std::vector<AudioSegmentRecord> segment_track(const std::string& track_id,
                                              std::span<const AnnotationFrame> frames,
                                              std::int64_t clip_ms, SourceRange range);

enum class Split { Train, Validation, Test };

std::string_view to_string(Split split) noexcept;

struct SplitRatios {
  double train = 0.70;
  double validation = 0.15;
  double test = 0.15;
};

/// An item to be split. Items sharing a group (typically the track) always
/// land in the same split.
struct SplitItem {
  std::string id;
  std::string group;
};

struct SplitAssignment {
  std::map<std::string, Split> by_id;

  std::size_t count(Split split) const;
  std::vector<std::string> ids(Split split) const;
};

/// Shuffles the distinct groups with a seeded Mersenne twister and hands out
/// group counts by largest remainder. Input order does not matter.
SplitAssignment split_dataset(std::span<const SplitItem> items, SplitRatios ratios,
                              std::uint64_t seed);

/// Ungrouped convenience form: every id is its own group.
SplitAssignment split_dataset(std::span<const std::string> ids, SplitRatios ratios,
                              std::uint64_t seed);

}  // namespace mesa::corpus
