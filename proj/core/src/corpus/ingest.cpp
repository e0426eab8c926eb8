#include "mesa/corpus/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>
#include <set>
#include <string_view>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "mesa/error.hpp"

namespace mesa::corpus {
namespace {

constexpr std::string_view kHeader = "track_id,time_ms,valence,arousal";

std::string_view strip_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) return false;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) return false;
  }
  return true;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// Unbiased draw from [0, bound) using rejection; std::uniform_int_distribution
// is implementation-defined, which would make splits differ between stdlibs.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

}  // namespace

std::string AudioSegmentRecord::clip_id() const {
  return fmt::format("{}_{:03}", track_id, segment_index);
}

std::vector<TrackAnnotations> parse_annotation_csv(std::istream& source) {
  struct Pending {
    std::vector<AnnotationFrame> frames;
    std::vector<std::size_t> lines;
  };
  std::map<std::string, Pending> tracks;
  std::vector<std::size_t> malformed;

  std::string raw;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(source, raw)) {
    ++line_no;
    std::string_view line = strip_line(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != kHeader) {
        throw Error(ErrorCode::MalformedRow,
                    fmt::format("line {}: expected header '{}'", line_no, kHeader), {line_no});
      }
      seen_header = true;
      continue;
    }
    auto fields = split_fields(line);
    AnnotationFrame frame;
    if (fields.size() != 4 || fields[0].empty() || !parse_number(fields[1], frame.time_ms) ||
        frame.time_ms < 0 || !parse_number(fields[2], frame.valence) ||
        !parse_number(fields[3], frame.arousal)) {
      malformed.push_back(line_no);
      continue;
    }
    auto& pending = tracks[std::string(fields[0])];
    pending.frames.push_back(frame);
    pending.lines.push_back(line_no);
  }

  if (!malformed.empty()) {
    std::string where = fmt::format("{}", fmt::join(malformed, ", "));
    throw Error(ErrorCode::MalformedRow, fmt::format("malformed rows at lines {}", where),
                std::move(malformed));
  }

  std::vector<TrackAnnotations> out;
  out.reserve(tracks.size());
  for (auto& [track_id, pending] : tracks) {
    for (std::size_t i = 1; i < pending.frames.size(); ++i) {
      if (pending.frames[i].time_ms <= pending.frames[i - 1].time_ms) {
        throw Error(ErrorCode::NonMonotonicTime,
                    fmt::format("track '{}': time {} ms at line {} does not follow {} ms",
                                track_id, pending.frames[i].time_ms, pending.lines[i],
                                pending.frames[i - 1].time_ms),
                    {pending.lines[i]});
      }
    }
    out.push_back({track_id, std::move(pending.frames)});
  }
  return out;
}

double normalize_va(double value, SourceRange range) {
  if (!(range.lo < range.hi)) {
    raise(ErrorCode::DegenerateRange, fmt::format("range [{}, {}] is empty", range.lo, range.hi));
  }
  return std::clamp((value - range.lo) / (range.hi - range.lo), 0.0, 1.0);
}

std::vector<AudioSegmentRecord> segment_track(const std::string& track_id,
                                              std::span<const AnnotationFrame> frames,
                                              std::int64_t clip_ms, SourceRange range) {
  if (frames.empty()) raise(ErrorCode::EmptyInput, fmt::format("track '{}' has no frames", track_id));
  require(clip_ms > 0, ErrorCode::PreconditionViolated, "clip_ms must be positive");
  if (!(range.lo < range.hi)) {
    raise(ErrorCode::DegenerateRange, fmt::format("range [{}, {}] is empty", range.lo, range.hi));
  }
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].time_ms <= frames[i - 1].time_ms) {
      raise(ErrorCode::NonMonotonicTime,
            fmt::format("track '{}': frame {} is not after frame {}", track_id, i, i - 1));
    }
  }

  std::int64_t step = 0;
  if (frames.size() > 1) {
    std::vector<std::int64_t> gaps(frames.size() - 1);
    for (std::size_t i = 1; i < frames.size(); ++i) gaps[i - 1] = frames[i].time_ms - frames[i - 1].time_ms;
    auto mid = gaps.begin() + static_cast<std::ptrdiff_t>((gaps.size() - 1) / 2);
    std::nth_element(gaps.begin(), mid, gaps.end());
    step = *mid;
  }
  const std::int64_t covered_until = frames.back().time_ms + step;
  const std::int64_t windows = covered_until / clip_ms;

  std::vector<AudioSegmentRecord> out;
  std::size_t clamped = 0;
  std::size_t cursor = 0;
  for (std::int64_t w = 0; w < windows; ++w) {
    const std::int64_t start = w * clip_ms;
    const std::int64_t end = start + clip_ms;
    while (cursor < frames.size() && frames[cursor].time_ms < start) ++cursor;
    double sum_v = 0.0;
    double sum_a = 0.0;
    std::size_t n = 0;
    for (std::size_t i = cursor; i < frames.size() && frames[i].time_ms < end; ++i) {
      sum_v += frames[i].valence;
      sum_a += frames[i].arousal;
      ++n;
    }
    if (n == 0) continue;
    const double mean_v = sum_v / static_cast<double>(n);
    const double mean_a = sum_a / static_cast<double>(n);
    const double span = range.hi - range.lo;
    const double raw_v = (mean_v - range.lo) / span;
    const double raw_a = (mean_a - range.lo) / span;
    if (raw_v < 0.0 || raw_v > 1.0 || raw_a < 0.0 || raw_a > 1.0) ++clamped;
    out.push_back({track_id, w, start, end, {normalize_va(mean_v, range), normalize_va(mean_a, range)}});
  }
  if (clamped > 0) {
    spdlog::warn("track '{}': {} segment(s) outside [{}, {}] were clamped", track_id, clamped,
                 range.lo, range.hi);
  }
  return out;
}

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "unknown";
}

std::size_t SplitAssignment::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(by_id.begin(), by_id.end(), [&](const auto& kv) { return kv.second == split; }));
}

std::vector<std::string> SplitAssignment::ids(Split split) const {
  std::vector<std::string> out;
  for (const auto& [id, s] : by_id) {
    if (s == split) out.push_back(id);
  }
  return out;
}

SplitAssignment split_dataset(std::span<const SplitItem> items, SplitRatios ratios,
                              std::uint64_t seed) {
  if (items.empty()) raise(ErrorCode::EmptyInput, "nothing to split");
  require(ratios.train > 0 && ratios.validation > 0 && ratios.test > 0,
          ErrorCode::PreconditionViolated, "split ratios must be positive");
  require(std::abs(ratios.train + ratios.validation + ratios.test - 1.0) <= 1e-9,
          ErrorCode::PreconditionViolated, "split ratios must sum to 1");

  std::set<std::string> seen;
  std::set<std::string> group_set;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) raise(ErrorCode::DuplicateId, "duplicate id '" + item.id + "'");
    group_set.insert(item.group);
  }
  std::vector<std::string> groups(group_set.begin(), group_set.end());

  std::mt19937_64 rng(seed);
  for (std::size_t i = groups.size(); i > 1; --i) {
    std::swap(groups[i - 1], groups[bounded(rng, i)]);
  }

  // Largest-remainder apportionment; ties go to the earlier split.
  const double n = static_cast<double>(groups.size());
  const std::array<double, 3> exact{ratios.train * n, ratios.validation * n, ratios.test * n};
  std::array<std::size_t, 3> sizes{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    sizes[s] = static_cast<std::size_t>(std::floor(exact[s] + 1e-9));
    assigned += sizes[s];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return exact[a] - static_cast<double>(sizes[a]) > exact[b] - static_cast<double>(sizes[b]);
  });
  for (std::size_t i = 0; assigned < groups.size(); i = (i + 1) % 3, ++assigned) ++sizes[order[i]];

  std::unordered_map<std::string, Split> group_split;
  std::size_t g = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t j = 0; j < sizes[s]; ++j, ++g) group_split[groups[g]] = static_cast<Split>(s);
  }

  SplitAssignment out;
  for (const auto& item : items) out.by_id.emplace(item.id, group_split.at(item.group));
  return out;
}

SplitAssignment split_dataset(std::span<const std::string> ids, SplitRatios ratios,
                              std::uint64_t seed) {
  std::vector<SplitItem> items;
  items.reserve(ids.size());
  for (const auto& id : ids) items.push_back({id, id});
  return split_dataset(items, ratios, seed);
}

}  // namespace mesa::corpus
