#include "mesa/corpus/loaders.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mesa/corpus/ingest.hpp"
#include "mesa/error.hpp"

namespace mesa::corpus {
namespace {

using nlohmann::json;

std::string trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return std::string(text.substr(first, last - first + 1));
}

[[noreturn]] void violation(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, fmt::format("line {}: {}", line, what), {line});
}

// Iterates non-blank, non-comment lines as parsed JSON objects.
template <typename Fn>
void for_each_object(std::istream& source, Fn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(source, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      violation(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) violation(line_no, "expected a JSON object");
    fn(obj, line_no);
  }
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) violation(line, fmt::format("'{}' must be a string", key));
  return it->get<std::string>();
}

double require_number(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) violation(line, fmt::format("'{}' must be a number", key));
  const double v = it->get<double>();
  if (!std::isfinite(v)) violation(line, fmt::format("'{}' must be finite", key));
  return v;
}

double normalize_logged(double value, SourceRange range, std::size_t line, const char* key) {
  if (value < range.lo || value > range.hi) {
    spdlog::warn("line {}: {}={} outside [{}, {}], clamped", line, key, value, range.lo, range.hi);
  }
  return normalize_va(value, range);
}

}  // namespace

const std::vector<std::string>& emotic_categories() {
  static const std::vector<std::string> labels{
      "Affection",     "Anger",       "Annoyance",  "Anticipation",    "Aversion",
      "Confidence",    "Disapproval", "Disconnection", "Disquietment", "Doubt/Confusion",
      "Embarrassment", "Engagement",  "Esteem",     "Excitement",      "Fatigue",
      "Fear",          "Happiness",   "Pain",       "Peace",           "Pleasure",
      "Sadness",       "Sensitivity", "Suffering",  "Surprise",        "Sympathy",
      "Yearning"};
  return labels;
}

std::vector<CaptionRecord> load_captions(std::istream& source, SourceRange range) {
  std::vector<CaptionRecord> out;
  std::set<std::string> ids;
  for_each_object(source, [&](const json& obj, std::size_t line) {
    CaptionRecord rec;
    rec.clip_id = require_string(obj, "clip_id", line);
    if (rec.clip_id.empty()) violation(line, "'clip_id' is empty");
    rec.caption = trim(require_string(obj, "caption", line));
    if (rec.caption.empty()) violation(line, "'caption' is empty");
    const bool has_v = obj.contains("valence");
    const bool has_a = obj.contains("arousal");
    if (has_v != has_a) violation(line, "'valence' and 'arousal' must appear together");
    if (has_v) {
      rec.va = VAPoint{normalize_logged(require_number(obj, "valence", line), range, line, "valence"),
                       normalize_logged(require_number(obj, "arousal", line), range, line, "arousal")};
    }
    if (!ids.insert(rec.clip_id).second) {
      throw Error(ErrorCode::DuplicateId, fmt::format("line {}: duplicate clip_id '{}'", line, rec.clip_id),
                  {line});
    }
    out.push_back(std::move(rec));
  });
  return out;
}

std::vector<ImageEmotionRecord> load_image_records(std::istream& source, SourceRange range,
                                                   const std::vector<std::string>& vocabulary) {
  const std::set<std::string> vocab(vocabulary.begin(), vocabulary.end());
  std::vector<ImageEmotionRecord> out;
  std::set<std::string> ids;
  for_each_object(source, [&](const json& obj, std::size_t line) {
    ImageEmotionRecord rec;
    rec.image_id = require_string(obj, "image_id", line);
    if (rec.image_id.empty()) violation(line, "'image_id' is empty");
    auto cats = obj.find("categories");
    if (cats == obj.end() || !cats->is_array()) violation(line, "'categories' must be an array");
    for (const auto& c : *cats) {
      if (!c.is_string()) violation(line, "'categories' entries must be strings");
      const auto label = c.get<std::string>();
      if (!vocab.contains(label)) violation(line, fmt::format("unknown category '{}'", label));
      rec.categories.insert(label);
    }
    rec.valence = normalize_logged(require_number(obj, "valence", line), range, line, "valence");
    rec.arousal = normalize_logged(require_number(obj, "arousal", line), range, line, "arousal");
    rec.dominance = normalize_logged(require_number(obj, "dominance", line), range, line, "dominance");
    if (!ids.insert(rec.image_id).second) {
      throw Error(ErrorCode::DuplicateId, fmt::format("line {}: duplicate image_id '{}'", line, rec.image_id),
                  {line});
    }
    out.push_back(std::move(rec));
  });
  return out;
}

EmbeddingTable load_embeddings(std::istream& source) {
  EmbeddingTable table;
  bool have_header = false;
  std::size_t expected = 0;
  std::size_t rows = 0;
  for_each_object(source, [&](const json& obj, std::size_t line) {
    if (!have_header) {
      auto dim = obj.find("dim");
      auto count = obj.find("count");
      if (dim == obj.end() || !dim->is_number_integer() || dim->get<long long>() <= 0) {
        violation(line, "header 'dim' must be a positive integer");
      }
      if (count == obj.end() || !count->is_number_integer() || count->get<long long>() < 0) {
        violation(line, "header 'count' must be a non-negative integer");
      }
      table.dim = dim->get<std::size_t>();
      table.modality = require_string(obj, "modality", line);
      expected = count->get<std::size_t>();
      have_header = true;
      return;
    }
    EmbeddingVector row;
    row.id = require_string(obj, "id", line);
    row.modality = table.modality;
    auto vec = obj.find("vec");
    if (vec == obj.end() || !vec->is_array()) violation(line, "'vec' must be an array");
    row.values.reserve(vec->size());
    for (const auto& v : *vec) {
      if (!v.is_number()) violation(line, "'vec' entries must be numbers");
      row.values.push_back(v.get<double>());
    }
    if (row.values.size() != table.dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("line {}: vector '{}' has {} values, header says {}", line, row.id,
                              row.values.size(), table.dim),
                  {line});
    }
    ++rows;
    auto id = row.id;
    if (!table.vectors.emplace(id, std::move(row)).second) {
      throw Error(ErrorCode::DuplicateId, fmt::format("line {}: duplicate id '{}'", line, id), {line});
    }
  });
  if (!have_header) raise(ErrorCode::SchemaViolation, "embedding file has no header line");
  if (rows != expected) {
    raise(ErrorCode::SchemaViolation,
          fmt::format("header declares {} vectors but file holds {}", expected, rows));
  }
  return table;
}

void write_embeddings(std::ostream& out, const std::string& modality,
                      const std::vector<EmbeddingVector>& rows) {
  require(!rows.empty(), ErrorCode::EmptyInput, "no embedding rows to write");
  const std::size_t dim = rows.front().dim();
  for (const auto& r : rows) {
    if (r.dim() != dim) raise(ErrorCode::DimensionMismatch, "rows of unequal dimension");
  }
  nlohmann::ordered_json header{{"dim", dim}, {"modality", modality}, {"count", rows.size()}};
  out << header.dump() << '\n';
  for (const auto& r : rows) {
    out << nlohmann::ordered_json{{"id", r.id}, {"vec", r.values}}.dump() << '\n';
  }
}

}  // namespace mesa::corpus
