#include "mesa/backends/wire.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mesa/error.hpp"

namespace mesa::backends {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::Chat: return "chat";
    case BackendKind::Embed: return "embed";
    case BackendKind::ImageGen: return "imagegen";
    case BackendKind::Aesthetic: return "aesthetic";
  }
  return "unknown";
}

void BackendConfig::validate() const {
  const auto name = to_string(kind);
  require(timeout_ms > 0, ErrorCode::InvalidConfig, fmt::format("{}: timeout_ms must be > 0", name));
  require(max_retries >= 0, ErrorCode::InvalidConfig, fmt::format("{}: max_retries must be >= 0", name));
  require(max_concurrent_requests >= 1, ErrorCode::InvalidConfig,
          fmt::format("{}: max_concurrent_requests must be >= 1", name));
  require(backoff_base_ms >= 0, ErrorCode::InvalidConfig, fmt::format("{}: backoff_base_ms must be >= 0", name));
  require(endpoint.starts_with("http://") || endpoint.starts_with("https://"), ErrorCode::InvalidConfig,
          fmt::format("{}: endpoint must be an http(s) URL", name));
}

ordered_json to_wire(const ChatRequest& r) {
  ordered_json messages = ordered_json::array();
  for (const auto& m : r.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  ordered_json body{{"model", r.model}, {"messages", std::move(messages)}, {"temperature", r.temperature}};
  if (r.seed) body["seed"] = *r.seed;
  return body;
}

ordered_json to_wire(const EmbedRequest& r) {
  return {{"inputs", r.inputs}, {"modality", r.modality == Modality::Text ? "text" : "image"}};
}

ordered_json to_wire(const ImageRequest& r) {
  return {{"prompt", r.prompt}, {"seed", r.seed}, {"width", r.width}, {"height", r.height}};
}

ordered_json to_wire(const AestheticRequest& r) { return {{"image_refs", r.image_refs}}; }

namespace {

[[noreturn]] void malformed(const std::string& what) { raise(ErrorCode::MalformedResponse, what); }

const json& field(const json& body, const char* key) {
  if (!body.is_object()) malformed("response body is not a JSON object");
  auto it = body.find(key);
  if (it == body.end()) malformed(fmt::format("response lacks '{}'", key));
  return *it;
}

}  // namespace

ChatResponse chat_response_from_wire(const json& body) {
  const auto& text = field(body, "text");
  if (!text.is_string()) malformed("'text' must be a string");
  return {text.get<std::string>()};
}

EmbedResponse embed_response_from_wire(const json& body) {
  const auto& dim = field(body, "dim");
  const auto& vectors = field(body, "vectors");
  if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) malformed("'dim' must be a positive integer");
  if (!vectors.is_array()) malformed("'vectors' must be an array");
  EmbedResponse out;
  out.dim = dim.get<std::size_t>();
  for (const auto& v : vectors) {
    if (!v.is_array()) malformed("each vector must be an array");
    std::vector<double> values;
    values.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) malformed("vector entries must be numbers");
      values.push_back(x.get<double>());
    }
    if (values.size() != out.dim) {
      raise(ErrorCode::DimensionMismatch,
            fmt::format("server declared dim {} but sent a vector of {}", out.dim, values.size()));
    }
    out.vectors.push_back(std::move(values));
  }
  return out;
}

ImageResult image_result_from_wire(const json& body, std::int64_t seed) {
  const auto& id = field(body, "image_id");
  const auto& where = field(body, "url_or_path");
  if (!id.is_string() || !where.is_string()) malformed("'image_id' and 'url_or_path' must be strings");
  return {id.get<std::string>(), where.get<std::string>(), seed};
}

AestheticResponse aesthetic_response_from_wire(const json& body) {
  const auto& scores = field(body, "scores");
  if (!scores.is_array()) malformed("'scores' must be an array");
  AestheticResponse out;
  for (const auto& s : scores) {
    if (!s.is_number()) malformed("scores must be numbers");
    const double v = s.get<double>();
    if (!std::isfinite(v) || v < 0.0 || v > 10.0) malformed(fmt::format("score {} outside [0, 10]", v));
    out.scores.push_back(v);
  }
  return out;
}

ordered_json to_json(const ImageResult& r) {
  return {{"image_id", r.image_id}, {"url_or_path", r.url_or_path}, {"seed", r.seed}};
}

ImageResult image_result_from_json(const json& j) {
  try {
    return {j.at("image_id").get<std::string>(), j.at("url_or_path").get<std::string>(),
            j.at("seed").get<std::int64_t>()};
  } catch (const json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("image ref: ") + e.what());
  }
}

}  // namespace mesa::backends
