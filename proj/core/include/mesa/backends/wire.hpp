#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mesa::backends {

enum class BackendKind { Chat, Embed, ImageGen, Aesthetic };

std::string_view to_string(BackendKind kind) noexcept;

/// Connection settings for one model service. `token_env` names the
/// environment variable holding the bearer token; the token itself is never
/// stored in configuration.
struct BackendConfig {
  BackendKind kind = BackendKind::Chat;
  std::string endpoint;
  std::string token_env;
  std::string model;
  int timeout_ms = 30000;
  int max_retries = 3;
  int max_concurrent_requests = 4;
  int backoff_base_ms = 250;

  void validate() const;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

struct ChatResponse {
  std::string text;
};

enum class Modality { Text, Image };

struct EmbedRequest {
  std::vector<std::string> inputs;
  Modality modality = Modality::Text;
};

struct EmbedResponse {
  std::size_t dim = 0;
  std::vector<std::vector<double>> vectors;
};

inline constexpr std::size_t kMaxPromptChars = 512;

struct ImageRequest {
  std::string prompt;
  std::int64_t seed = 0;
  int width = 512;
  int height = 512;
};

struct ImageResult {
  std::string image_id;
  std::string url_or_path;
  std::int64_t seed = 0;
};

struct AestheticRequest {
  std::vector<std::string> image_refs;
};

struct AestheticResponse {
  std::vector<double> scores;
};

// Request bodies, keys in documented order.
nlohmann::ordered_json to_wire(const ChatRequest& request);
nlohmann::ordered_json to_wire(const EmbedRequest& request);
nlohmann::ordered_json to_wire(const ImageRequest& request);
nlohmann::ordered_json to_wire(const AestheticRequest& request);

// Response validation; throws MalformedResponse or DimensionMismatch.
ChatResponse chat_response_from_wire(const nlohmann::json& body);
EmbedResponse embed_response_from_wire(const nlohmann::json& body);
ImageResult image_result_from_wire(const nlohmann::json& body, std::int64_t seed);
AestheticResponse aesthetic_response_from_wire(const nlohmann::json& body);

nlohmann::ordered_json to_json(const ImageResult& result);
ImageResult image_result_from_json(const nlohmann::json& j);

}  // namespace mesa::backends
