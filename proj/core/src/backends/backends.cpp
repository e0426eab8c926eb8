#include "mesa/backends/backends.hpp"

#include <fmt/format.h>

#include "mesa/error.hpp"

namespace mesa::backends {

ChatResponse chat(ChatBackend& backend, const ChatRequest& request) {
  require(!request.messages.empty(), ErrorCode::PreconditionViolated, "chat request has no messages");
  return backend.chat(request);
}

std::vector<EmbeddingVector> embed(EmbedBackend& backend, std::span<const std::string> inputs,
                                   Modality modality) {
  require(!inputs.empty(), ErrorCode::PreconditionViolated, "embedding batch is empty");
  EmbedRequest request{{inputs.begin(), inputs.end()}, modality};
  auto response = backend.embed(request);
  if (response.vectors.size() != inputs.size()) {
    raise(ErrorCode::MalformedResponse,
          fmt::format("asked for {} embeddings, received {}", inputs.size(), response.vectors.size()));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(inputs.size());
  const std::string tag = modality == Modality::Text ? "text" : "image";
  const auto dim = response.vectors.front().size();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (response.vectors[i].size() != dim) {
      raise(ErrorCode::DimensionMismatch, "embedding batch mixes dimensions");
    }
    out.push_back({inputs[i], tag, std::move(response.vectors[i])});
  }
  return out;
}

ImageResult generate_image(ImageBackend& backend, const std::string& prompt, std::int64_t seed,
                           int width, int height) {
  require(!prompt.empty(), ErrorCode::PreconditionViolated, "image prompt is empty");
  if (prompt.size() > kMaxPromptChars) {
    raise(ErrorCode::PreconditionViolated,
          fmt::format("prompt has {} chars, limit is {}", prompt.size(), kMaxPromptChars));
  }
  require(width > 0 && height > 0, ErrorCode::PreconditionViolated, "image size must be positive");
  return backend.generate({prompt, seed, width, height});
}

std::vector<double> aesthetic_score(AestheticBackend& backend, std::span<const std::string> image_refs) {
  require(!image_refs.empty(), ErrorCode::PreconditionViolated, "no images to score");
  auto response = backend.score({{image_refs.begin(), image_refs.end()}});
  if (response.scores.size() != image_refs.size()) {
    raise(ErrorCode::MalformedResponse,
          fmt::format("asked for {} scores, received {}", image_refs.size(), response.scores.size()));
  }
  return std::move(response.scores);
}

}  // namespace mesa::backends
