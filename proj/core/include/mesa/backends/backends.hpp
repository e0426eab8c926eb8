#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mesa/backends/wire.hpp"
#include "mesa/types.hpp"

namespace mesa::backends {

// Capability interfaces. Implementations are immutable after construction
// (apart from internal request limiting) and may be shared across threads.

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse chat(const ChatRequest& request) = 0;
  /// "http", "mock" or "rule"; recorded in pipeline provenance.
  virtual std::string_view name() const noexcept = 0;
};

class EmbedBackend {
 public:
  virtual ~EmbedBackend() = default;
  virtual EmbedResponse embed(const EmbedRequest& request) = 0;
};

class ImageBackend {
 public:
  virtual ~ImageBackend() = default;
  virtual ImageResult generate(const ImageRequest& request) = 0;
};

class AestheticBackend {
 public:
  virtual ~AestheticBackend() = default;
  virtual AestheticResponse score(const AestheticRequest& request) = 0;
};

// Checked entry points: enforce preconditions before any request is made and
// validate response shape after.

ChatResponse chat(ChatBackend& backend, const ChatRequest& request);

/// One vector per input in input order, all of one dimension.
std::vector<EmbeddingVector> embed(EmbedBackend& backend, std::span<const std::string> inputs,
                                   Modality modality);

/// Rejects prompts longer than kMaxPromptChars before contacting the backend.
ImageResult generate_image(ImageBackend& backend, const std::string& prompt, std::int64_t seed,
                           int width = 512, int height = 512);

/// One 0-10 score per image reference, in order.
std::vector<double> aesthetic_score(AestheticBackend& backend, std::span<const std::string> image_refs);

}  // namespace mesa::backends
