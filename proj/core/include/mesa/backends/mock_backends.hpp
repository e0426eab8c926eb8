#pragma once

#include <cstdint>
#include <filesystem>

#include "mesa/backends/backends.hpp"

// Offline stand-ins. Each mock is a pure function of (request, seed), plus the
// bytes of files it wrote itself.

namespace mesa::backends {

class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(std::uint64_t seed) : seed_(seed) {}
  ChatResponse chat(const ChatRequest& request) override;
  std::string_view name() const noexcept override { return "mock"; }

 private:
  std::uint64_t seed_;
};

/// Feature-hashing embedder: each token expands to a pseudo-random vector,
/// the sum is unit-normalized. Texts sharing words land close together.
/// Image references that point at a placeholder written by MockImageBackend
/// embed the prompt recorded in that file, mixed with a hash of its bytes.
class MockEmbedBackend final : public EmbedBackend {
 public:
  explicit MockEmbedBackend(std::uint64_t seed, std::size_t dim = 64,
                            std::filesystem::path image_root = {})
      : seed_(seed), dim_(dim), image_root_(std::move(image_root)) {}
  EmbedResponse embed(const EmbedRequest& request) override;

  std::vector<double> embed_text(std::string_view text) const;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
  std::filesystem::path image_root_;
};

/// Writes a small deterministic PPM placeholder to `root/images/<id>.ppm` and
/// returns the root-relative path. With an empty root nothing is written.
class MockImageBackend final : public ImageBackend {
 public:
  explicit MockImageBackend(std::uint64_t seed, std::filesystem::path root = {})
      : seed_(seed), root_(std::move(root)) {}
  ImageResult generate(const ImageRequest& request) override;

 private:
  std::uint64_t seed_;
  std::filesystem::path root_;
};

/// Score in [3, 9) derived from the image file bytes (or the reference string
/// when the file cannot be read).
class MockAestheticBackend final : public AestheticBackend {
 public:
  explicit MockAestheticBackend(std::uint64_t seed, std::filesystem::path image_root = {})
      : seed_(seed), image_root_(std::move(image_root)) {}
  AestheticResponse score(const AestheticRequest& request) override;

 private:
  std::uint64_t seed_;
  std::filesystem::path image_root_;
};

}  // namespace mesa::backends
