#pragma once

#include <atomic>
#include <cstdint>
#include <memory>

#include <nlohmann/json.hpp>

#include "mesa/backends/backends.hpp"

namespace mesa::backends {

/// JSON-over-HTTP POST with bounded concurrency, timeout, and retry.
///
/// Transport failures and 5xx responses are retried up to max_retries times
/// with exponential backoff (base backoff_base_ms, factor 2, full jitter).
/// 4xx responses are never retried. A body carrying `"rejected": true`
/// surfaces as ContentRejected regardless of status. The bearer token is read
/// from the environment at request time and never logged.
class HttpTransport {
 public:
  explicit HttpTransport(BackendConfig config);
  ~HttpTransport();
  HttpTransport(const HttpTransport&) = delete;
  HttpTransport& operator=(const HttpTransport&) = delete;

  nlohmann::json post(const nlohmann::ordered_json& body);

  const BackendConfig& config() const noexcept { return config_; }
  std::uint64_t retries() const noexcept { return retries_.load(); }
  std::uint64_t requests() const noexcept { return requests_.load(); }

 private:
  struct Impl;
  BackendConfig config_;
  std::unique_ptr<Impl> impl_;
  std::atomic<std::uint64_t> retries_{0};
  std::atomic<std::uint64_t> requests_{0};
};

class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(BackendConfig config) : transport_(std::move(config)) {}
  ChatResponse chat(const ChatRequest& request) override;
  std::string_view name() const noexcept override { return "http"; }
  const HttpTransport& transport() const noexcept { return transport_; }

 private:
  HttpTransport transport_;
};

class HttpEmbedBackend final : public EmbedBackend {
 public:
  explicit HttpEmbedBackend(BackendConfig config) : transport_(std::move(config)) {}
  EmbedResponse embed(const EmbedRequest& request) override;
  const HttpTransport& transport() const noexcept { return transport_; }

 private:
  HttpTransport transport_;
};

class HttpImageBackend final : public ImageBackend {
 public:
  explicit HttpImageBackend(BackendConfig config) : transport_(std::move(config)) {}
  ImageResult generate(const ImageRequest& request) override;
  const HttpTransport& transport() const noexcept { return transport_; }

 private:
  HttpTransport transport_;
};

class HttpAestheticBackend final : public AestheticBackend {
 public:
  explicit HttpAestheticBackend(BackendConfig config) : transport_(std::move(config)) {}
  AestheticResponse score(const AestheticRequest& request) override;
  const HttpTransport& transport() const noexcept { return transport_; }

 private:
  HttpTransport transport_;
};

}  // namespace mesa::backends
