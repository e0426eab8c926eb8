#include "mesa/backends/http_backends.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <semaphore>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "mesa/error.hpp"

namespace mesa::backends {
namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

enum class Outcome { Ok, Retryable, Fatal };

}  // namespace

struct HttpTransport::Impl {
  Endpoint endpoint;
  std::counting_semaphore<> slots;
  std::mutex rng_mutex;
  std::mt19937_64 rng{std::random_device{}()};

  explicit Impl(const BackendConfig& cfg)
      : endpoint(split_endpoint(cfg.endpoint)),
        slots(static_cast<std::ptrdiff_t>(cfg.max_concurrent_requests)) {}

  std::chrono::milliseconds backoff(int base_ms, int attempt) {
    const double cap = static_cast<double>(base_ms) * std::pow(2.0, attempt);
    std::lock_guard lock(rng_mutex);
    std::uniform_real_distribution<double> jitter(0.0, cap);
    return std::chrono::milliseconds(static_cast<long long>(jitter(rng)));
  }
};

HttpTransport::HttpTransport(BackendConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {
  config_.validate();
}

HttpTransport::~HttpTransport() = default;

nlohmann::json HttpTransport::post(const nlohmann::ordered_json& body) {
  const auto kind = to_string(config_.kind);
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (!config_.token_env.empty()) {
    if (const char* token = std::getenv(config_.token_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    } else {
      spdlog::warn("{} backend: token variable {} is not set", kind, config_.token_env);
    }
  }
  const auto timeout = std::chrono::milliseconds(config_.timeout_ms);

  ErrorCode last_code = ErrorCode::BackendUnavailable;
  std::string last_message;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      ++retries_;
      const auto wait = impl_->backoff(config_.backoff_base_ms, attempt - 1);
      spdlog::info("{} backend: retry {}/{} after {} ms ({})", kind, attempt, config_.max_retries,
                   wait.count(), last_message);
      std::this_thread::sleep_for(wait);
    }

    Outcome outcome = Outcome::Ok;
    nlohmann::json parsed;
    {
      impl_->slots.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{impl_->slots};
      ++requests_;

      httplib::Client client(impl_->endpoint.base);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      const auto started = std::chrono::steady_clock::now();
      auto res = client.Post(impl_->endpoint.path, headers, payload, "application/json");
      const auto elapsed = std::chrono::steady_clock::now() - started;

      if (!res) {
        const bool timed_out = elapsed >= timeout * 9 / 10 ||
                               res.error() == httplib::Error::ConnectionTimeout;
        last_code = timed_out ? ErrorCode::Timeout : ErrorCode::BackendUnavailable;
        last_message = timed_out ? fmt::format("no response within {} ms", config_.timeout_ms)
                                 : fmt::format("transport error: {}", httplib::to_string(res.error()));
        outcome = Outcome::Retryable;
      } else {
        const int status = res->status;
        parsed = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_object() && parsed.value("rejected", false)) {
          raise(ErrorCode::ContentRejected,
                fmt::format("{} backend refused the request: {}", kind, parsed.value("reason", "no reason given")));
        }
        if (status >= 500) {
          last_code = ErrorCode::BackendUnavailable;
          last_message = fmt::format("HTTP {}", status);
          outcome = Outcome::Retryable;
        } else if (status >= 400) {
          raise(ErrorCode::BackendUnavailable, fmt::format("{} backend answered HTTP {}", kind, status));
        } else if (parsed.is_discarded()) {
          raise(ErrorCode::MalformedResponse, fmt::format("{} backend sent a non-JSON body", kind));
        }
      }
    }
    if (outcome == Outcome::Ok) return parsed;
  }
  raise(last_code, fmt::format("{} backend failed after {} attempt(s): {}", kind,
                               config_.max_retries + 1, last_message));
}

ChatResponse HttpChatBackend::chat(const ChatRequest& request) {
  return chat_response_from_wire(transport_.post(to_wire(request)));
}

EmbedResponse HttpEmbedBackend::embed(const EmbedRequest& request) {
  return embed_response_from_wire(transport_.post(to_wire(request)));
}

ImageResult HttpImageBackend::generate(const ImageRequest& request) {
  return image_result_from_wire(transport_.post(to_wire(request)), request.seed);
}

AestheticResponse HttpAestheticBackend::score(const AestheticRequest& request) {
  return aesthetic_response_from_wire(transport_.post(to_wire(request)));
}

}  // namespace mesa::backends
