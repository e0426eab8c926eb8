#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "mesa/agents/lexicon.hpp"
#include "mesa/backends/http_backends.hpp"
#include "mesa/backends/mock_backends.hpp"
#include "mesa/backends/rule_backend.hpp"
#include "mesa/error.hpp"
#include "support/mock_server.hpp"
#include "support/test_support.hpp"

using namespace mesa;
using namespace mesa::backends;
using testing_support::MockServer;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

BackendConfig config_for(const MockServer& s, BackendKind kind = BackendKind::Chat) {
  BackendConfig c;
  c.kind = kind;
  c.endpoint = s.url("/v1");
  c.timeout_ms = 2000;
  c.max_retries = 0;
  c.backoff_base_ms = 1;
  return c;
}

ChatRequest hello() { return {"m", {{"user", "hello"}}, 0.0, std::nullopt}; }

}  // namespace

TEST(Wire, ChatSchema) {
  ChatRequest r{"m", {{"system", "s"}, {"user", "u"}}, 0.5, 42};
  EXPECT_EQ(to_wire(r).dump(),
            R"({"model":"m","messages":[{"role":"system","content":"s"},{"role":"user","content":"u"}],"temperature":0.5,"seed":42})");
  r.seed.reset();
  EXPECT_FALSE(to_wire(r).contains("seed"));
  EXPECT_EQ(to_wire(EmbedRequest{{"a"}, Modality::Image}).dump(), R"({"inputs":["a"],"modality":"image"})");
  EXPECT_EQ(to_wire(ImageRequest{"p", 3, 64, 32}).dump(), R"({"prompt":"p","seed":3,"width":64,"height":32})");
  EXPECT_EQ(to_wire(AestheticRequest{{"x"}}).dump(), R"({"image_refs":["x"]})");
}

TEST(Wire, ResponseValidation) {
  EXPECT_EQ(code_of([] { chat_response_from_wire({{"txt", "x"}}); }), ErrorCode::MalformedResponse);
  EXPECT_EQ(code_of([] { embed_response_from_wire(nlohmann::json::parse(R"({"dim":2,"vectors":[[1,2],[3]]})")); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { aesthetic_response_from_wire({{"scores", "nope"}}); }), ErrorCode::MalformedResponse);
}

TEST(Config, Invariants) {
  BackendConfig c;
  c.endpoint = "http://x";
  c.timeout_ms = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
  c.timeout_ms = 1;
  c.max_concurrent_requests = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
  c.max_concurrent_requests = 1;
  c.max_retries = -1;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
}

// Each injected fault maps to its own error code.
TEST(Http, FaultMatrix) {
  MockServer server;
  server.on("/v1", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"text":"ok"})", "application/json");
  });
  server.on("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    res.set_content(R"({"text":"late"})", "application/json");
  });
  server.on("/down", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("busy", "text/plain");
  });
  server.on("/garbled", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{not json", "application/json");
  });
  server.on("/refuse", [](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content(R"({"rejected":true,"reason":"policy"})", "application/json");
  });
  server.start();

  auto cfg = config_for(server);
  EXPECT_EQ(HttpChatBackend(cfg).chat(hello()).text, "ok");

  cfg.endpoint = server.url("/slow");
  cfg.timeout_ms = 200;
  EXPECT_EQ(code_of([&] { HttpChatBackend(cfg).chat(hello()); }), ErrorCode::Timeout);

  cfg = config_for(server);
  cfg.endpoint = server.url("/down");
  cfg.max_retries = 2;
  HttpChatBackend down(cfg);
  EXPECT_EQ(code_of([&] { down.chat(hello()); }), ErrorCode::BackendUnavailable);
  EXPECT_EQ(down.transport().retries(), 2u);

  cfg = config_for(server);
  cfg.endpoint = server.url("/garbled");
  EXPECT_EQ(code_of([&] { HttpChatBackend(cfg).chat(hello()); }), ErrorCode::MalformedResponse);

  cfg.endpoint = server.url("/refuse");
  cfg.kind = BackendKind::ImageGen;
  HttpImageBackend refuse(cfg);
  EXPECT_EQ(code_of([&] { generate_image(refuse, "a cat", 1); }), ErrorCode::ContentRejected);

  // Nothing listens on the closed port.
  cfg = config_for(server);
  cfg.endpoint = "http://127.0.0.1:1/v1";
  EXPECT_EQ(code_of([&] { HttpChatBackend(cfg).chat(hello()); }), ErrorCode::BackendUnavailable);
}

TEST(Http, RetriesThenSucceeds) {
  MockServer server;
  std::atomic<int> calls{0};
  server.on("/v1", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 500;
      return;
    }
    res.set_content(R"({"text":"third time"})", "application/json");
  });
  server.start();
  auto cfg = config_for(server);
  cfg.max_retries = 3;
  HttpChatBackend chat(cfg);
  EXPECT_EQ(chat.chat(hello()).text, "third time");
  EXPECT_EQ(chat.transport().retries(), 2u);
}

TEST(Http, ClientErrorsAreNotRetried) {
  MockServer server;
  std::atomic<int> calls{0};
  server.on("/v1", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 404;
  });
  server.start();
  auto cfg = config_for(server);
  cfg.max_retries = 3;
  EXPECT_EQ(code_of([&] { HttpChatBackend(cfg).chat(hello()); }), ErrorCode::BackendUnavailable);
  EXPECT_EQ(calls.load(), 1);
}

TEST(Http, MixedDimensionEmbedReply) {
  MockServer server;
  server.on("/v1", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"dim":2,"vectors":[[1,2],[1,2,3]]})", "application/json");
  });
  server.start();
  HttpEmbedBackend embedder(config_for(server, BackendKind::Embed));
  std::vector<std::string> inputs{"a", "b"};
  EXPECT_EQ(code_of([&] { embed(embedder, inputs, Modality::Text); }), ErrorCode::DimensionMismatch);
}

// 64 simultaneous requests through one client never exceed its limit.
TEST(Http, BoundedConcurrencyUnderBurst) {
  MockServer server;
  server.on("/v1", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(15));
    res.set_content(R"({"text":"ok"})", "application/json");
  });
  server.start();
  auto cfg = config_for(server);
  cfg.max_concurrent_requests = 3;
  HttpChatBackend chat(cfg);
  std::atomic<int> ok{0};
  std::vector<std::thread> burst;
  for (int i = 0; i < 64; ++i)
    burst.emplace_back([&] {
      if (chat.chat(hello()).text == "ok") ++ok;
    });
  for (auto& t : burst) t.join();
  EXPECT_EQ(ok.load(), 64);
  EXPECT_LE(server.peak_in_flight(), 3);
  EXPECT_GE(server.peak_in_flight(), 1);
}

TEST(Http, TokenNeverLeaks) {
  const std::string secret = "sk-test-5f1d0c9e-do-not-print";
  ::setenv("MESA_TEST_SECRET_TOKEN", secret.c_str(), 1);

  std::ostringstream logs;
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(logs);
  auto previous = spdlog::default_logger();
  auto logger = std::make_shared<spdlog::logger>("capture", sink);
  logger->set_level(spdlog::level::trace);
  spdlog::set_default_logger(logger);

  MockServer server;
  std::mutex m;
  std::string auth, body;
  std::atomic<int> calls{0};
  server.on("/v1", [&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(m);
      auth = req.get_header_value("Authorization");
      body = req.body;
    }
    if (calls++ == 0) {
      res.status = 502;
      return;
    }
    res.set_content(R"({"text":"ok"})", "application/json");
  });
  server.start();
  auto cfg = config_for(server);
  cfg.token_env = "MESA_TEST_SECRET_TOKEN";
  cfg.max_retries = 1;
  HttpChatBackend chat(cfg);
  chat.chat(hello());

  spdlog::set_default_logger(previous);
  ::unsetenv("MESA_TEST_SECRET_TOKEN");

  EXPECT_EQ(auth, "Bearer " + secret);
  EXPECT_EQ(body.find(secret), std::string::npos);
  EXPECT_EQ(to_wire(hello()).dump().find(secret), std::string::npos);
  EXPECT_NE(logs.str().find("retry"), std::string::npos) << "the retry should have been logged";
  EXPECT_EQ(logs.str().find(secret), std::string::npos);
}

TEST(Mock, Deterministic) {
  MockChatBackend a(3), b(3), c(4);
  EXPECT_EQ(a.chat(hello()).text, b.chat(hello()).text);
  EXPECT_NE(a.chat(hello()).text, c.chat(hello()).text);

  MockEmbedBackend e(1, 64);
  std::vector<std::string> batch{"red sky", "blue sea", "red sky"};
  auto v = embed(e, batch, Modality::Text);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].values, v[2].values);
  EXPECT_EQ(v[0].dim(), 64u);
  double norm = 0;
  for (double x : v[1].values) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
}

TEST(Mock, ImagePlaceholderAndScore) {
  const auto root = testing_support::scratch_dir("mock_image");
  MockImageBackend img(5, root);
  auto r1 = generate_image(img, "a fox in snow", 11, 16, 16);
  const auto bytes1 = testing_support::slurp(root / r1.url_or_path);
  auto r2 = generate_image(img, "a fox in snow", 11, 16, 16);
  EXPECT_EQ(r1.image_id, r2.image_id);
  EXPECT_EQ(bytes1, testing_support::slurp(root / r2.url_or_path));
  EXPECT_EQ(r1.seed, 11);

  MockAestheticBackend aes(5, root);
  std::vector<std::string> refs{r1.url_or_path, "missing.ppm"};
  auto s = aesthetic_score(aes, refs);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s, aesthetic_score(aes, refs));
  for (double x : s) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 10.0);
  }
  EXPECT_EQ(code_of([&] { generate_image(img, std::string(600, 'x'), 1); }), ErrorCode::PreconditionViolated);
  std::filesystem::remove_all(root);
}

TEST(Rule, RolesAndDeterminism) {
  auto lex = agents::Lexicon::load(testing_support::data_dir() / "lexicon.json");
  RuleChatBackend rule(lex);
  ChatRequest req{"", {{"user", "```input\nagent: scene\ncaption: a lone pianist in a rainy city at night\n"
                                "valence: 0.3\narousal: 0.2\nquadrant: Q3\n```"}}, 0.0, std::nullopt};
  const auto out = rule.chat(req).text;
  EXPECT_NE(out.find("pianist"), std::string::npos);
  EXPECT_EQ(out, rule.chat(req).text);

  req.messages[0].content = "```input\nagent: lyricist\ncaption: x\nvalence: 0.3\narousal: 0.2\n```";
  EXPECT_EQ(code_of([&] { rule.chat(req); }), ErrorCode::UnknownRole);
  req.messages[0].content = "no block";
  EXPECT_EQ(code_of([&] { rule.chat(req); }), ErrorCode::UnparseableOutput);
}
