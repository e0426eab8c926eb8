#include "mesa/app/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "mesa/error.hpp"

namespace mesa::app {

std::string_view to_string(BackendMode mode) noexcept {
  switch (mode) {
    case BackendMode::Http: return "http";
    case BackendMode::Mock: return "mock";
    case BackendMode::Rule: return "rule";
  }
  return "unknown";
}

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { raise(ErrorCode::InvalidConfig, what); }

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) invalid(fmt::format("unknown key '{}' in {}", key, where));
  }
}

fs::path resolve(const json& j, const char* key, const fs::path& base) {
  if (!j.contains(key)) return {};
  fs::path p = j.at(key).get<std::string>();
  return p.is_relative() ? (base / p).lexically_normal() : p;
}

SourceRange range(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) invalid("a range needs exactly two numbers");
  return {v[0], v[1]};
}

BackendSettings backend(const json& j, backends::BackendKind kind, BackendMode default_mode,
                        const std::string& where) {
  only_keys(j, {"mode", "endpoint", "token_env", "model", "timeout_ms", "max_retries", "max_concurrent_requests",
                "backoff_base_ms", "mock_dim"},
            where);
  BackendSettings s;
  s.mode = default_mode;
  s.http.kind = kind;
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "http") s.mode = BackendMode::Http;
    else if (m == "mock") s.mode = BackendMode::Mock;
    else if (m == "rule" && kind == backends::BackendKind::Chat) s.mode = BackendMode::Rule;
    else invalid(fmt::format("{}.mode '{}' is not supported", where, m));
  }
  s.http.endpoint = j.value("endpoint", "");
  s.http.token_env = j.value("token_env", "");
  s.http.model = j.value("model", "");
  s.http.timeout_ms = j.value("timeout_ms", s.http.timeout_ms);
  s.http.max_retries = j.value("max_retries", s.http.max_retries);
  s.http.max_concurrent_requests = j.value("max_concurrent_requests", s.http.max_concurrent_requests);
  s.http.backoff_base_ms = j.value("backoff_base_ms", s.http.backoff_base_ms);
  s.mock_dim = j.value("mock_dim", s.mock_dim);
  return s;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const fs::path& base) {
  RunConfig c;
  try {
    only_keys(j, {"seed", "paths", "backends", "ingest", "affect", "pipeline", "pairing", "metrics"}, "config");
    c.seed = j.value("seed", c.seed);

    const auto& p = j.at("paths");
    only_keys(p, {"annotations", "captions", "images", "music_embeddings", "image_embeddings", "lexicon", "templates",
                  "output_dir"},
              "paths");
    c.paths = {resolve(p, "annotations", base),      resolve(p, "captions", base),
               resolve(p, "images", base),           resolve(p, "music_embeddings", base),
               resolve(p, "image_embeddings", base), resolve(p, "lexicon", base),
               resolve(p, "templates", base),        resolve(p, "output_dir", base)};

    const auto b = j.value("backends", json::object());
    only_keys(b, {"chat", "embed", "image", "aesthetic"}, "backends");
    c.chat = backend(b.value("chat", json::object()), backends::BackendKind::Chat, BackendMode::Rule, "backends.chat");
    c.embed = backend(b.value("embed", json::object()), backends::BackendKind::Embed, BackendMode::Mock,
                      "backends.embed");
    c.image = backend(b.value("image", json::object()), backends::BackendKind::ImageGen, BackendMode::Mock,
                      "backends.image");
    c.aesthetic = backend(b.value("aesthetic", json::object()), backends::BackendKind::Aesthetic, BackendMode::Mock,
                          "backends.aesthetic");

    const auto in = j.value("ingest", json::object());
    only_keys(in, {"clip_ms", "music_range", "image_range", "split"}, "ingest");
    c.clip_ms = in.value("clip_ms", c.clip_ms);
    if (in.contains("music_range")) c.music_range = range(in.at("music_range"));
    if (in.contains("image_range")) c.image_range = range(in.at("image_range"));
    if (in.contains("split")) {
      const auto& s = in.at("split");
      only_keys(s, {"train", "validation", "test"}, "ingest.split");
      c.split = {s.value("train", c.split.train), s.value("validation", c.split.validation),
                 s.value("test", c.split.test)};
    }

    const auto af = j.value("affect", json::object());
    only_keys(af, {"lambda_grid"}, "affect");
    if (af.contains("lambda_grid")) c.lambda_grid = af.at("lambda_grid").get<std::vector<double>>();

    const auto pl = j.value("pipeline", json::object());
    only_keys(pl, {"k", "workers", "concurrent_agents", "rule_fallback", "generate_images", "model", "temperature",
                   "arousal_band_edges", "quadrant_threshold", "energy_tolerance", "energetic_arousal"},
              "pipeline");
    c.k = pl.value("k", c.k);
    c.workers = pl.value("workers", c.workers);
    c.concurrent_agents = pl.value("concurrent_agents", c.concurrent_agents);
    c.rule_fallback = pl.value("rule_fallback", c.rule_fallback);
    c.generate_images = pl.value("generate_images", c.generate_images);
    c.model = pl.value("model", c.model);
    c.temperature = pl.value("temperature", c.temperature);
    if (pl.contains("arousal_band_edges")) {
      const auto edges = pl.at("arousal_band_edges").get<std::vector<double>>();
      if (edges.size() != 4) invalid("pipeline.arousal_band_edges needs four values");
      std::copy(edges.begin(), edges.end(), c.tables.arousal_band_edges.begin());
    }
    c.tables.quadrant_threshold = pl.value("quadrant_threshold", c.tables.quadrant_threshold);
    c.tables.energy_tolerance = pl.value("energy_tolerance", c.tables.energy_tolerance);
    c.tables.energetic_arousal = pl.value("energetic_arousal", c.tables.energetic_arousal);

    const auto pr = j.value("pairing", json::object());
    only_keys(pr, {"n_pairs", "min_similarity"}, "pairing");
    c.n_pairs = pr.value("n_pairs", c.n_pairs);
    c.min_similarity = pr.value("min_similarity", c.min_similarity);

    const auto m = j.value("metrics", json::object());
    only_keys(m, {"copy_rate", "clip_score", "copy_run_length", "va_mode", "sem_mode"}, "metrics");
    c.metrics.copy_rate = m.value("copy_rate", c.metrics.copy_rate);
    c.metrics.clip_score = m.value("clip_score", c.metrics.clip_score);
    c.metrics.copy_run_length = m.value("copy_run_length", c.metrics.copy_run_length);
    const auto mode = m.value("va_mode", std::string("l2"));
    if (mode == "l2") c.metrics.va_mode = metrics::VASimilarityMode::L2;
    else if (mode == "cosine") c.metrics.va_mode = metrics::VASimilarityMode::Cosine;
    else invalid("metrics.va_mode must be 'l2' or 'cosine'");
    const auto sem = m.value("sem_mode", std::string("text"));
    if (sem == "text") c.metrics.sem_mode = MetricToggles::SemanticSource::Text;
    else if (sem == "image") c.metrics.sem_mode = MetricToggles::SemanticSource::Image;
    else invalid("metrics.sem_mode must be 'text' or 'image'");
  } catch (const json::exception& e) {
    invalid(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(fmt::format("config {}: {}", path.string(), e.what()));
  }
  return from_json(j, fs::absolute(path).parent_path());
}

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) invalid(what);
  };
  check(!paths.output_dir.empty(), "paths.output_dir is required");
  for (const auto& [name, p] : std::vector<std::pair<std::string, fs::path>>{
           {"annotations", paths.annotations},
           {"captions", paths.captions},
           {"images", paths.images},
           {"music_embeddings", paths.music_embeddings},
           {"image_embeddings", paths.image_embeddings},
           {"lexicon", paths.lexicon},
           {"templates", paths.templates}}) {
    check(p.empty() || fs::exists(p), fmt::format("paths.{}: {} does not exist", name, p.string()));
  }
  check(clip_ms > 0, "ingest.clip_ms must be positive");
  check(music_range.hi > music_range.lo, "ingest.music_range must have lo < hi");
  check(image_range.hi > image_range.lo, "ingest.image_range must have lo < hi");
  check(split.train > 0 && split.validation > 0 && split.test > 0, "split ratios must be positive");
  check(std::abs(split.train + split.validation + split.test - 1.0) <= 1e-9, "split ratios must sum to 1");
  for (double l : lambda_grid) check(l >= 0, "affect.lambda_grid values must be >= 0");
  check(k >= 1 && k <= 64, "pipeline.k must be in [1, 64]");
  check(workers >= 1 && workers <= 256, "pipeline.workers must be in [1, 256]");
  check(temperature >= 0.0 && temperature <= 2.0, "pipeline.temperature must be in [0, 2]");
  const auto& e = tables.arousal_band_edges;
  check(e[0] > 0 && e[3] < 1 && e[0] < e[1] && e[1] < e[2] && e[2] < e[3],
        "pipeline.arousal_band_edges must increase strictly inside (0, 1)");
  check(tables.quadrant_threshold > 0 && tables.quadrant_threshold < 1, "pipeline.quadrant_threshold must be in (0, 1)");
  check(tables.energy_tolerance >= 0 && tables.energy_tolerance <= 4, "pipeline.energy_tolerance must be in [0, 4]");
  check(tables.energetic_arousal >= 0 && tables.energetic_arousal <= 1, "pipeline.energetic_arousal must be in [0, 1]");
  check(n_pairs >= 1, "pairing.n_pairs must be at least 1");
  check(min_similarity >= 0 && min_similarity <= 1, "pairing.min_similarity must be in [0, 1]");
  check(metrics.copy_run_length >= 1, "metrics.copy_run_length must be at least 1");
  for (const auto* s : {&chat, &embed, &image, &aesthetic}) {
    if (s->mode == BackendMode::Http) {
      try {
        s->http.validate();
      } catch (const Error& err) {
        invalid(fmt::format("backends.{}: {}", to_string(s->http.kind), err.what()));
      }
    }
    check(s->mock_dim >= 1, "mock_dim must be positive");
  }
}

void RunConfig::force_offline() {
  chat.mode = BackendMode::Rule;
  embed.mode = BackendMode::Mock;
  image.mode = BackendMode::Mock;
  aesthetic.mode = BackendMode::Mock;
}

bool offline_requested() {
  const char* v = std::getenv("MESA_OFFLINE");
  return v && *v && std::string_view(v) != "0";
}

}  // namespace mesa::app
