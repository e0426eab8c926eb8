#include "mesa/app/commands.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mesa/app/run_dir.hpp"
#include "mesa/backends/http_backends.hpp"
#include "mesa/backends/mock_backends.hpp"
#include "mesa/backends/rule_backend.hpp"
#include "mesa/error.hpp"

namespace mesa::app {
namespace {

using nlohmann::ordered_json;

constexpr std::size_t kEmbedChunk = 64;

void require_path(const fs::path& p, const char* name) {
  require(!p.empty(), ErrorCode::InvalidConfig, fmt::format("paths.{} is required for this command", name));
}

/// Re-raises `e` with the file name in front, keeping code and line numbers.
[[noreturn]] void rethrow_with_file(const Error& e, const fs::path& file) {
  std::string msg = e.what();
  const auto colon = msg.find(": ");
  if (colon != std::string::npos) msg = msg.substr(colon + 2);
  std::string lines;
  for (auto l : e.lines()) lines += (lines.empty() ? " (line " : ", ") + std::to_string(l);
  if (!lines.empty()) lines += ")";
  throw Error(e.code(), fmt::format("{}{}: {}", file.string(), lines, msg), e.lines());
}

template <typename F>
auto with_file(const fs::path& file, F&& parse) {
  std::ifstream in(file, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + file.string());
  try {
    return parse(in);
  } catch (const Error& e) {
    rethrow_with_file(e, file);
  }
}

corpus::EmbeddingTable load_embedding_file(const fs::path& file) {
  return with_file(file, [](std::istream& in) { return corpus::load_embeddings(in); });
}

std::string jsonl(const std::vector<ordered_json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

std::uint64_t useed(const RunConfig& c) { return static_cast<std::uint64_t>(c.seed); }

affect::RegressionHead load_head_file(const fs::path& file) {
  return with_file(file, [](std::istream& in) { return affect::load_head(in); });
}

fs::path head_path(const RunConfig& c, affect::Side side) {
  return c.paths.output_dir / "models" / fmt::format("va_head_{}.model", affect::to_string(side));
}

std::vector<std::vector<double>> embed_all(backends::EmbedBackend& backend, const std::vector<std::string>& inputs,
                                           backends::Modality modality) {
  std::vector<std::vector<double>> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); i += kEmbedChunk) {
    const auto end = std::min(inputs.size(), i + kEmbedChunk);
    std::vector<std::string> chunk(inputs.begin() + static_cast<std::ptrdiff_t>(i),
                                   inputs.begin() + static_cast<std::ptrdiff_t>(end));
    for (auto& v : backends::embed(backend, chunk, modality)) out.push_back(std::move(v.values));
  }
  return out;
}

agents::PipelineConfig pipeline_config(const RunConfig& c) {
  agents::PipelineConfig p;
  p.k = c.k;
  p.seed = c.seed;
  p.concurrent_agents = c.concurrent_agents;
  p.rule_fallback = c.rule_fallback;
  p.generate_images = c.generate_images;
  p.model = c.model;
  p.temperature = c.temperature;
  p.tables = c.tables;
  return p;
}

struct PipelineAssets {
  agents::Lexicon lexicon;
  agents::TemplateSet templates;
  std::vector<corpus::CaptionRecord> captions;
  std::map<std::string, VAPoint> music_va;
};

/// Caption VA when the captions carry it, otherwise the music head's
/// prediction from the clip's embedding.
std::map<std::string, VAPoint> music_va_for(const RunConfig& c, const std::vector<corpus::CaptionRecord>& captions) {
  std::map<std::string, VAPoint> out;
  std::vector<const corpus::CaptionRecord*> missing;
  for (const auto& rec : captions) {
    if (rec.va) out[rec.clip_id] = *rec.va;
    else missing.push_back(&rec);
  }
  if (missing.empty()) return out;

  const auto model = head_path(c, affect::Side::Music);
  require(fs::exists(model) && !c.paths.music_embeddings.empty(), ErrorCode::InvalidConfig,
          fmt::format("{} captions have no VA; provide VA in the captions or run `train-va --side music` with "
                      "paths.music_embeddings set",
                      missing.size()));
  const auto head = load_head_file(model);
  const auto table = load_embedding_file(c.paths.music_embeddings);
  for (const auto* rec : missing) {
    auto it = table.vectors.find(rec->clip_id);
    require(it != table.vectors.end(), ErrorCode::InvalidConfig,
            fmt::format("clip {} has neither caption VA nor a music embedding", rec->clip_id));
    require(static_cast<Eigen::Index>(it->second.values.size()) == head.input_dim(), ErrorCode::DimensionMismatch,
            "music embeddings do not match the music head");
    out[rec->clip_id] = affect::predict(head, it->second.values);
  }
  return out;
}

PipelineAssets pipeline_assets(const RunConfig& c) {
  require_path(c.paths.captions, "captions");
  require_path(c.paths.lexicon, "lexicon");
  require_path(c.paths.templates, "templates");
  PipelineAssets a;
  a.lexicon = agents::Lexicon::load(c.paths.lexicon);
  a.templates = agents::TemplateSet::load(c.paths.templates);
  a.captions = with_file(c.paths.captions, [&](std::istream& in) { return corpus::load_captions(in, c.music_range); });
  a.music_va = music_va_for(c, a.captions);
  return a;
}

std::vector<agents::PipelineOutput> run_pipeline_into(const RunConfig& c, const PipelineAssets& a,
                                                      const std::set<agents::AgentRole>& dropped, const fs::path& dir) {
  auto set = make_backends(c, a.lexicon, dir);
  auto pc = pipeline_config(c);
  pc.dropped = dropped;
  std::vector<agents::AgentInput> inputs;
  for (const auto& rec : a.captions) inputs.push_back({rec.clip_id, rec.caption, a.music_va.at(rec.clip_id)});

  const agents::PipelineBackends pb{set.chat.get(), set.rule.get(), set.image.get()};
  auto outputs = agents::run_batch(inputs, pc, a.lexicon, a.templates, pb, c.workers);

  std::string lines;
  std::size_t fallbacks = 0;
  std::size_t substituted = 0;
  std::vector<fs::path> files{dir / "outputs.jsonl"};
  for (const auto& o : outputs) {
    lines += agents::to_jsonl(o) + "\n";
    for (const auto& agent : o.provenance.at("agents")) {
      if (agent.at("source") == "fallback") ++fallbacks;
      if (agent.at("substituted").get<bool>()) ++substituted;
    }
    for (const auto& img : o.image_refs) {
      if (fs::path(img.url_or_path).is_relative() && fs::exists(dir / img.url_or_path)) {
        files.push_back(dir / img.url_or_path);
      }
    }
  }
  write_file(dir / "outputs.jsonl", lines);
  std::sort(files.begin() + 1, files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  std::size_t prompts = 0;
  for (const auto& o : outputs) prompts += o.prompt_set.prompts.size();
  ordered_json manifest{{"records", outputs.size()},
                        {"prompts", prompts},
                        {"fallback_agents", fallbacks},
                        {"substituted_agents", substituted},
                        {"files", checksum_manifest(dir, files)}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  spdlog::info("pipeline: {} records, {} prompts -> {}", outputs.size(), prompts, dir.string());
  return outputs;
}

std::vector<agents::PipelineOutput> read_outputs(const fs::path& file) {
  require(fs::exists(file), ErrorCode::InvalidConfig, fmt::format("{} not found; run `mesa pipeline` first", file.string()));
  std::vector<agents::PipelineOutput> out;
  std::istringstream in(read_file(file));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(agents::pipeline_output_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, fmt::format("{} line {}: {}", file.string(), n, e.what()), {n});
    }
  }
  return out;
}

metrics::MetricsReport evaluate_outputs(const RunConfig& c, const PipelineAssets& a,
                                        const std::vector<agents::PipelineOutput>& outputs, const fs::path& image_root) {
  require(!outputs.empty(), ErrorCode::EmptyCorpus, "no pipeline outputs to evaluate");
  std::map<std::string, std::string> caption_of;
  for (const auto& rec : a.captions) caption_of[rec.clip_id] = rec.caption;

  auto set = make_backends(c, a.lexicon, image_root);
  metrics::MetricsInputs in;
  in.with_copy_rate = c.metrics.copy_rate;
  in.copy_run_length = c.metrics.copy_run_length;
  in.va_mode = c.metrics.va_mode;

  std::vector<std::string> references;
  std::vector<std::string> image_refs;
  for (const auto& o : outputs) {
    auto it = caption_of.find(o.clip_id);
    require(it != caption_of.end(), ErrorCode::SchemaViolation,
            fmt::format("output {} has no caption in {}", o.clip_id, c.paths.captions.string()));
    in.categories.push_back(o.bundle.scene.category);
    require(o.image_refs.empty() || o.image_refs.size() == o.prompt_set.prompts.size(), ErrorCode::SchemaViolation,
            fmt::format("output {} has {} images for {} prompts", o.clip_id, o.image_refs.size(),
                        o.prompt_set.prompts.size()));
    for (std::size_t i = 0; i < o.prompt_set.prompts.size(); ++i) {
      in.prompts.push_back(o.prompt_set.prompts[i]);
      in.prompt_reference.emplace_back(o.prompt_set.prompts[i], it->second);
      references.push_back(it->second);
      if (!o.image_refs.empty()) {
        image_refs.push_back(o.image_refs[i].url_or_path);
        in.music_va.push_back(a.music_va.at(o.clip_id));
      }
    }
  }
  require(!image_refs.empty(), ErrorCode::InvalidConfig,
          "outputs carry no images; evaluation needs pipeline.generate_images = true");

  const auto prompt_vecs = embed_all(*set.embed, in.prompts, backends::Modality::Text);
  const auto image_vecs = embed_all(*set.embed, image_refs, backends::Modality::Image);
  in.semantic.first = c.metrics.sem_mode == MetricToggles::SemanticSource::Image ? image_vecs : prompt_vecs;
  in.semantic.second = embed_all(*set.embed, references, backends::Modality::Text);

  const auto model = head_path(c, affect::Side::Image);
  require(fs::exists(model), ErrorCode::InvalidConfig,
          fmt::format("{} not found; run `mesa train-va --side image` first", model.string()));
  const auto head = load_head_file(model);
  for (const auto& v : image_vecs) {
    require(static_cast<Eigen::Index>(v.size()) == head.input_dim(), ErrorCode::DimensionMismatch,
            fmt::format("image embeddings have dim {}, image head expects {}", v.size(), head.input_dim()));
    in.image_va.push_back(affect::predict(head, v));
  }
  in.aesthetic_scores = backends::aesthetic_score(*set.aesthetic, image_refs);
  if (c.metrics.clip_score) in.clip = metrics::EmbeddingPairs{image_vecs, prompt_vecs};
  return metrics::build_report(in);
}

const std::vector<std::pair<std::string, agents::AgentRole>>& ablatable() {
  static const std::vector<std::pair<std::string, agents::AgentRole>> list{
      {"verb", agents::AgentRole::Verb},
      {"composition", agents::AgentRole::Composition},
      {"color", agents::AgentRole::Color},
      {"style", agents::AgentRole::Style}};
  return list;
}

std::string row_name(const std::string& agent) {
  std::string name = agent;
  name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  return "w/o " + name;
}

std::string dimension_row(const char* name, const affect::DimensionMetrics& d) {
  return fmt::format("{}: rmse {:.4f} mae {:.4f} pearson {:.4f} spearman {:.4f} ccc {:.4f} r2 {:.4f}", name, d.rmse,
                     d.mae, d.pearson, d.spearman, d.ccc, d.r2);
}

}  // namespace

Corpora load_corpora(const RunConfig& c) {
  Corpora out;
  if (!c.paths.annotations.empty()) {
    const auto tracks = with_file(c.paths.annotations, [](std::istream& in) { return corpus::parse_annotation_csv(in); });
    out.tracks = tracks.size();
    std::vector<corpus::SplitItem> items;
    for (const auto& t : tracks) {
      try {
        for (auto& seg : corpus::segment_track(t.track_id, t.frames, c.clip_ms, c.music_range)) {
          items.push_back({seg.clip_id(), seg.track_id});
          out.segments.push_back(std::move(seg));
        }
      } catch (const Error& e) {
        rethrow_with_file(e, c.paths.annotations);
      }
    }
    if (!items.empty()) out.music_split = corpus::split_dataset(items, c.split, useed(c));
  }
  if (!c.paths.captions.empty()) {
    out.captions = with_file(c.paths.captions, [&](std::istream& in) { return corpus::load_captions(in, c.music_range); });
  }
  if (!c.paths.images.empty()) {
    out.images = with_file(c.paths.images, [&](std::istream& in) { return corpus::load_image_records(in, c.image_range); });
    std::vector<std::string> ids;
    for (const auto& r : out.images) ids.push_back(r.image_id);
    if (!ids.empty()) out.image_split = corpus::split_dataset(std::span<const std::string>(ids), c.split, useed(c));
  }
  return out;
}

BackendSet make_backends(const RunConfig& c, const agents::Lexicon& lexicon, const fs::path& image_root) {
  BackendSet set;
  set.rule = std::make_unique<backends::RuleChatBackend>(lexicon, c.tables);
  switch (c.chat.mode) {
    case BackendMode::Http: set.chat = std::make_unique<backends::HttpChatBackend>(c.chat.http); break;
    case BackendMode::Mock: set.chat = std::make_unique<backends::MockChatBackend>(useed(c)); break;
    case BackendMode::Rule: set.chat = std::make_unique<backends::RuleChatBackend>(lexicon, c.tables); break;
  }
  if (c.embed.mode == BackendMode::Http) set.embed = std::make_unique<backends::HttpEmbedBackend>(c.embed.http);
  else set.embed = std::make_unique<backends::MockEmbedBackend>(useed(c), c.embed.mock_dim, image_root);
  if (c.image.mode == BackendMode::Http) set.image = std::make_unique<backends::HttpImageBackend>(c.image.http);
  else set.image = std::make_unique<backends::MockImageBackend>(useed(c), image_root);
  if (c.aesthetic.mode == BackendMode::Http) {
    set.aesthetic = std::make_unique<backends::HttpAestheticBackend>(c.aesthetic.http);
  } else {
    set.aesthetic = std::make_unique<backends::MockAestheticBackend>(useed(c), image_root);
  }
  return set;
}

ordered_json cmd_ingest(const RunConfig& c) {
  c.validate();
  require_path(c.paths.annotations, "annotations");
  const auto corpora = load_corpora(c);
  RunDirLock lock(c.paths.output_dir);
  const auto dir = c.paths.output_dir / "ingest";

  std::vector<ordered_json> rows;
  for (const auto& s : corpora.segments) {
    rows.push_back({{"clip_id", s.clip_id()},
                    {"track_id", s.track_id},
                    {"segment_index", s.segment_index},
                    {"start_ms", s.start_ms},
                    {"end_ms", s.end_ms},
                    {"valence", s.va.valence},
                    {"arousal", s.va.arousal},
                    {"split", std::string(corpus::to_string(corpora.music_split.by_id.at(s.clip_id())))}});
  }
  std::vector<fs::path> files{dir / "segments.jsonl"};
  write_file(files.back(), jsonl(rows));

  ordered_json counts{{"tracks", corpora.tracks},
                      {"segments", corpora.segments.size()},
                      {"train", corpora.music_split.count(corpus::Split::Train)},
                      {"validation", corpora.music_split.count(corpus::Split::Validation)},
                      {"test", corpora.music_split.count(corpus::Split::Test)}};
  if (!c.paths.captions.empty()) {
    rows.clear();
    for (const auto& r : corpora.captions) {
      ordered_json j{{"clip_id", r.clip_id}, {"caption", r.caption}};
      if (r.va) {
        j["valence"] = r.va->valence;
        j["arousal"] = r.va->arousal;
      }
      rows.push_back(std::move(j));
    }
    files.push_back(dir / "captions.jsonl");
    write_file(files.back(), jsonl(rows));
    counts["captions"] = corpora.captions.size();
  }
  if (!c.paths.images.empty()) {
    rows.clear();
    for (const auto& r : corpora.images) {
      rows.push_back({{"image_id", r.image_id},
                      {"categories", r.categories},
                      {"valence", r.valence},
                      {"arousal", r.arousal},
                      {"dominance", r.dominance},
                      {"split", std::string(corpus::to_string(corpora.image_split.by_id.at(r.image_id)))}});
    }
    files.push_back(dir / "images.jsonl");
    write_file(files.back(), jsonl(rows));
    counts["images"] = corpora.images.size();
    counts["image_train"] = corpora.image_split.count(corpus::Split::Train);
    counts["image_validation"] = corpora.image_split.count(corpus::Split::Validation);
    counts["image_test"] = corpora.image_split.count(corpus::Split::Test);
  }
  ordered_json manifest{{"seed", c.seed},
                        {"clip_ms", c.clip_ms},
                        {"counts", counts},
                        {"files", checksum_manifest(dir, files)}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  spdlog::info("ingest: {} tracks, {} segments", corpora.tracks, corpora.segments.size());
  return manifest;
}

TrainResult cmd_train_va(const RunConfig& c, affect::Side side) {
  c.validate();
  const bool music = side == affect::Side::Music;
  if (music) {
    require_path(c.paths.annotations, "annotations");
    require_path(c.paths.music_embeddings, "music_embeddings");
  } else {
    require_path(c.paths.images, "images");
    require_path(c.paths.image_embeddings, "image_embeddings");
  }
  const auto corpora = load_corpora(c);
  const auto table = load_embedding_file(music ? c.paths.music_embeddings : c.paths.image_embeddings);

  // (id, va, split) in id order.
  struct Row {
    std::string id;
    VAPoint va;
    corpus::Split split;
  };
  std::vector<Row> rows;
  if (music) {
    for (const auto& s : corpora.segments) rows.push_back({s.clip_id(), s.va, corpora.music_split.by_id.at(s.clip_id())});
  } else {
    for (const auto& r : corpora.images) rows.push_back({r.image_id, r.va(), corpora.image_split.by_id.at(r.image_id)});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
  std::size_t skipped = 0;
  std::array<std::vector<const Row*>, 3> by_split;
  for (const auto& r : rows) {
    if (!table.vectors.contains(r.id)) {
      ++skipped;
      continue;
    }
    by_split[static_cast<std::size_t>(r.split)].push_back(&r);
  }
  if (skipped) spdlog::warn("train-va: {} records have no embedding and are skipped", skipped);

  auto matrices = [&](corpus::Split s) {
    const auto& list = by_split[static_cast<std::size_t>(s)];
    require(list.size() >= 2, ErrorCode::EmptyInput,
            fmt::format("{} split has {} rows with embeddings; need at least 2", corpus::to_string(s), list.size()));
    Eigen::MatrixXd X(static_cast<Eigen::Index>(list.size()), static_cast<Eigen::Index>(table.dim));
    Eigen::MatrixXd Y(static_cast<Eigen::Index>(list.size()), 2);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& v = table.vectors.at(list[i]->id).values;
      for (std::size_t d = 0; d < table.dim; ++d) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = v[d];
      Y(static_cast<Eigen::Index>(i), 0) = list[i]->va.valence;
      Y(static_cast<Eigen::Index>(i), 1) = list[i]->va.arousal;
    }
    return std::pair{X, Y};
  };
  const auto [Xtr, Ytr] = matrices(corpus::Split::Train);
  const auto [Xva, Yva] = matrices(corpus::Split::Validation);
  const auto [Xte, Yte] = matrices(corpus::Split::Test);

  RunDirLock lock(c.paths.output_dir);
  const auto grid = c.lambda_grid.empty() ? affect::default_lambda_grid() : c.lambda_grid;
  auto selection = affect::select_lambda(Xtr, Ytr, Xva, Yva, grid, side);

  TrainResult result;
  result.head = std::move(selection.head);
  result.validation_rmse = std::move(selection.validation_rmse);
  result.test = affect::evaluate(result.head, Xte, Yte);
  result.n_train = static_cast<std::size_t>(Xtr.rows());
  result.n_validation = static_cast<std::size_t>(Xva.rows());
  result.n_test = static_cast<std::size_t>(Xte.rows());

  std::ostringstream model;
  affect::save_head(model, result.head);
  const auto path = head_path(c, side);
  write_file(path, model.str());

  ordered_json curve = ordered_json::array();
  for (const auto& [l, r] : result.validation_rmse) curve.push_back({{"lambda", l}, {"mean_rmse", r}});
  ordered_json summary{{"side", std::string(affect::to_string(side))},
                       {"lambda", result.head.lambda},
                       {"dim", table.dim},
                       {"n_train", result.n_train},
                       {"n_validation", result.n_validation},
                       {"n_test", result.n_test},
                       {"validation_curve", curve},
                       {"test", metrics::to_json(result.test)},
                       {"model_sha256", sha256_hex(model.str())}};
  auto json_path = path;
  json_path.replace_extension(".json");
  write_file(json_path, summary.dump(2) + "\n");
  auto table_path = path;
  table_path.replace_extension(".md");
  write_file(table_path, metrics::render_regression_table(result.test));
  spdlog::info("train-va {}: lambda {}, {}", affect::to_string(side), result.head.lambda,
               dimension_row("valence", result.test.valence));
  return result;
}

std::vector<agents::PipelineOutput> cmd_pipeline(const RunConfig& c) {
  c.validate();
  const auto assets = pipeline_assets(c);
  RunDirLock lock(c.paths.output_dir);
  return run_pipeline_into(c, assets, {}, c.paths.output_dir / "pipeline");
}

metrics::MetricsReport cmd_evaluate(const RunConfig& c) {
  c.validate();
  const auto assets = pipeline_assets(c);
  const auto dir = c.paths.output_dir / "pipeline";
  const auto outputs = read_outputs(dir / "outputs.jsonl");
  RunDirLock lock(c.paths.output_dir);
  const auto report = evaluate_outputs(c, assets, outputs, dir);
  write_file(c.paths.output_dir / "eval" / "report.json", metrics::to_json(report).dump(2) + "\n");
  write_file(c.paths.output_dir / "eval" / "table.md", metrics::render_metrics_table({{"Ours", report}}));
  return report;
}

std::vector<AblationRow> cmd_ablate(const RunConfig& c, const std::string& drop) {
  std::vector<std::pair<std::string, agents::AgentRole>> variants;
  for (const auto& entry : ablatable()) {
    if (drop == "all" || drop == entry.first) variants.push_back(entry);
  }
  if (variants.empty()) {
    raise(ErrorCode::UnknownAgent,
          fmt::format("cannot drop '{}'; choose verb, composition, color, style or all", drop));
  }
  c.validate();
  const auto assets = pipeline_assets(c);
  RunDirLock lock(c.paths.output_dir);
  const auto root = c.paths.output_dir / "ablate";

  std::vector<AblationRow> rows;
  auto run = [&](const std::string& dir_name, const std::string& row, const std::set<agents::AgentRole>& dropped) {
    const auto dir = root / dir_name;
    const auto outputs = run_pipeline_into(c, assets, dropped, dir);
    auto report = evaluate_outputs(c, assets, outputs, dir);
    write_file(dir / "report.json", metrics::to_json(report).dump(2) + "\n");
    rows.push_back({row, report});
  };
  run("full", "Ours", {});
  for (const auto& [name, role] : variants) run("no_" + name, row_name(name), {role});

  std::vector<std::pair<std::string, metrics::MetricsReport>> table;
  for (const auto& r : rows) table.emplace_back(r.name, r.report);
  write_file(root / (drop == "all" ? "table.md" : fmt::format("table_{}.md", drop)), metrics::render_metrics_table(table));
  return rows;
}

pairing::PairingResult cmd_pair(const RunConfig& c) {
  c.validate();
  require_path(c.paths.annotations, "annotations");
  require_path(c.paths.images, "images");
  const auto corpora = load_corpora(c);

  // Benchmark pairs come from the held-out test splits only.
  std::vector<pairing::MusicPoint> music;
  for (const auto& s : corpora.segments) {
    if (corpora.music_split.by_id.at(s.clip_id()) == corpus::Split::Test) music.push_back({s.clip_id(), s.va});
  }
  std::vector<pairing::ImagePoint> images;
  for (const auto& r : corpora.images) {
    if (corpora.image_split.by_id.at(r.image_id) == corpus::Split::Test) images.push_back({r.image_id, r.va()});
  }
  RunDirLock lock(c.paths.output_dir);
  auto result = pairing::pair_by_va(music, images, c.n_pairs, c.min_similarity, c.workers);

  std::vector<ordered_json> rows;
  for (const auto& p : result.pairs) rows.push_back(pairing::to_json(p));
  const auto dir = c.paths.output_dir / "pairs";
  write_file(dir / "pairs.jsonl", jsonl(rows));
  ordered_json summary{{"requested", result.requested},
                       {"produced", result.pairs.size()},
                       {"insufficient", result.insufficient()},
                       {"min_similarity", c.min_similarity},
                       {"music_candidates", music.size()},
                       {"image_candidates", images.size()}};
  summary["lowest_similarity"] = result.pairs.empty() ? ordered_json(nullptr) : ordered_json(result.pairs.back().similarity);
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  if (result.insufficient()) {
    spdlog::warn("{}: only {} of {} pairs reach similarity {}", to_string(ErrorCode::InsufficientCandidates),
                 result.pairs.size(), result.requested, c.min_similarity);
  }
  return result;
}

std::string cmd_report(const RunConfig& c) {
  c.validate();
  const auto& root = c.paths.output_dir;
  RunDirLock lock(root);
  std::string out = "# Run report\n";
  bool any = false;
  auto section = [&](const std::string& title, const std::string& body) {
    out += "\n## " + title + "\n\n" + body;
    if (!body.empty() && body.back() != '\n') out += "\n";
    any = true;
  };
  if (fs::exists(root / "ingest" / "manifest.json")) {
    const auto m = nlohmann::json::parse(read_file(root / "ingest" / "manifest.json"));
    std::string body;
    for (const auto& [k, v] : m.at("counts").items()) body += fmt::format("- {}: {}\n", k, v.dump());
    section("Corpora", body);
  }
  for (auto side : {affect::Side::Music, affect::Side::Image}) {
    auto table = head_path(c, side);
    table.replace_extension(".md");
    auto summary = head_path(c, side);
    summary.replace_extension(".json");
    if (fs::exists(table) && fs::exists(summary)) {
      const auto s = nlohmann::json::parse(read_file(summary));
      section(fmt::format("VA head ({})", affect::to_string(side)),
              fmt::format("lambda = {}, train/validation/test = {}/{}/{}\n\n{}", s.at("lambda").dump(),
                          s.at("n_train").dump(), s.at("n_validation").dump(), s.at("n_test").dump(), read_file(table)));
    }
  }
  if (fs::exists(root / "eval" / "table.md")) section("Prompt and image metrics", read_file(root / "eval" / "table.md"));
  if (fs::exists(root / "ablate" / "table.md")) section("Ablation", read_file(root / "ablate" / "table.md"));
  if (fs::exists(root / "pairs" / "summary.json")) {
    const auto s = nlohmann::json::parse(read_file(root / "pairs" / "summary.json"));
    section("Benchmark pairs", fmt::format("{} of {} requested pairs, lowest similarity {}\n", s.at("produced").dump(),
                                           s.at("requested").dump(), s.at("lowest_similarity").dump()));
  }
  require(any, ErrorCode::InvalidConfig, fmt::format("{} holds no results yet", root.string()));
  write_file(root / "report.md", out);
  return out;
}

int exit_code_for(const std::exception& error) noexcept {
  if (const auto* e = dynamic_cast<const Error*>(&error)) return is_backend_failure(e->code()) ? 2 : 1;
  return 1;
}

}  // namespace mesa::app
