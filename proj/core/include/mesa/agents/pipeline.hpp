#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/agents/agents.hpp"
#include "mesa/agents/prompt_assembler.hpp"
#include "mesa/agents/validator.hpp"
#include "mesa/backends/backends.hpp"

namespace mesa::agents {

struct PipelineConfig {
  std::size_t k = kDefaultPromptCount;
  std::int64_t seed = 0;
  /// Ablated agents; their clauses are left out of every prompt. The scene
  /// agent cannot be dropped.
  std::set<AgentRole> dropped;
  bool concurrent_agents = true;
  /// Fall back to rule answers when the chat backend fails.
  bool rule_fallback = true;
  bool generate_images = false;
  int image_width = 512;
  int image_height = 512;
  std::string model;
  double temperature = 0.0;
  AffectTables tables;
};

struct PipelineBackends {
  backends::ChatBackend* chat = nullptr;
  /// Rule backend; used for fallback and for substituting fields that fail
  /// validation twice.
  backends::ChatBackend* rule = nullptr;
  backends::ImageBackend* image = nullptr;
};

struct PipelineOutput {
  std::string clip_id;
  AttributeBundle bundle;
  ValidationReport report;
  PromptSet prompt_set;
  std::vector<backends::ImageResult> image_refs;
  nlohmann::ordered_json provenance;
};

/// Agents -> validate -> one corrective re-query per failing agent ->
/// validate -> rule substitution for what still fails -> assemble k prompts
/// -> optional image generation. Throws ValidationUnrecoverable when even rule
/// answers fail validation, and backend errors when fallback is off.
PipelineOutput run_pipeline(const AgentInput& input, const PipelineConfig& config, const Lexicon& lexicon,
                            const TemplateSet& templates, const PipelineBackends& backends);

/// Runs records on up to `workers` threads; output is sorted by clip_id.
std::vector<PipelineOutput> run_batch(std::span<const AgentInput> inputs, const PipelineConfig& config,
                                      const Lexicon& lexicon, const TemplateSet& templates,
                                      const PipelineBackends& backends, std::size_t workers = 1);

/// Seed handed to the assembler and the image backend for one clip.
std::int64_t clip_seed(const std::string& clip_id, std::int64_t seed);

nlohmann::ordered_json to_json(const PipelineOutput& output);
/// One compact JSON line, no trailing newline.
std::string to_jsonl(const PipelineOutput& output);
PipelineOutput pipeline_output_from_json(const nlohmann::json& j);

}  // namespace mesa::agents
