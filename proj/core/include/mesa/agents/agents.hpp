#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/agents/attributes.hpp"
#include "mesa/agents/lexicon.hpp"
#include "mesa/agents/structured_block.hpp"
#include "mesa/agents/templates.hpp"
#include "mesa/backends/backends.hpp"
#include "mesa/corpus/loaders.hpp"
#include "mesa/types.hpp"

namespace mesa::agents {

/// What every attribute agent sees for one clip.
struct AgentInput {
  std::string clip_id;
  std::string caption;
  VAPoint va;
};

AgentInput agent_input(const corpus::CaptionRecord& record, VAPoint fallback_va = {0.5, 0.5});

struct AgentContext {
  const Lexicon* lexicon = nullptr;
  const TemplateSet* templates = nullptr;
  AffectTables tables;
  std::string model;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  /// Used once the primary backend fails twice; null disables fallback.
  backends::ChatBackend* fallback = nullptr;
};

/// Issues from the validator, fed back in a corrective re-query.
struct Correction {
  std::vector<std::string> issues;
};

/// How an agent's answer was obtained. `source` is "backend" (first choice
/// answered), "rule" (the first choice *is* the rule backend) or "fallback".
struct AgentTrace {
  AgentRole role = AgentRole::Scene;
  std::string backend;
  std::string source;
  int attempts = 0;
  std::vector<std::string> issues;
};

nlohmann::ordered_json to_json(const AgentTrace& trace);

template <typename T>
struct AgentOutcome {
  T value;
  AgentTrace trace;
};

// Each agent: render its instruction template, ask the backend, parse and
// schema-check the fenced answer. A parse failure is retried once with the
// parse error attached; after that (or on backend failure) the rule backend
// in `ctx.fallback` answers instead. Throws PreconditionViolated for an empty
// caption or a VA point outside the unit square.

AgentOutcome<SceneAttributes> run_scene_agent(const AgentInput& in, backends::ChatBackend& backend,
                                              const AgentContext& ctx, const Correction* correction = nullptr);
AgentOutcome<VerbAttributes> run_verb_agent(const AgentInput& in, backends::ChatBackend& backend,
                                            const AgentContext& ctx, const Correction* correction = nullptr);
AgentOutcome<StyleAttributes> run_style_agent(const AgentInput& in, backends::ChatBackend& backend,
                                              const AgentContext& ctx, const Correction* correction = nullptr);
AgentOutcome<ColorAttributes> run_color_agent(const AgentInput& in, backends::ChatBackend& backend,
                                              const AgentContext& ctx, const Correction* correction = nullptr);
AgentOutcome<CompositionAttributes> run_composition_agent(const AgentInput& in, backends::ChatBackend& backend,
                                                          const AgentContext& ctx,
                                                          const Correction* correction = nullptr);

/// The chat request an agent sends: system = rendered instruction, user =
/// fenced `input` block (agent, caption, valence, arousal, quadrant), and for
/// a correction the rendered correction template.
backends::ChatRequest build_agent_request(AgentRole role, const AgentInput& in, const AgentContext& ctx,
                                          const Correction* correction = nullptr);

// Structured-block encoding of each attribute group, label "attributes".
std::string render_attributes(const SceneAttributes& a);
std::string render_attributes(const VerbAttributes& a);
std::string render_attributes(const StyleAttributes& a);
std::string render_attributes(const ColorAttributes& a);
std::string render_attributes(const CompositionAttributes& a);

// Parse + R2 check; throw UnparseableOutput.
SceneAttributes parse_scene(std::string_view text, const Lexicon& lexicon);
VerbAttributes parse_verb(std::string_view text, const Lexicon& lexicon);
StyleAttributes parse_style(std::string_view text, const Lexicon& lexicon);
ColorAttributes parse_color(std::string_view text, const Lexicon& lexicon);
CompositionAttributes parse_composition(std::string_view text, const Lexicon& lexicon);

// Deterministic lexicon rules behind the offline backend. They depend only on
// the caption text and the VA point.
SceneAttributes rule_scene(std::string_view caption, const Lexicon& lexicon);
VerbAttributes rule_verb(std::string_view caption, VAPoint va, const Lexicon& lexicon, const AffectTables& tables = {});
StyleAttributes rule_style(std::string_view caption, VAPoint va, const Lexicon& lexicon,
                           const AffectTables& tables = {});
ColorAttributes rule_color(std::string_view caption, VAPoint va, const Lexicon& lexicon,
                           const AffectTables& tables = {});
CompositionAttributes rule_composition(std::string_view caption, VAPoint va, const Lexicon& lexicon,
                                       const AffectTables& tables = {});

/// Rule answer for `role`, already rendered as an attributes block.
std::string rule_answer(AgentRole role, std::string_view caption, VAPoint va, const Lexicon& lexicon,
                        const AffectTables& tables = {});

}  // namespace mesa::agents
