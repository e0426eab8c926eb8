#include "mesa/agents/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include <fmt/format.h>

#include "mesa/agents/validator.hpp"
#include "mesa/backends/stable_hash.hpp"
#include "mesa/error.hpp"
#include "mesa/metrics/text_metrics.hpp"

namespace mesa::agents {
namespace {

constexpr std::string_view kLabel = "attributes";

// Salts keep the per-role rule choices independent of each other.
constexpr std::uint64_t kVerbSalt = 0x7665726bULL;
constexpr std::uint64_t kColorSalt = 0x636f6c6fULL;
constexpr std::uint64_t kLightSalt = 0x6c696768ULL;
constexpr std::uint64_t kFrameSalt = 0x6672616dULL;
constexpr std::uint64_t kViewSalt = 0x76696577ULL;

constexpr std::size_t kMaxSubjects = 3;
constexpr std::size_t kMaxEnvironmentWords = 10;
constexpr std::size_t kRulePaletteSize = 3;

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

/// " tok1 tok2 ... " so phrases can be matched on word boundaries.
std::string padded_tokens(std::string_view caption) {
  std::string out = " ";
  for (const auto& t : metrics::tokenize(caption)) out += t + " ";
  return out;
}

bool mentions(const std::string& padded, std::string_view phrase) {
  std::string needle = " ";
  for (const auto& t : metrics::tokenize(phrase)) needle += t + " ";
  return needle.size() > 1 && padded.find(needle) != std::string::npos;
}

template <typename T>
const T& pick(const std::vector<T>& items, std::string_view caption, std::uint64_t salt) {
  return items[stable_hash(caption, salt) % items.size()];
}

std::string environment_phrase(std::string_view caption) {
  static const std::vector<std::string> prepositions{"in", "on", "at", "by", "under", "beneath", "across",
                                                     "through", "along", "inside", "near", "among"};
  const auto text = lower_ascii(caption);
  std::vector<std::string> words;
  {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i) words.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  std::size_t start = words.size();
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (std::find(prepositions.begin(), prepositions.end(), words[i]) != prepositions.end()) {
      start = i + 1;
      break;
    }
  }
  if (start < words.size() && (words[start] == "a" || words[start] == "an" || words[start] == "the")) ++start;
  std::string out;
  std::size_t count = 0;
  for (std::size_t i = start; i < words.size() && count < kMaxEnvironmentWords; ++i) {
    auto w = words[i];
    const bool stop = !w.empty() && (w.back() == ',' || w.back() == '.' || w.back() == ';' || w.back() == '!');
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back()))) w.pop_back();
    if (w == "while" || w == "as" || w == "with") break;
    if (!w.empty()) {
      if (!out.empty()) out += ' ';
      out += w;
      ++count;
    }
    if (stop) break;
  }
  return out;
}

void check_input(const AgentInput& in, const AgentContext& ctx) {
  require(ctx.lexicon && ctx.templates, ErrorCode::PreconditionViolated, "agent context lacks lexicon/templates");
  require(!trim(in.caption).empty(), ErrorCode::PreconditionViolated, "caption is empty");
  require(in.va.in_unit_square(), ErrorCode::PreconditionViolated,
          fmt::format("VA point ({}, {}) outside the unit square", in.va.valence, in.va.arousal));
}

std::string single_line(std::string_view s) {
  std::string out(trim(s));
  for (auto& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::map<std::string, std::string> placeholders(const AgentInput& in, const AgentContext& ctx) {
  return {{"caption", single_line(in.caption)},
          {"valence", fmt::format("{}", in.va.valence)},
          {"arousal", fmt::format("{}", in.va.arousal)},
          {"quadrant", std::string(to_string(va_quadrant(in.va, ctx.tables)))}};
}

std::string correction_message(const AgentInput& in, const AgentContext& ctx, const std::vector<std::string>& issues) {
  auto values = placeholders(in, ctx);
  std::string list;
  for (const auto& issue : issues) list += "- " + single_line(issue) + "\n";
  values["issues"] = list;
  return render_template(ctx.templates->correction, values);
}

KeyValues parse_attributes(std::string_view text, const std::set<std::string>& keys) {
  return parse_block(text, kLabel, keys, keys);
}

template <typename T>
T checked(T value, const Lexicon& lexicon) {
  const auto flags = format_flags(value, lexicon);
  if (!flags.empty()) {
    std::string msg;
    for (const auto& f : flags) msg += (msg.empty() ? "" : "; ") + f.message;
    raise(ErrorCode::UnparseableOutput, msg);
  }
  return value;
}

template <typename T, typename Parse>
AgentOutcome<T> run_agent(AgentRole role, const AgentInput& in, backends::ChatBackend& backend,
                          const AgentContext& ctx, const Correction* correction, Parse parse) {
  check_input(in, ctx);
  AgentOutcome<T> out;
  out.trace.role = role;
  out.trace.backend = std::string(backend.name());
  out.trace.source = backend.name() == "rule" ? "rule" : "backend";

  auto request = build_agent_request(role, in, ctx, correction);
  std::optional<Error> failure;
  for (int attempt = 0; attempt < 2; ++attempt) {
    ++out.trace.attempts;
    std::string text;
    try {
      text = backends::chat(backend, request).text;
    } catch (const Error& e) {
      if (!is_backend_failure(e.code())) throw;
      out.trace.issues.emplace_back(e.what());
      failure = e;
      break;  // the client already retried transport failures
    }
    try {
      out.value = parse(text, *ctx.lexicon);
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnparseableOutput) throw;
      out.trace.issues.emplace_back(e.what());
      failure = e;
      request.messages.push_back({"assistant", text});
      request.messages.push_back({"user", correction_message(in, ctx, {e.what()})});
    }
  }
  if (!ctx.fallback || ctx.fallback == &backend) throw *failure;

  out.trace.source = "fallback";
  const auto text = backends::chat(*ctx.fallback, build_agent_request(role, in, ctx)).text;
  try {
    out.value = parse(text, *ctx.lexicon);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnparseableOutput) throw;
    raise(ErrorCode::UnparseableOutput,
          fmt::format("fallback answer for {} agent rejected (lexicon misconfigured?): {}", to_string(role), e.what()));
  }
  return out;
}

}  // namespace

AgentInput agent_input(const corpus::CaptionRecord& record, VAPoint fallback_va) {
  return {record.clip_id, record.caption, record.va.value_or(fallback_va)};
}

nlohmann::ordered_json to_json(const AgentTrace& trace) {
  return {{"role", std::string(to_string(trace.role))},
          {"backend", trace.backend},
          {"source", trace.source},
          {"attempts", trace.attempts},
          {"issues", trace.issues}};
}

backends::ChatRequest build_agent_request(AgentRole role, const AgentInput& in, const AgentContext& ctx,
                                          const Correction* correction) {
  const auto values = placeholders(in, ctx);
  backends::ChatRequest request;
  request.model = ctx.model;
  request.temperature = ctx.temperature;
  request.seed = ctx.seed;
  request.messages.push_back({"system", render_template(ctx.templates->instructions.at(role), values)});
  request.messages.push_back({"user", render_block("input", {{"agent", std::string(to_string(role))},
                                                             {"caption", values.at("caption")},
                                                             {"valence", values.at("valence")},
                                                             {"arousal", values.at("arousal")},
                                                             {"quadrant", values.at("quadrant")}})});
  if (correction && !correction->issues.empty()) {
    request.messages.push_back({"user", correction_message(in, ctx, correction->issues)});
  }
  return request;
}

std::string render_attributes(const SceneAttributes& a) {
  return render_block(kLabel, {{"subjects", join_list(a.subjects)}, {"environment", a.environment},
                               {"category", a.category}});
}

std::string render_attributes(const VerbAttributes& a) {
  return render_block(kLabel, {{"action", a.action}, {"energy_class", a.energy_class}});
}

std::string render_attributes(const StyleAttributes& a) { return render_block(kLabel, {{"style", a.label}}); }

std::string render_attributes(const ColorAttributes& a) {
  return render_block(kLabel, {{"palette", join_list(a.palette)}, {"lighting", a.lighting}});
}

std::string render_attributes(const CompositionAttributes& a) {
  return render_block(kLabel, {{"framing", a.framing}, {"viewpoint", a.viewpoint}});
}

SceneAttributes parse_scene(std::string_view text, const Lexicon& lexicon) {
  const auto kv = parse_attributes(text, {"subjects", "environment", "category"});
  return checked(SceneAttributes{split_list(lookup(kv, "subjects")), std::string(lookup(kv, "environment")),
                                 std::string(lookup(kv, "category"))},
                 lexicon);
}

VerbAttributes parse_verb(std::string_view text, const Lexicon& lexicon) {
  const auto kv = parse_attributes(text, {"action", "energy_class"});
  return checked(VerbAttributes{std::string(lookup(kv, "action")), std::string(lookup(kv, "energy_class"))},
                 lexicon);
}

StyleAttributes parse_style(std::string_view text, const Lexicon& lexicon) {
  const auto kv = parse_attributes(text, {"style"});
  return checked(StyleAttributes{std::string(lookup(kv, "style"))}, lexicon);
}

ColorAttributes parse_color(std::string_view text, const Lexicon& lexicon) {
  const auto kv = parse_attributes(text, {"palette", "lighting"});
  return checked(ColorAttributes{split_list(lookup(kv, "palette")), std::string(lookup(kv, "lighting"))}, lexicon);
}

CompositionAttributes parse_composition(std::string_view text, const Lexicon& lexicon) {
  const auto kv = parse_attributes(text, {"framing", "viewpoint"});
  return checked(CompositionAttributes{std::string(lookup(kv, "framing")), std::string(lookup(kv, "viewpoint"))},
                 lexicon);
}

SceneAttributes rule_scene(std::string_view caption, const Lexicon& lexicon) {
  SceneAttributes out;
  const auto tokens = metrics::tokenize(caption);
  for (const auto& token : tokens) {
    for (const auto& subject : lexicon.subjects) {
      if ((token == subject || token == subject + "s") &&
          std::find(out.subjects.begin(), out.subjects.end(), subject) == out.subjects.end() &&
          out.subjects.size() < kMaxSubjects) {
        out.subjects.push_back(subject);
      }
    }
  }
  if (out.subjects.empty()) out.subjects.push_back(lexicon.default_subject);

  // Category with the most keyword hits; ties go to the earlier taxonomy entry.
  const auto padded = padded_tokens(caption);
  std::size_t best_hits = 0;
  for (const auto& category : lexicon.scene_categories) {
    auto it = lexicon.scene_keywords.find(category);
    if (it == lexicon.scene_keywords.end()) continue;
    const auto hits = static_cast<std::size_t>(
        std::count_if(it->second.begin(), it->second.end(), [&](const std::string& k) { return mentions(padded, k); }));
    if (hits > best_hits) {
      best_hits = hits;
      out.category = category;
    }
  }
  if (out.category.empty()) out.category = lexicon.is_category("abstract") ? "abstract" : lexicon.scene_categories.front();

  out.environment = environment_phrase(caption);
  if (out.environment.empty()) out.environment = lexicon.environments.at(out.category);
  return out;
}

VerbAttributes rule_verb(std::string_view caption, VAPoint va, const Lexicon& lexicon, const AffectTables& tables) {
  const auto cls = energy_class_for(va.arousal, tables);
  const auto& verbs = lexicon.verbs.at(cls);
  const auto padded = padded_tokens(caption);
  for (const auto& v : verbs) {
    if (mentions(padded, v)) return {v, std::string(to_string(cls))};
  }
  return {pick(verbs, caption, kVerbSalt), std::string(to_string(cls))};
}

StyleAttributes rule_style(std::string_view caption, VAPoint va, const Lexicon& lexicon, const AffectTables& tables) {
  const auto q = va_quadrant(va, tables);
  const auto padded = padded_tokens(caption);
  for (const auto& genre : lexicon.genres) {
    for (const auto& keyword : genre.keywords) {
      if (mentions(padded, keyword)) return {genre.styles.at(q)};
    }
  }
  return {lexicon.default_styles.at(q)};
}

ColorAttributes rule_color(std::string_view caption, VAPoint va, const Lexicon& lexicon, const AffectTables& tables) {
  const auto q = va_quadrant(va, tables);
  const auto& terms = lexicon.palettes.at(q);
  const auto n = std::min(kRulePaletteSize, terms.size());
  const auto start = stable_hash(caption, kColorSalt) % terms.size();
  ColorAttributes out;
  for (std::size_t i = 0; i < n; ++i) out.palette.push_back(terms[(start + i) % terms.size()]);
  out.lighting = pick(lexicon.lighting.at(q), caption, kLightSalt);
  return out;
}

CompositionAttributes rule_composition(std::string_view caption, VAPoint va, const Lexicon& lexicon,
                                       const AffectTables& tables) {
  const std::size_t side = va.arousal >= tables.energetic_arousal ? 1 : 0;
  return {pick(lexicon.framing[side], caption, kFrameSalt), pick(lexicon.viewpoints[side], caption, kViewSalt)};
}

std::string rule_answer(AgentRole role, std::string_view caption, VAPoint va, const Lexicon& lexicon,
                        const AffectTables& tables) {
  switch (role) {
    case AgentRole::Scene: return render_attributes(rule_scene(caption, lexicon));
    case AgentRole::Verb: return render_attributes(rule_verb(caption, va, lexicon, tables));
    case AgentRole::Style: return render_attributes(rule_style(caption, va, lexicon, tables));
    case AgentRole::Color: return render_attributes(rule_color(caption, va, lexicon, tables));
    case AgentRole::Composition: return render_attributes(rule_composition(caption, va, lexicon, tables));
  }
  raise(ErrorCode::UnknownRole, "unknown agent role");
}

AgentOutcome<SceneAttributes> run_scene_agent(const AgentInput& in, backends::ChatBackend& backend,
                                              const AgentContext& ctx, const Correction* correction) {
  return run_agent<SceneAttributes>(AgentRole::Scene, in, backend, ctx, correction, parse_scene);
}

AgentOutcome<VerbAttributes> run_verb_agent(const AgentInput& in, backends::ChatBackend& backend,
                                            const AgentContext& ctx, const Correction* correction) {
  return run_agent<VerbAttributes>(AgentRole::Verb, in, backend, ctx, correction, parse_verb);
}

AgentOutcome<StyleAttributes> run_style_agent(const AgentInput& in, backends::ChatBackend& backend,
                                              const AgentContext& ctx, const Correction* correction) {
  return run_agent<StyleAttributes>(AgentRole::Style, in, backend, ctx, correction, parse_style);
}

AgentOutcome<ColorAttributes> run_color_agent(const AgentInput& in, backends::ChatBackend& backend,
                                              const AgentContext& ctx, const Correction* correction) {
  return run_agent<ColorAttributes>(AgentRole::Color, in, backend, ctx, correction, parse_color);
}

AgentOutcome<CompositionAttributes> run_composition_agent(const AgentInput& in, backends::ChatBackend& backend,
                                                          const AgentContext& ctx, const Correction* correction) {
  return run_agent<CompositionAttributes>(AgentRole::Composition, in, backend, ctx, correction, parse_composition);
}

}  // namespace mesa::agents
