#include "mesa/agents/validator.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

#include <fmt/format.h>

#include "mesa/agents/prompt_assembler.hpp"
#include "mesa/backends/wire.hpp"
#include "mesa/metrics/text_metrics.hpp"

namespace mesa::agents {

std::string_view to_string(Severity s) noexcept { return s == Severity::Warning ? "warning" : "error"; }

namespace {

constexpr std::size_t kMinPalette = 2;
constexpr std::size_t kMaxPalette = 5;

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> words{
      "the", "and", "with", "for", "from", "into", "onto", "over", "under", "through", "across", "its",
      "their", "his", "her", "shot", "view", "level", "light", "tones", "palette", "style"};
  return words;
}

ValidationFlag error(std::string rule, std::string message, std::vector<std::string> fields) {
  return {std::move(rule), Severity::Error, std::move(message), std::move(fields)};
}

template <typename Range>
bool contains(const Range& range, std::string_view value) {
  return std::find(range.begin(), range.end(), value) != range.end();
}

void append(std::vector<ValidationFlag>& out, std::vector<ValidationFlag> more) {
  for (auto& f : more) out.push_back(std::move(f));
}

// Attribute path -> text, used by R1 and R4.
std::vector<std::pair<std::string, std::string>> text_fields(const AttributeBundle& b) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string subjects;
  for (const auto& s : b.scene.subjects) subjects += s + " ";
  out.emplace_back("scene.subjects", subjects);
  out.emplace_back("scene.environment", b.scene.environment);
  if (b.verb) out.emplace_back("verb.action", b.verb->action);
  if (b.style) out.emplace_back("style.label", b.style->label);
  if (b.color) {
    std::string palette;
    for (const auto& p : b.color->palette) palette += p + " ";
    out.emplace_back("color.palette", palette);
    out.emplace_back("color.lighting", b.color->lighting);
  }
  if (b.composition) {
    out.emplace_back("composition.framing", b.composition->framing);
    out.emplace_back("composition.viewpoint", b.composition->viewpoint);
  }
  return out;
}

int energy_index(EnergyClass c) { return static_cast<int>(c); }

}  // namespace

std::vector<ValidationFlag> format_flags(const SceneAttributes& a, const Lexicon& lexicon) {
  std::vector<ValidationFlag> out;
  if (!lexicon.is_category(a.category)) {
    out.push_back(error("R2", fmt::format("scene category '{}' is not in the taxonomy", a.category),
                        {"scene.category"}));
  }
  return out;
}

std::vector<ValidationFlag> format_flags(const VerbAttributes& a, const Lexicon& lexicon) {
  std::vector<ValidationFlag> out;
  const auto cls = energy_class_from_string(a.energy_class);
  if (!cls) {
    out.push_back(error("R2", fmt::format("unknown energy class '{}'", a.energy_class), {"verb.energy_class"}));
    return out;
  }
  if (!contains(lexicon.verbs.at(*cls), a.action)) {
    out.push_back(error("R2", fmt::format("action '{}' is not a {} verb", a.action, a.energy_class),
                        {"verb.action"}));
  }
  return out;
}

std::vector<ValidationFlag> format_flags(const StyleAttributes& a, const Lexicon& lexicon) {
  std::vector<ValidationFlag> out;
  if (!lexicon.is_style(a.label)) {
    out.push_back(error("R2", fmt::format("style '{}' is not in the style lexicon", a.label), {"style.label"}));
  }
  return out;
}

std::vector<ValidationFlag> format_flags(const ColorAttributes& a, const Lexicon& lexicon) {
  std::vector<ValidationFlag> out;
  if (a.palette.size() < kMinPalette || a.palette.size() > kMaxPalette) {
    out.push_back(error("R2", fmt::format("palette has {} terms, expected {}-{}", a.palette.size(), kMinPalette,
                                          kMaxPalette),
                        {"color.palette"}));
  }
  for (const auto& term : a.palette) {
    if (!lexicon.palette_family(term)) {
      out.push_back(error("R2", fmt::format("palette term '{}' is not in the color lexicon", term),
                          {"color.palette"}));
    }
  }
  return out;
}

std::vector<ValidationFlag> format_flags(const CompositionAttributes& a, const Lexicon&) {
  std::vector<ValidationFlag> out;
  if (!contains(kFramings, a.framing)) {
    out.push_back(error("R2", fmt::format("unknown framing '{}'", a.framing), {"composition.framing"}));
  }
  if (!contains(kViewpoints, a.viewpoint)) {
    out.push_back(error("R2", fmt::format("unknown viewpoint '{}'", a.viewpoint), {"composition.viewpoint"}));
  }
  return out;
}

ValidationReport validate(const AttributeBundle& bundle, VAPoint va, const Lexicon& lexicon,
                          const AffectTables& tables) {
  ValidationReport report;
  auto& flags = report.flags;

  // R1: redundancy across fields.
  std::map<std::string, std::vector<std::string>> word_fields;
  for (const auto& [path, text] : text_fields(bundle)) {
    std::set<std::string> words;
    for (auto& token : metrics::tokenize(text)) {
      if (token.size() >= 3 && !stopwords().contains(token)) words.insert(std::move(token));
    }
    for (const auto& w : words) word_fields[w].push_back(path);
  }
  for (const auto& [word, paths] : word_fields) {
    if (paths.size() >= 3) {
      flags.push_back({"R1", Severity::Warning,
                       fmt::format("'{}' is repeated across {} attribute fields", word, paths.size()), paths});
    }
  }

  // R2: format.
  append(flags, format_flags(bundle.scene, lexicon));
  if (bundle.verb) append(flags, format_flags(*bundle.verb, lexicon));
  if (bundle.style) append(flags, format_flags(*bundle.style, lexicon));
  if (bundle.color) append(flags, format_flags(*bundle.color, lexicon));
  if (bundle.composition) append(flags, format_flags(*bundle.composition, lexicon));

  // R3: affect contradictions.
  if (bundle.verb) {
    if (auto cls = energy_class_from_string(bundle.verb->energy_class)) {
      const auto expected = energy_class_for(va.arousal, tables);
      const int distance = std::abs(energy_index(*cls) - energy_index(expected));
      if (distance > tables.energy_tolerance) {
        flags.push_back(error("R3",
                              fmt::format("energy class {} is {} bands from arousal {:.3f} ({})",
                                          bundle.verb->energy_class, distance, va.arousal, to_string(expected)),
                              {"verb.energy_class"}));
      }
    }
  }
  if (bundle.color) {
    const auto quadrant = va_quadrant(va, tables);
    for (const auto& term : bundle.color->palette) {
      const auto family = lexicon.palette_family(term);
      if (family && *family != quadrant) {
        flags.push_back(error("R3",
                              fmt::format("palette term '{}' belongs to {}, music is {}", term,
                                          short_name(*family), short_name(quadrant)),
                              {"color.palette"}));
      }
    }
  }

  // R4: emptiness and overflow.
  const auto& subjects = bundle.scene.subjects;
  if (subjects.empty() ||
      std::any_of(subjects.begin(), subjects.end(), [](const std::string& s) { return s.empty(); })) {
    flags.push_back(error("R4", "scene has no subjects", {"scene.subjects"}));
  }
  if (bundle.scene.environment.empty()) flags.push_back(error("R4", "scene has no environment", {"scene.environment"}));
  if (bundle.color && bundle.color->lighting.empty()) {
    flags.push_back(error("R4", "lighting is empty", {"color.lighting"}));
  }
  for (const auto& [path, text] : text_fields(bundle)) {
    if (text.size() > backends::kMaxPromptChars) {
      flags.push_back(error("R4", fmt::format("{} is {} characters long", path, text.size()), {path}));
    }
  }
  const auto prompt = canonical_prompt(bundle);
  if (prompt.size() > backends::kMaxPromptChars) {
    flags.push_back(error("R4", fmt::format("assembled prompt is {} characters long", prompt.size()), {"prompt"}));
  }

  report.passed = std::none_of(flags.begin(), flags.end(),
                               [](const ValidationFlag& f) { return f.severity == Severity::Error; });
  return report;
}

namespace {

std::optional<AgentRole> owner(std::string_view path) {
  const auto dot = path.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  return role_from_string(path.substr(0, dot));
}

}  // namespace

std::vector<AgentRole> ValidationReport::roles_with_errors() const {
  std::set<AgentRole> roles;
  for (const auto& f : flags) {
    if (f.severity != Severity::Error) continue;
    for (const auto& path : f.fields) {
      if (auto r = owner(path)) roles.insert(*r);
    }
  }
  return {roles.begin(), roles.end()};
}

std::vector<std::string> ValidationReport::messages_for(AgentRole role) const {
  std::vector<std::string> out;
  for (const auto& f : flags) {
    if (f.severity != Severity::Error) continue;
    if (std::any_of(f.fields.begin(), f.fields.end(), [&](const std::string& p) { return owner(p) == role; })) {
      out.push_back(f.message);
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const ValidationReport& report) {
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  for (const auto& f : report.flags) {
    flags.push_back({{"rule_id", f.rule_id},
                     {"severity", std::string(to_string(f.severity))},
                     {"message", f.message},
                     {"fields", f.fields}});
  }
  return {{"flags", std::move(flags)}, {"passed", report.passed}};
}

ValidationReport report_from_json(const nlohmann::json& j) {
  ValidationReport report;
  for (const auto& f : j.at("flags")) {
    report.flags.push_back({f.at("rule_id").get<std::string>(),
                            f.at("severity").get<std::string>() == "warning" ? Severity::Warning : Severity::Error,
                            f.at("message").get<std::string>(), f.at("fields").get<std::vector<std::string>>()});
  }
  report.passed = j.at("passed").get<bool>();
  return report;
}

}  // namespace mesa::agents
