#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/agents/attributes.hpp"
#include "mesa/agents/lexicon.hpp"
#include "mesa/types.hpp"

namespace mesa::agents {

enum class Severity { Warning, Error };

std::string_view to_string(Severity s) noexcept;

struct ValidationFlag {
  std::string rule_id;  // "R1".."R4"
  Severity severity = Severity::Error;
  std::string message;
  /// Attribute paths such as "color.palette"; "prompt" for the assembled text.
  std::vector<std::string> fields;
  friend bool operator==(const ValidationFlag&, const ValidationFlag&) = default;
};

struct ValidationReport {
  std::vector<ValidationFlag> flags;
  bool passed = true;

  /// Agents owning at least one error-severity field, in role order.
  std::vector<AgentRole> roles_with_errors() const;
  std::vector<std::string> messages_for(AgentRole role) const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Rules:
///   R1 (warning)  a content word shows up in three or more attribute fields
///   R2 (error)    value outside its lexicon or enum, palette size not in [2,5]
///   R3 (error)    energy class more than `energy_tolerance` bands from the
///                 arousal band, or a palette term from another quadrant
///   R4 (error)    empty subjects/environment, field or canonical prompt over
///                 512 characters
/// Report only; the bundle is never modified. Ablated (absent) attributes are
/// not checked.
ValidationReport validate(const AttributeBundle& bundle, VAPoint va, const Lexicon& lexicon,
                          const AffectTables& tables = {});

// The R2 checks for one agent's output; agents use these to schema-check a
// backend answer before accepting it.
std::vector<ValidationFlag> format_flags(const SceneAttributes& a, const Lexicon& lexicon);
std::vector<ValidationFlag> format_flags(const VerbAttributes& a, const Lexicon& lexicon);
std::vector<ValidationFlag> format_flags(const StyleAttributes& a, const Lexicon& lexicon);
std::vector<ValidationFlag> format_flags(const ColorAttributes& a, const Lexicon& lexicon);
std::vector<ValidationFlag> format_flags(const CompositionAttributes& a, const Lexicon& lexicon);

nlohmann::ordered_json to_json(const ValidationReport& report);
ValidationReport report_from_json(const nlohmann::json& j);

}  // namespace mesa::agents
