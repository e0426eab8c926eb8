#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "mesa/agents/attributes.hpp"

namespace mesa::agents {

/// Versioned agent instruction templates: one `<role>.txt` per agent plus
/// `correction.txt`, all in one directory whose name is the version.
/// Placeholders: {caption} {valence} {arousal} {quadrant}; the correction
/// template also receives {issues}.
struct TemplateSet {
  std::string version;
  std::map<AgentRole, std::string> instructions;
  std::string correction;

  static TemplateSet load(const std::filesystem::path& dir);
};

/// Replaces `{name}` for every key in `values`; other braces are left alone.
std::string render_template(std::string_view text, const std::map<std::string, std::string>& values);

}  // namespace mesa::agents
