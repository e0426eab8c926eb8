#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mesa::agents {

enum class AgentRole { Scene, Verb, Style, Color, Composition };

inline constexpr std::array<AgentRole, 5> kAgentRoles{AgentRole::Scene, AgentRole::Verb, AgentRole::Style,
                                                      AgentRole::Color, AgentRole::Composition};

std::string_view to_string(AgentRole role) noexcept;
std::optional<AgentRole> role_from_string(std::string_view text) noexcept;

// Attribute values are kept as plain strings so that a malformed agent answer
// can still be represented and reported by the validator.

struct SceneAttributes {
  std::vector<std::string> subjects;
  std::string environment;
  std::string category;
  friend bool operator==(const SceneAttributes&, const SceneAttributes&) = default;
};

struct VerbAttributes {
  std::string action;
  std::string energy_class;
  friend bool operator==(const VerbAttributes&, const VerbAttributes&) = default;
};

struct StyleAttributes {
  std::string label;
  friend bool operator==(const StyleAttributes&, const StyleAttributes&) = default;
};

struct ColorAttributes {
  std::vector<std::string> palette;
  std::string lighting;
  friend bool operator==(const ColorAttributes&, const ColorAttributes&) = default;
};

struct CompositionAttributes {
  std::string framing;
  std::string viewpoint;
  friend bool operator==(const CompositionAttributes&, const CompositionAttributes&) = default;
};

/// Joint output of the five attribute agents for one clip. Optional members
/// are empty only when the corresponding agent was ablated.
struct AttributeBundle {
  SceneAttributes scene;
  std::optional<VerbAttributes> verb;
  std::optional<StyleAttributes> style;
  std::optional<ColorAttributes> color;
  std::optional<CompositionAttributes> composition;
  friend bool operator==(const AttributeBundle&, const AttributeBundle&) = default;
};

nlohmann::ordered_json to_json(const AttributeBundle& bundle);
AttributeBundle bundle_from_json(const nlohmann::json& j);

}  // namespace mesa::agents
