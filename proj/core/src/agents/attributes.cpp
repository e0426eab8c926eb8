#include "mesa/agents/attributes.hpp"

#include "mesa/error.hpp"

namespace mesa::agents {

std::string_view to_string(AgentRole role) noexcept {
  switch (role) {
    case AgentRole::Scene: return "scene";
    case AgentRole::Verb: return "verb";
    case AgentRole::Style: return "style";
    case AgentRole::Color: return "color";
    case AgentRole::Composition: return "composition";
  }
  return "unknown";
}

std::optional<AgentRole> role_from_string(std::string_view text) noexcept {
  for (auto r : kAgentRoles) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

nlohmann::ordered_json to_json(const AttributeBundle& b) {
  nlohmann::ordered_json j;
  j["scene"] = {{"subjects", b.scene.subjects},
                {"environment", b.scene.environment},
                {"category", b.scene.category}};
  if (b.verb) j["verb"] = {{"action", b.verb->action}, {"energy_class", b.verb->energy_class}};
  if (b.style) j["style"] = {{"label", b.style->label}};
  if (b.color) j["color"] = {{"palette", b.color->palette}, {"lighting", b.color->lighting}};
  if (b.composition) {
    j["composition"] = {{"framing", b.composition->framing}, {"viewpoint", b.composition->viewpoint}};
  }
  return j;
}

AttributeBundle bundle_from_json(const nlohmann::json& j) {
  try {
    AttributeBundle b;
    const auto& s = j.at("scene");
    b.scene = {s.at("subjects").get<std::vector<std::string>>(), s.at("environment").get<std::string>(),
               s.at("category").get<std::string>()};
    if (j.contains("verb")) {
      b.verb = VerbAttributes{j["verb"].at("action").get<std::string>(),
                              j["verb"].at("energy_class").get<std::string>()};
    }
    if (j.contains("style")) b.style = StyleAttributes{j["style"].at("label").get<std::string>()};
    if (j.contains("color")) {
      b.color = ColorAttributes{j["color"].at("palette").get<std::vector<std::string>>(),
                                j["color"].at("lighting").get<std::string>()};
    }
    if (j.contains("composition")) {
      b.composition = CompositionAttributes{j["composition"].at("framing").get<std::string>(),
                                            j["composition"].at("viewpoint").get<std::string>()};
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("attribute bundle: ") + e.what());
  }
}

}  // namespace mesa::agents
