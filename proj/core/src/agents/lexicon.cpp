#include "mesa/agents/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "mesa/error.hpp"

namespace mesa::agents {

std::string_view to_string(EnergyClass c) noexcept {
  switch (c) {
    case EnergyClass::Static: return "static";
    case EnergyClass::Gentle: return "gentle";
    case EnergyClass::Moderate: return "moderate";
    case EnergyClass::Dynamic: return "dynamic";
    case EnergyClass::Explosive: return "explosive";
  }
  return "unknown";
}

std::optional<EnergyClass> energy_class_from_string(std::string_view text) noexcept {
  for (auto c : kEnergyClasses) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string_view short_name(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::Q1HighVHighA: return "Q1";
    case Quadrant::Q2LowVHighA: return "Q2";
    case Quadrant::Q3LowVLowA: return "Q3";
    case Quadrant::Q4HighVLowA: return "Q4";
  }
  return "Q?";
}

std::string_view to_string(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::Q1HighVHighA: return "Q1_high_v_high_a";
    case Quadrant::Q2LowVHighA: return "Q2_low_v_high_a";
    case Quadrant::Q3LowVLowA: return "Q3_low_v_low_a";
    case Quadrant::Q4HighVLowA: return "Q4_high_v_low_a";
  }
  return "unknown";
}

std::optional<Quadrant> quadrant_from_short_name(std::string_view text) noexcept {
  for (auto q : kQuadrants) {
    if (short_name(q) == text || to_string(q) == text) return q;
  }
  return std::nullopt;
}

EnergyClass energy_class_for(double arousal, const AffectTables& tables) {
  std::size_t band = 0;
  while (band < tables.arousal_band_edges.size() && arousal >= tables.arousal_band_edges[band]) ++band;
  return kEnergyClasses[band];
}

Quadrant va_quadrant(VAPoint va, const AffectTables& tables) {
  const bool high_v = va.valence >= tables.quadrant_threshold;
  const bool high_a = va.arousal >= tables.quadrant_threshold;
  if (high_v && high_a) return Quadrant::Q1HighVHighA;
  if (!high_v && high_a) return Quadrant::Q2LowVHighA;
  if (!high_v) return Quadrant::Q3LowVLowA;
  return Quadrant::Q4HighVLowA;
}

namespace {

using nlohmann::json;

template <typename Key>
std::map<Key, std::vector<std::string>> by_quadrant(const json& section) {
  std::map<Key, std::vector<std::string>> out;
  for (auto q : kQuadrants) out[q] = section.at(std::string(short_name(q))).get<std::vector<std::string>>();
  return out;
}

std::array<std::vector<std::string>, 2> calm_energetic(const json& section) {
  return {section.at("calm").get<std::vector<std::string>>(),
          section.at("energetic").get<std::vector<std::string>>()};
}

}  // namespace

Lexicon Lexicon::from_json(const json& j) {
  Lexicon lex;
  try {
    lex.version = j.value("version", 1);
    for (auto c : kEnergyClasses) {
      lex.verbs[c] = j.at("verbs").at(std::string(to_string(c))).get<std::vector<std::string>>();
    }
    lex.styles = j.at("styles").get<std::vector<std::string>>();
    lex.palettes = by_quadrant<Quadrant>(j.at("palettes"));
    lex.lighting = by_quadrant<Quadrant>(j.at("lighting"));
    lex.framing = calm_energetic(j.at("framing"));
    lex.viewpoints = calm_energetic(j.at("viewpoints"));
    lex.scene_categories = j.at("scene_categories").get<std::vector<std::string>>();
    lex.synonyms = j.at("synonyms").get<std::map<std::string, std::vector<std::string>>>();
    lex.subjects = j.at("subjects").get<std::vector<std::string>>();
    lex.default_subject = j.at("default_subject").get<std::string>();
    lex.scene_keywords = j.at("scene_keywords").get<std::map<std::string, std::vector<std::string>>>();
    lex.environments = j.at("environments").get<std::map<std::string, std::string>>();
    for (const auto& [name, entry] : j.at("genres").items()) {
      GenreEntry g{name, entry.at("keywords").get<std::vector<std::string>>(), {}};
      for (auto q : kQuadrants) g.styles[q] = entry.at("styles").at(std::string(short_name(q))).get<std::string>();
      lex.genres.push_back(std::move(g));
    }
    for (auto q : kQuadrants) {
      lex.default_styles[q] = j.at("default_styles").at(std::string(short_name(q))).get<std::string>();
    }
    lex.moods = by_quadrant<Quadrant>(j.at("moods"));
  } catch (const json::exception& e) {
    raise(ErrorCode::InvalidConfig, std::string("lexicon: ") + e.what());
  }
  lex.validate();
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open lexicon " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::InvalidConfig, fmt::format("lexicon {}: {}", path.string(), e.what()));
  }
  return from_json(j);
}

void Lexicon::validate() const {
  auto fail = [](const std::string& what) { raise(ErrorCode::InvalidConfig, "lexicon: " + what); };
  for (const auto& [c, list] : verbs) {
    if (list.empty()) fail(fmt::format("verbs.{} is empty", to_string(c)));
  }
  if (styles.empty()) fail("styles is empty");
  std::set<std::string> seen_palette;
  for (auto q : kQuadrants) {
    if (palettes.at(q).size() < 2) fail(fmt::format("palettes.{} needs at least two terms", short_name(q)));
    if (lighting.at(q).empty()) fail(fmt::format("lighting.{} is empty", short_name(q)));
    if (moods.at(q).empty()) fail(fmt::format("moods.{} is empty", short_name(q)));
    for (const auto& term : palettes.at(q)) {
      if (!seen_palette.insert(term).second) fail(fmt::format("palette term '{}' appears in two quadrants", term));
    }
    if (!is_style(default_styles.at(q))) fail(fmt::format("default style '{}' not in styles", default_styles.at(q)));
  }
  auto check_enum = [&](const std::array<std::vector<std::string>, 2>& sides, const auto& universe,
                        const char* section) {
    for (const auto& side : sides) {
      if (side.empty()) fail(fmt::format("{} has an empty side", section));
      for (const auto& v : side) {
        if (std::find(universe.begin(), universe.end(), v) == universe.end()) {
          fail(fmt::format("{} value '{}' is not a known value", section, v));
        }
      }
    }
  };
  check_enum(framing, kFramings, "framing");
  check_enum(viewpoints, kViewpoints, "viewpoints");
  if (scene_categories.empty()) fail("scene_categories is empty");
  for (const auto& [category, words] : scene_keywords) {
    if (!is_category(category)) fail(fmt::format("scene_keywords category '{}' not in scene_categories", category));
  }
  for (const auto& category : scene_categories) {
    if (!environments.contains(category)) fail(fmt::format("no default environment for '{}'", category));
  }
  if (subjects.empty() || default_subject.empty()) fail("subjects/default_subject missing");
  for (const auto& g : genres) {
    for (const auto& [q, style] : g.styles) {
      if (!is_style(style)) fail(fmt::format("genre '{}' maps to unknown style '{}'", g.name, style));
    }
  }
}

bool Lexicon::is_style(std::string_view label) const {
  return std::find(styles.begin(), styles.end(), label) != styles.end();
}

bool Lexicon::is_category(std::string_view label) const {
  return std::find(scene_categories.begin(), scene_categories.end(), label) != scene_categories.end();
}

std::optional<Quadrant> Lexicon::palette_family(std::string_view term) const {
  for (const auto& [q, terms] : palettes) {
    if (std::find(terms.begin(), terms.end(), term) != terms.end()) return q;
  }
  return std::nullopt;
}

}  // namespace mesa::agents
