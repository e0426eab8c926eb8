#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/types.hpp"

namespace mesa::agents {

enum class EnergyClass { Static, Gentle, Moderate, Dynamic, Explosive };

inline constexpr std::array<EnergyClass, 5> kEnergyClasses{
    EnergyClass::Static, EnergyClass::Gentle, EnergyClass::Moderate, EnergyClass::Dynamic,
    EnergyClass::Explosive};

std::string_view to_string(EnergyClass c) noexcept;
std::optional<EnergyClass> energy_class_from_string(std::string_view text) noexcept;

enum class Quadrant { Q1HighVHighA, Q2LowVHighA, Q3LowVLowA, Q4HighVLowA };

inline constexpr std::array<Quadrant, 4> kQuadrants{Quadrant::Q1HighVHighA, Quadrant::Q2LowVHighA,
                                                    Quadrant::Q3LowVLowA, Quadrant::Q4HighVLowA};

/// "Q1".."Q4", the key used in lexicon sections.
std::string_view short_name(Quadrant q) noexcept;
/// "Q1_high_v_high_a" etc.
std::string_view to_string(Quadrant q) noexcept;
std::optional<Quadrant> quadrant_from_short_name(std::string_view text) noexcept;

inline constexpr std::array<std::string_view, 4> kFramings{"close-up", "medium", "wide", "panoramic"};
inline constexpr std::array<std::string_view, 4> kViewpoints{"eye-level", "low-angle", "high-angle", "aerial"};

/// Thresholds that tie valence-arousal to attribute choices. Shared by the
/// agents and the validator so the two can never disagree.
struct AffectTables {
  /// Upper edges of the static/gentle/moderate/dynamic bands.
  std::array<double, 4> arousal_band_edges{0.2, 0.4, 0.6, 0.8};
  double quadrant_threshold = 0.5;
  /// Allowed distance between an agent's energy class and the arousal band.
  int energy_tolerance = 1;
  /// Arousal from which composition favors wide framing and low/aerial views.
  double energetic_arousal = 0.6;
};

EnergyClass energy_class_for(double arousal, const AffectTables& tables = {});

/// Componentwise threshold; a coordinate equal to the threshold counts as high.
Quadrant va_quadrant(VAPoint va, const AffectTables& tables = {});

struct GenreEntry {
  std::string name;
  std::vector<std::string> keywords;
  std::map<Quadrant, std::string> styles;
};

/// Vocabulary for the attribute agents, loaded from the lexicon JSON file.
struct Lexicon {
  int version = 1;
  std::map<EnergyClass, std::vector<std::string>> verbs;
  std::vector<std::string> styles;
  std::map<Quadrant, std::vector<std::string>> palettes;
  std::map<Quadrant, std::vector<std::string>> lighting;
  /// Framing / viewpoint choices for calm (index 0) and energetic (index 1) music.
  std::array<std::vector<std::string>, 2> framing;
  std::array<std::vector<std::string>, 2> viewpoints;
  std::vector<std::string> scene_categories;
  std::map<std::string, std::vector<std::string>> synonyms;

  // Sections used by the offline rule backend.
  std::vector<std::string> subjects;
  std::string default_subject;
  std::map<std::string, std::vector<std::string>> scene_keywords;
  std::map<std::string, std::string> environments;
  std::vector<GenreEntry> genres;
  std::map<Quadrant, std::string> default_styles;
  std::map<Quadrant, std::vector<std::string>> moods;

  static Lexicon from_json(const nlohmann::json& j);
  static Lexicon load(const std::filesystem::path& path);

  /// Cross-section consistency (every referenced style exists, no section
  /// empty, ...). Throws InvalidConfig.
  void validate() const;

  bool is_style(std::string_view label) const;
  bool is_category(std::string_view label) const;
  /// The quadrant whose palette list holds `term`, if any.
  std::optional<Quadrant> palette_family(std::string_view term) const;
};

}  // namespace mesa::agents
