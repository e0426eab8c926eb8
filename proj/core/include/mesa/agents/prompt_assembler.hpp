#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesa/agents/attributes.hpp"
#include "mesa/agents/lexicon.hpp"

namespace mesa::agents {

inline constexpr std::size_t kDefaultPromptCount = 4;

struct PromptSet {
  std::string clip_id;
  std::vector<std::string> prompts;
  std::int64_t seed = 0;
  AttributeBundle bundle;
  friend bool operator==(const PromptSet&, const PromptSet&) = default;
};

/// "<subjects> <action> in <environment>, <style>, <palette> palette,
/// <lighting>, <framing> shot, <viewpoint>". Clauses of absent attributes are
/// left out.
std::string canonical_prompt(const AttributeBundle& bundle);

/// Prompt 0 is the canonical one; the rest come from clause reordering,
/// alternative phrasings, lexicon synonyms, an optional mood clause and
/// eliding at most one of action/lighting/composition. Subjects, style label
/// and palette terms are never altered. Throws InsufficientDiversity if k
/// distinct prompts cannot be found.
PromptSet assemble_prompts(const AttributeBundle& bundle, std::size_t k, std::int64_t seed,
                           const Lexicon& lexicon, std::string clip_id = {});

}  // namespace mesa::agents
