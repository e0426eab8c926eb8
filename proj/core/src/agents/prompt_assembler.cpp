#include "mesa/agents/prompt_assembler.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "mesa/backends/stable_hash.hpp"
#include "mesa/backends/wire.hpp"
#include "mesa/error.hpp"

namespace mesa::agents {
namespace {

std::string join_subjects(const std::vector<std::string>& subjects) {
  if (subjects.empty()) return {};
  if (subjects.size() == 1) return subjects.front();
  std::vector<std::string> head(subjects.begin(), subjects.end() - 1);
  return fmt::format("{} and {}", fmt::join(head, ", "), subjects.back());
}

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : state_(seed) {}

  std::size_t below(std::size_t bound) {
    const std::uint64_t b = bound;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    std::uint64_t x;
    do {
      x = splitmix64(state_);
    } while (x >= limit);
    return static_cast<std::size_t>(x % b);
  }

  bool coin() { return below(2) == 1; }

 private:
  std::uint64_t state_;
};

enum class Clause { Style, Palette, Lighting, Composition, Mood };

struct Variant {
  bool canonical = false;
  Draw* draw = nullptr;
  const Lexicon* lexicon = nullptr;

  // Either the word itself or one of its lexicon synonyms.
  std::string word(const std::string& w) const {
    if (canonical) return w;
    auto it = lexicon->synonyms.find(w);
    if (it == lexicon->synonyms.end() || it->second.empty()) return w;
    const auto pick = draw->below(it->second.size() + 1);
    return pick == 0 ? w : it->second[pick - 1];
  }

  std::size_t phrasing(std::size_t count) const { return canonical ? 0 : draw->below(count); }
};

std::string head_clause(const AttributeBundle& b, const Variant& v, bool drop_action) {
  std::string out = join_subjects(b.scene.subjects);
  if (b.verb && !drop_action) out += " " + v.word(b.verb->action);
  out += " " + v.word("in") + " " + b.scene.environment;
  return out;
}

std::string render_clause(Clause c, const AttributeBundle& b, const Variant& v, const std::string& mood) {
  switch (c) {
    case Clause::Style: {
      const auto& s = b.style->label;
      switch (v.phrasing(4)) {
        case 0: return s;
        case 1: return s + " style";
        case 2: return "rendered in " + s;
        default: return "in the style of " + s;
      }
    }
    case Clause::Palette: {
      const auto terms = fmt::format("{}", fmt::join(b.color->palette, ", "));
      const auto noun = v.word("palette");
      return v.phrasing(2) == 0 ? terms + " " + noun : noun + " of " + terms;
    }
    case Clause::Lighting: {
      const auto& l = b.color->lighting;
      switch (v.phrasing(3)) {
        case 0: return l;
        case 1: return "lit by " + l;
        default: return "under " + l;
      }
    }
    case Clause::Composition: {
      const auto framing = v.word(b.composition->framing);
      const auto viewpoint = v.word(b.composition->viewpoint);
      const auto shot = v.word("shot");
      switch (v.phrasing(3)) {
        case 0: return fmt::format("{} {}, {}", framing, shot, viewpoint);
        case 1: return fmt::format("{} {} {}", viewpoint, framing, shot);
        default: return fmt::format("{} {} seen from {}", framing, shot, viewpoint);
      }
    }
    case Clause::Mood:
      return v.phrasing(2) == 0 ? mood + " mood" : mood + " atmosphere";
  }
  return {};
}

std::vector<Clause> present_clauses(const AttributeBundle& b) {
  std::vector<Clause> out;
  if (b.style) out.push_back(Clause::Style);
  if (b.color) {
    out.push_back(Clause::Palette);
    out.push_back(Clause::Lighting);
  }
  if (b.composition) out.push_back(Clause::Composition);
  return out;
}

std::string compose(const std::string& head, const std::vector<std::string>& clauses) {
  std::string out = head;
  for (const auto& c : clauses) out += ", " + c;
  return out;
}

}  // namespace

std::string canonical_prompt(const AttributeBundle& bundle) {
  Variant v{true, nullptr, nullptr};
  std::vector<std::string> parts;
  for (auto c : present_clauses(bundle)) parts.push_back(render_clause(c, bundle, v, {}));
  return compose(head_clause(bundle, v, false), parts);
}

PromptSet assemble_prompts(const AttributeBundle& bundle, std::size_t k, std::int64_t seed, const Lexicon& lexicon,
                           std::string clip_id) {
  require(k >= 1, ErrorCode::PreconditionViolated, "k must be at least 1");
  require(!bundle.scene.subjects.empty(), ErrorCode::PreconditionViolated, "bundle has no subjects");

  PromptSet set{std::move(clip_id), {}, seed, bundle};
  const auto canonical = canonical_prompt(bundle);
  std::set<std::string> seen{canonical};
  set.prompts.push_back(canonical);

  // The mood vocabulary follows the palette's quadrant.
  const std::vector<std::string>* moods = nullptr;
  if (bundle.color && !bundle.color->palette.empty()) {
    if (auto q = lexicon.palette_family(bundle.color->palette.front())) moods = &lexicon.moods.at(*q);
  }

  Draw draw(stable_hash(canonical, static_cast<std::uint64_t>(seed)));
  const Variant v{false, &draw, &lexicon};
  const std::size_t max_attempts = k * 50;
  for (std::size_t attempt = 0; set.prompts.size() < k && attempt < max_attempts; ++attempt) {
    auto clauses = present_clauses(bundle);
    std::string mood;
    if (moods && draw.coin()) {
      mood = (*moods)[draw.below(moods->size())];
      clauses.push_back(Clause::Mood);
    }
    for (std::size_t i = clauses.size(); i > 1; --i) std::swap(clauses[i - 1], clauses[draw.below(i)]);

    // Elide at most one of action / lighting / composition (never subjects,
    // style or palette).
    bool drop_action = false;
    switch (draw.below(6)) {
      case 0: drop_action = true; break;
      case 1: std::erase(clauses, Clause::Lighting); break;
      case 2: std::erase(clauses, Clause::Composition); break;
      default: break;
    }

    const auto head = head_clause(bundle, v, drop_action);
    std::vector<std::string> parts;
    for (auto c : clauses) parts.push_back(render_clause(c, bundle, v, mood));
    auto prompt = compose(head, parts);
    if (prompt.size() > backends::kMaxPromptChars) continue;
    if (seen.insert(prompt).second) set.prompts.push_back(std::move(prompt));
  }
  if (set.prompts.size() < k) {
    raise(ErrorCode::InsufficientDiversity,
          fmt::format("only {} distinct prompts after {} attempts (k = {})", set.prompts.size(), max_attempts, k));
  }
  return set;
}

}  // namespace mesa::agents
