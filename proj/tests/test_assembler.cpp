#include <algorithm>
#include <fstream>

#include <gtest/gtest.h>

#include "mesa/agents/agents.hpp"
#include "mesa/agents/prompt_assembler.hpp"
#include "mesa/corpus/loaders.hpp"
#include "mesa/error.hpp"
#include "mesa/metrics/text_metrics.hpp"
#include "support/test_support.hpp"

using namespace mesa;
using namespace mesa::agents;
using testing_support::Gen;

namespace {

const Lexicon& lex() {
  static const Lexicon l = Lexicon::load(testing_support::data_dir() / "lexicon.json");
  return l;
}

AttributeBundle sample_bundle() {
  AttributeBundle b;
  b.scene = {{"pianist"}, "rainy city at night", "urban"};
  b.verb = VerbAttributes{"strolling", "gentle"};
  b.style = StyleAttributes{"watercolor"};
  b.color = ColorAttributes{{"slate blue", "misty gray"}, "cold moonlight"};
  b.composition = CompositionAttributes{"medium", "eye-level"};
  return b;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool mentions(const std::string& prompt, const std::string& term) {
  return lower(prompt).find(lower(term)) != std::string::npos;
}

}  // namespace

TEST(Assembler, SingleCanonicalPrompt) {
  auto set = assemble_prompts(sample_bundle(), 1, 7, lex());
  ASSERT_EQ(set.prompts.size(), 1u);
  EXPECT_EQ(set.prompts[0],
            "pianist strolling in rainy city at night, watercolor, slate blue, misty gray palette, "
            "cold moonlight, medium shot, eye-level");
  EXPECT_EQ(set.prompts[0], canonical_prompt(sample_bundle()));
}

TEST(Assembler, CanonicalJoinsSubjectsAndOmitsAblated) {
  auto b = sample_bundle();
  b.scene.subjects = {"a", "b", "c"};
  b.verb.reset();
  b.composition.reset();
  EXPECT_EQ(canonical_prompt(b), "a, b and c in rainy city at night, watercolor, slate blue, misty gray palette, "
                                 "cold moonlight");
}

TEST(Assembler, Deterministic) {
  EXPECT_EQ(assemble_prompts(sample_bundle(), 4, 7, lex()), assemble_prompts(sample_bundle(), 4, 7, lex()));
  EXPECT_NE(assemble_prompts(sample_bundle(), 4, 7, lex()).prompts,
            assemble_prompts(sample_bundle(), 4, 8, lex()).prompts);
}

TEST(Assembler, RecombinationLiftsDistinct2) {
  auto set = assemble_prompts(sample_bundle(), 4, 7, lex());
  const std::vector<std::string> copies(4, set.prompts[0]);
  const auto varied = metrics::distinct_n(metrics::tokenize_all(set.prompts), 2);
  const auto flat = metrics::distinct_n(metrics::tokenize_all(copies), 2);
  EXPECT_GT(varied, flat);
}

TEST(Assembler, InsufficientDiversity) {
  AttributeBundle bare;
  bare.scene = {{"pianist"}, "rainy city at night", "urban"};
  // Without synonyms a scene-only bundle has exactly one phrasing.
  auto plain = lex();
  plain.synonyms.clear();
  EXPECT_EQ(assemble_prompts(bare, 1, 1, plain).prompts.size(), 1u);
  try {
    assemble_prompts(bare, 2, 1, plain);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientDiversity);
  }
}

TEST(Assembler, PropertyInvariantsOnRuleBundles) {
  std::ifstream f(testing_support::data_dir() / "sample" / "captions.jsonl");
  const auto captions = corpus::load_captions(f, {-1, 1});
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Gen g(seed);
    const auto& cap = captions[g.index(captions.size())].caption;
    const auto va = g.va();
    AttributeBundle b;
    b.scene = rule_scene(cap, lex());
    if (g.coin(0.8)) b.verb = rule_verb(cap, va, lex());
    b.style = rule_style(cap, va, lex());
    b.color = rule_color(cap, va, lex());
    if (g.coin(0.8)) b.composition = rule_composition(cap, va, lex());
    const std::size_t k = g.between(1, 8);
    auto set = assemble_prompts(b, k, static_cast<std::int64_t>(g.rng()), lex());

    ASSERT_EQ(set.prompts.size(), k);
    auto sorted = set.prompts;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end()) << "duplicate prompt";
    for (const auto& p : set.prompts) {
      EXPECT_LE(p.size(), 512u);
      for (const auto& s : b.scene.subjects) EXPECT_TRUE(mentions(p, s)) << p;
      EXPECT_TRUE(mentions(p, b.style->label)) << p;
      EXPECT_TRUE(std::any_of(b.color->palette.begin(), b.color->palette.end(),
                              [&](const std::string& t) { return mentions(p, t); }))
          << p;
      if (!b.composition) {
        EXPECT_FALSE(mentions(p, " shot")) << p;
      }
    }
  }
}
