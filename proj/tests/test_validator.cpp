#include <gtest/gtest.h>

#include "mesa/agents/validator.hpp"
#include "support/test_support.hpp"

using namespace mesa;
using namespace mesa::agents;
using testing_support::Gen;

namespace {

const Lexicon& lex() {
  static const Lexicon l = Lexicon::load(testing_support::data_dir() / "lexicon.json");
  return l;
}

// Calm, sad, consistent: Q3 at arousal 0.3 (gentle band).
constexpr VAPoint kCalm{0.2, 0.3};

AttributeBundle clean() {
  AttributeBundle b;
  b.scene = {{"pianist"}, "rainy city at night", "urban"};
  b.verb = VerbAttributes{"strolling", "gentle"};
  b.style = StyleAttributes{"watercolor"};
  b.color = ColorAttributes{{"slate blue", "misty gray"}, "cold moonlight"};
  b.composition = CompositionAttributes{"medium", "eye-level"};
  return b;
}

int count(const ValidationReport& r, const std::string& rule, Severity s) {
  int n = 0;
  for (const auto& f : r.flags) n += (f.rule_id == rule && f.severity == s) ? 1 : 0;
  return n;
}

}  // namespace

TEST(Validator, CleanBundleIsSilent) {
  auto r = validate(clean(), kCalm, lex());
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.flags.empty()) << to_json(r).dump();
}

TEST(Validator, R1RedundancyWarns) {
  auto b = clean();
  b.scene.subjects = {"rain"};
  b.scene.environment = "rain soaked street";
  b.color->lighting = "cold rain glow";
  auto r = validate(b, kCalm, lex());
  EXPECT_EQ(count(r, "R1", Severity::Warning), 1) << to_json(r).dump();
  EXPECT_TRUE(r.passed) << "a warning alone must not fail the bundle";

  // Two fields are not enough.
  b.color->lighting = "cold moonlight";
  EXPECT_EQ(count(validate(b, kCalm, lex()), "R1", Severity::Warning), 0);
}

TEST(Validator, R2FormatErrors) {
  auto b = clean();
  b.style->label = "vaporwave collage";
  auto r = validate(b, kCalm, lex());
  EXPECT_GE(count(r, "R2", Severity::Error), 1);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.roles_with_errors(), std::vector<AgentRole>{AgentRole::Style});

  b = clean();
  b.color->palette = {"slate blue"};
  EXPECT_GE(count(validate(b, kCalm, lex()), "R2", Severity::Error), 1);
  b.color->palette = {"slate blue", "misty gray", "muted teal", "pale lavender", "faded denim", "ash green"};
  EXPECT_GE(count(validate(b, kCalm, lex()), "R2", Severity::Error), 1);

  b = clean();
  b.composition->framing = "fisheye";
  EXPECT_GE(count(validate(b, kCalm, lex()), "R2", Severity::Error), 1);

  b = clean();
  b.verb->action = "running";  // a dynamic verb filed under gentle
  EXPECT_GE(count(validate(b, kCalm, lex()), "R2", Severity::Error), 1);
}

TEST(Validator, R3AffectContradictions) {
  auto b = clean();
  b.verb = VerbAttributes{"resting", "static"};
  auto r = validate(b, {0.2, 0.9}, lex());
  EXPECT_GE(count(r, "R3", Severity::Error), 1);
  EXPECT_FALSE(r.passed);

  // One band away is tolerated.
  EXPECT_EQ(count(validate(b, {0.2, 0.3}, lex()), "R3", Severity::Error), 0);

  b = clean();
  b.color->palette = {"slate blue", "crimson"};
  r = validate(b, kCalm, lex());
  EXPECT_GE(count(r, "R3", Severity::Error), 1);
  EXPECT_EQ(r.roles_with_errors(), std::vector<AgentRole>{AgentRole::Color});
}

TEST(Validator, R4EmptinessAndOverflow) {
  auto b = clean();
  b.scene.subjects.clear();
  auto r = validate(b, kCalm, lex());
  EXPECT_GE(count(r, "R4", Severity::Error), 1);

  b = clean();
  b.scene.environment = std::string(600, 'x');
  r = validate(b, kCalm, lex());
  EXPECT_GE(count(r, "R4", Severity::Error), 1);
  EXPECT_FALSE(r.passed);
}

TEST(Validator, AblatedAttributesAreSkipped) {
  auto b = clean();
  b.verb.reset();
  b.composition.reset();
  EXPECT_TRUE(validate(b, kCalm, lex()).flags.empty());
}

TEST(Validator, PropertyIdempotentAndPure) {
  Gen g(77);
  const std::vector<std::string> junk{"", "crimson", "rain", "fisheye", "static", "watercolor"};
  for (int trial = 0; trial < 200; ++trial) {
    auto b = clean();
    if (g.coin()) b.scene.environment += " " + junk[g.index(junk.size())];
    if (g.coin()) b.style->label = junk[g.index(junk.size())];
    if (g.coin()) b.color->palette.push_back(junk[g.index(junk.size())]);
    if (g.coin()) b.verb->energy_class = junk[g.index(junk.size())];
    if (g.coin(0.2)) b.scene.subjects.clear();
    const auto before = b;
    const auto va = g.va();
    const auto r1 = validate(b, va, lex());
    const auto r2 = validate(b, va, lex());
    EXPECT_EQ(r1, r2);
    EXPECT_EQ(b, before);
    bool has_error = false;
    for (const auto& f : r1.flags) has_error = has_error || f.severity == Severity::Error;
    EXPECT_EQ(r1.passed, !has_error);
    EXPECT_EQ(report_from_json(to_json(r1)), r1);
  }
}
