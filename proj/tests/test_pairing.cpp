#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "mesa/error.hpp"
#include "mesa/pairing/pairing.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

using namespace mesa;
using namespace mesa::pairing;
using testing_support::Gen;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

std::vector<MusicPoint> music_points(Gen& g, std::size_t n) {
  std::vector<MusicPoint> m;
  for (std::size_t i = 0; i < n; ++i) m.push_back({"m" + std::to_string(100 + i), g.va()});
  return m;
}

std::vector<ImagePoint> image_points(Gen& g, std::size_t n) {
  std::vector<ImagePoint> m;
  for (std::size_t i = 0; i < n; ++i) m.push_back({"i" + std::to_string(100 + i), g.va()});
  return m;
}

// Pairs as (music index, image index), order-insensitive.
std::set<std::pair<int, int>> index_pairs(const PairingResult& r) {
  std::set<std::pair<int, int>> out;
  for (const auto& p : r.pairs) out.insert({std::stoi(p.clip_id.substr(1)) - 100, std::stoi(p.image_id.substr(1)) - 100});
  return out;
}

}  // namespace

TEST(Pairing, ExactMatchWins) {
  std::vector<MusicPoint> m{{"c", {0.5, 0.5}}};
  std::vector<ImagePoint> i{{"far", {0, 0}}, {"near", {0.5, 0.5}}};
  auto r = pair_by_va(m, i, 1);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].image_id, "near");
  EXPECT_DOUBLE_EQ(r.pairs[0].similarity, 1.0);
}

TEST(Pairing, ToyGridMatchesExhaustiveSearch) {
  // A fixed 3x3 grid, then random 3x3 instances with varying thresholds.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Gen g(seed);
    std::vector<MusicPoint> m;
    std::vector<ImagePoint> im;
    if (seed == 0) {
      m = {{"m100", {0.1, 0.1}}, {"m101", {0.5, 0.5}}, {"m102", {0.9, 0.8}}};
      im = {{"i100", {0.45, 0.55}}, {"i101", {0.2, 0.05}}, {"i102", {0.7, 0.95}}};
    } else {
      m = music_points(g, 3);
      im = image_points(g, 3);
    }
    const double min_sim = seed % 2 ? 0.0 : g.uniform(0.5, 0.95);
    std::vector<oracle::Pt> mo, io;
    for (const auto& p : m) mo.push_back({p.va.valence, p.va.arousal});
    for (const auto& p : im) io.push_back({p.va.valence, p.va.arousal});
    std::set<std::pair<int, int>> expected;
    for (auto [a, b] : oracle::best_matching(mo, io, min_sim)) expected.insert({a, b});
    EXPECT_EQ(index_pairs(pair_by_va(m, im, 3, min_sim)), expected) << "seed " << seed;
  }
}

TEST(Pairing, PropertyInjectiveOrderedDeterministic) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Gen g(900 + seed);
    auto m = music_points(g, g.between(1, 40));
    auto im = image_points(g, g.between(1, 40));
    const std::size_t n = g.between(1, 50);
    const double min_sim = g.uniform(0.0, 0.95);
    auto r = pair_by_va(m, im, n, min_sim);

    std::set<std::string> clips, images;
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
      const auto& p = r.pairs[i];
      EXPECT_TRUE(clips.insert(p.clip_id).second) << "clip reused, seed " << seed;
      EXPECT_TRUE(images.insert(p.image_id).second) << "image reused, seed " << seed;
      EXPECT_GE(p.similarity, min_sim);
      if (i > 0) {
        EXPECT_LE(p.similarity, r.pairs[i - 1].similarity);
      }
      const auto& mv = std::find_if(m.begin(), m.end(), [&](auto& x) { return x.clip_id == p.clip_id; })->va;
      const auto& iv = std::find_if(im.begin(), im.end(), [&](auto& x) { return x.image_id == p.image_id; })->va;
      EXPECT_NEAR(p.similarity, oracle::pair_sim({mv.valence, mv.arousal}, {iv.valence, iv.arousal}), 1e-12);
    }
    EXPECT_LE(r.pairs.size(), n);
    EXPECT_EQ(r.insufficient(), r.pairs.size() < n);

    // Input order and thread count do not matter.
    std::shuffle(m.begin(), m.end(), g.rng);
    std::shuffle(im.begin(), im.end(), g.rng);
    EXPECT_EQ(pair_by_va(m, im, n, min_sim, 3).pairs, r.pairs) << "seed " << seed;
  }
}

TEST(Pairing, Errors) {
  std::vector<MusicPoint> m{{"a", {0.5, 0.5}}};
  std::vector<ImagePoint> i{{"x", {0.5, 0.5}}}, none;
  EXPECT_EQ(code_of([&] { pair_by_va(m, none, 1); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([&] { pair_by_va(m, i, 0); }), ErrorCode::PreconditionViolated);
  std::vector<MusicPoint> dup{{"a", {0.1, 0.1}}, {"a", {0.2, 0.2}}};
  EXPECT_EQ(code_of([&] { pair_by_va(dup, i, 1); }), ErrorCode::DuplicateId);
}

TEST(Pairing, InsufficientIsReportedNotThrown) {
  std::vector<MusicPoint> m{{"a", {0, 0}}, {"b", {1, 1}}};
  std::vector<ImagePoint> i{{"x", {0, 0.05}}};
  auto r = pair_by_va(m, i, 2);
  EXPECT_EQ(r.pairs.size(), 1u);
  EXPECT_TRUE(r.insufficient());
  EXPECT_EQ(pair_from_json(to_json(r.pairs[0])), r.pairs[0]);
}
