#include "mesa/pairing/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <set>
#include <thread>

#include "mesa/error.hpp"

namespace mesa::pairing {
namespace {

struct Candidate {
  double similarity;
  std::size_t clip;   // index into music
  std::size_t image;  // index into images
};

// Larger = earlier in the greedy order.
struct Before {
  std::span<const MusicPoint> music;
  std::span<const ImagePoint> images;
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (music[a.clip].clip_id != music[b.clip].clip_id) return music[a.clip].clip_id < music[b.clip].clip_id;
    return images[a.image].image_id < images[b.image].image_id;
  }
};

std::optional<Candidate> best_unused(std::size_t clip, std::span<const MusicPoint> music,
                                     std::span<const ImagePoint> images, const std::vector<char>& used,
                                     double min_similarity) {
  std::optional<Candidate> best;
  const Before before{music, images};
  for (std::size_t j = 0; j < images.size(); ++j) {
    if (used[j]) continue;
    const double s = pair_similarity(music[clip].va, images[j].va);
    if (s < min_similarity) continue;
    Candidate c{s, clip, j};
    if (!best || before(c, *best)) best = c;
  }
  return best;
}

template <typename Points, typename Id>
void check_unique(const Points& points, Id id, const char* what) {
  std::set<std::string> seen;
  for (const auto& p : points) {
    if (!seen.insert(id(p)).second) raise(ErrorCode::DuplicateId, std::string("duplicate ") + what + " " + id(p));
  }
}

}  // namespace

double pair_similarity(VAPoint a, VAPoint b) noexcept {
  return 1.0 - std::hypot(a.valence - b.valence, a.arousal - b.arousal) / std::sqrt(2.0);
}

PairingResult pair_by_va(std::span<const MusicPoint> music, std::span<const ImagePoint> images, std::size_t n_pairs,
                         double min_similarity, std::size_t threads) {
  require(!music.empty() && !images.empty(), ErrorCode::EmptyInput, "pairing needs music and images");
  require(n_pairs >= 1, ErrorCode::PreconditionViolated, "n_pairs must be at least 1");
  check_unique(music, [](const MusicPoint& m) { return m.clip_id; }, "clip_id");
  check_unique(images, [](const ImagePoint& m) { return m.image_id; }, "image_id");

  std::vector<char> used(images.size(), 0);
  std::vector<std::optional<Candidate>> initial(music.size());
  const auto workers = std::clamp<std::size_t>(threads, 1, music.size());
  {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < music.size(); i += workers) {
          initial[i] = best_unused(i, music, images, used, min_similarity);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // priority_queue pops its "largest" element; invert Before to get the
  // earliest candidate on top.
  const Before before{music, images};
  auto later = [&](const Candidate& a, const Candidate& b) { return before(b, a); };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(later)> heap(later);
  for (const auto& c : initial) {
    if (c) heap.push(*c);
  }

  PairingResult result;
  result.requested = n_pairs;
  while (!heap.empty() && result.pairs.size() < n_pairs) {
    const auto top = heap.top();
    heap.pop();
    if (used[top.image]) {
      // Stale: this clip's best image was taken; look again.
      if (auto next = best_unused(top.clip, music, images, used, min_similarity)) heap.push(*next);
      continue;
    }
    used[top.image] = 1;
    result.pairs.push_back({music[top.clip].clip_id, images[top.image].image_id, top.similarity});
  }
  return result;
}

nlohmann::ordered_json to_json(const CrossModalPair& pair) {
  return {{"clip_id", pair.clip_id}, {"image_id", pair.image_id}, {"similarity", pair.similarity}};
}

CrossModalPair pair_from_json(const nlohmann::json& j) {
  try {
    return {j.at("clip_id").get<std::string>(), j.at("image_id").get<std::string>(), j.at("similarity").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("pair: ") + e.what());
  }
}

}  // namespace mesa::pairing
