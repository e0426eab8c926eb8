#pragma once

// Brute-force reference implementations. Written from the definitions, with
// no shared code paths with the library: nested loops, explicit counting,
// nothing clever. Used by both the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

inline double distinct_n(const std::vector<Tokens>& prompts, std::size_t n) {
  std::vector<std::vector<std::string>> seen;
  std::size_t total = 0;
  for (const auto& p : prompts) {
    if (p.size() < n) continue;
    for (std::size_t i = 0; i + n <= p.size(); ++i) {
      std::vector<std::string> gram(p.begin() + static_cast<long>(i), p.begin() + static_cast<long>(i + n));
      ++total;
      bool found = false;
      for (const auto& s : seen) found = found || s == gram;
      if (!found) seen.push_back(gram);
    }
  }
  return static_cast<double>(seen.size()) / static_cast<double>(total);
}

inline double entropy(const std::vector<std::string>& labels) {
  std::vector<std::string> distinct;
  for (const auto& l : labels)
    if (std::find(distinct.begin(), distinct.end(), l) == distinct.end()) distinct.push_back(l);
  double h = 0.0;
  for (const auto& d : distinct) {
    double c = 0.0;
    for (const auto& l : labels) c += (l == d) ? 1.0 : 0.0;
    const double p = c / static_cast<double>(labels.size());
    h -= p * std::log(p);
  }
  return h;
}

inline bool contains(const Tokens& t, const std::string& w) {
  for (const auto& x : t)
    if (x == w) return true;
  return false;
}

inline double jaccard(const Tokens& p, const Tokens& r) {
  Tokens uni;
  for (const auto& w : p)
    if (!contains(uni, w)) uni.push_back(w);
  for (const auto& w : r)
    if (!contains(uni, w)) uni.push_back(w);
  double inter = 0.0;
  for (const auto& w : uni) inter += (contains(p, w) && contains(r, w)) ? 1.0 : 0.0;
  return inter / static_cast<double>(uni.size());
}

inline double mean_jaccard(const std::vector<std::pair<Tokens, Tokens>>& pairs) {
  double s = 0.0;
  for (const auto& [p, r] : pairs) s += jaccard(p, r);
  return s / static_cast<double>(pairs.size());
}

inline bool copies(const Tokens& p, const Tokens& r, std::size_t run) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) {
      std::size_t len = 0;
      while (i + len < p.size() && j + len < r.size() && p[i + len] == r[j + len]) ++len;
      if (len >= run) return true;
    }
  return false;
}

inline double copy_rate(const std::vector<std::pair<Tokens, Tokens>>& pairs, std::size_t run) {
  double hits = 0.0;
  for (const auto& [p, r] : pairs) hits += copies(p, r, run) ? 1.0 : 0.0;
  return hits / static_cast<double>(pairs.size());
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline double semantic(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += cosine(a[i], b[i]);
  return s / static_cast<double>(a.size());
}

inline double s_mi(const std::vector<std::pair<double, double>>& music,
                   const std::vector<std::pair<double, double>>& image) {
  double d = 0.0;
  for (std::size_t i = 0; i < music.size(); ++i) {
    const double dv = music[i].first - image[i].first;
    const double da = music[i].second - image[i].second;
    d += std::sqrt(dv * dv + da * da);
  }
  return 1.0 - d / static_cast<double>(music.size()) / std::sqrt(2.0);
}

// Regression statistics, population convention.

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double var(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

inline double cov(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(x.size());
}

inline double rmse(const std::vector<double>& p, const std::vector<double>& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
  return std::sqrt(s / static_cast<double>(p.size()));
}

inline double mae(const std::vector<double>& p, const std::vector<double>& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - t[i]);
  return s / static_cast<double>(p.size());
}

inline double pearson(const std::vector<double>& p, const std::vector<double>& t) {
  return cov(p, t) / std::sqrt(var(p) * var(t));
}

// Rank = 1 + (#smaller) + (#equal - 1) / 2, which is the average of the tied
// positions.
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : x) {
      if (v < x[i]) less += 1;
      if (v == x[i]) equal += 1;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double spearman(const std::vector<double>& p, const std::vector<double>& t) {
  return pearson(ranks(p), ranks(t));
}

inline double ccc(const std::vector<double>& p, const std::vector<double>& t) {
  const double dm = mean(p) - mean(t);
  return 2.0 * cov(p, t) / (var(p) + var(t) + dm * dm);
}

inline double r2(const std::vector<double>& p, const std::vector<double>& t) {
  const double mt = mean(t);
  double res = 0, tot = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    res += (t[i] - p[i]) * (t[i] - p[i]);
    tot += (t[i] - mt) * (t[i] - mt);
  }
  return 1.0 - res / tot;
}

// Pairing: enumerate every injective assignment of up to 3 clips to images
// and keep the one whose similarity list, sorted descending, is
// lexicographically largest. That is what a greedy best-first matching
// produces when all similarities are distinct.
struct Pt {
  double v, a;
};

inline double pair_sim(Pt x, Pt y) {
  return 1.0 - std::sqrt((x.v - y.v) * (x.v - y.v) + (x.a - y.a) * (x.a - y.a)) / std::sqrt(2.0);
}

inline std::vector<std::pair<int, int>> best_matching(const std::vector<Pt>& music, const std::vector<Pt>& images,
                                                      double min_sim) {
  std::vector<int> perm(images.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::vector<std::pair<int, int>> best;
  std::vector<double> best_key;
  do {
    std::vector<std::pair<double, std::pair<int, int>>> chosen;
    for (std::size_t m = 0; m < music.size() && m < perm.size(); ++m) {
      const double s = pair_sim(music[m], images[static_cast<std::size_t>(perm[m])]);
      if (s >= min_sim) chosen.push_back({s, {static_cast<int>(m), perm[m]}});
    }
    std::sort(chosen.begin(), chosen.end(), [](auto& a, auto& b) { return a.first > b.first; });
    std::vector<double> key;
    for (auto& c : chosen) key.push_back(c.first);
    if (best.empty() || key > best_key) {
      best_key = key;
      best.clear();
      for (auto& c : chosen) best.push_back(c.second);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracle
