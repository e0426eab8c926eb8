#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "mesa/affect/regression_head.hpp"
#include "mesa/agents/agents.hpp"
#include "mesa/agents/prompt_assembler.hpp"
#include "mesa/metrics/text_metrics.hpp"
#include "mesa/pairing/pairing.hpp"

using namespace mesa;

namespace {

VAPoint random_va(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(rng), u(rng)};
}

std::vector<std::string> random_prompts(std::size_t n, std::size_t words, std::uint64_t seed) {
  static const std::vector<std::string> vocab{"crimson", "dusk",   "pianist", "rain",    "street", "wide",
                                              "shot",    "glow",   "violet",  "dancing", "neon",   "sky",
                                              "misty",   "golden", "harbor",  "storm",   "aerial", "calm"};
  std::mt19937_64 rng(seed);
  std::vector<std::string> out(n);
  for (auto& p : out) {
    for (std::size_t w = 0; w < words; ++w) p += (w ? ", " : "") + vocab[rng() % vocab.size()];
  }
  return out;
}

void BM_PairByVA(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<pairing::MusicPoint> music;
  std::vector<pairing::ImagePoint> images;
  for (std::size_t i = 0; i < n; ++i) music.push_back({"m" + std::to_string(i), random_va(rng)});
  for (std::size_t i = 0; i < n * 3 / 2; ++i) images.push_back({"i" + std::to_string(i), random_va(rng)});
  for (auto _ : state) benchmark::DoNotOptimize(pairing::pair_by_va(music, images, 400, 0.85, 1));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PairByVA)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond)->UseRealTime()->Complexity();

void BM_Tokenize(benchmark::State& state) {
  const auto prompts = random_prompts(1000, 20, 2);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::tokenize_all(prompts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(prompts.size()));
}
BENCHMARK(BM_Tokenize)->Unit(benchmark::kMillisecond);

void BM_DistinctN(benchmark::State& state) {
  const auto set = metrics::tokenize_all(random_prompts(static_cast<std::size_t>(state.range(0)), 20, 3));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::distinct_n(set, 2));
}
BENCHMARK(BM_DistinctN)->Arg(100)->Arg(1000)->Arg(10000);

void BM_FitRidge(benchmark::State& state) {
  const auto n = state.range(0);
  const auto d = state.range(1);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(n, d), Y(n, 2);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < Y.size(); ++i) Y.data()[i] = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(affect::fit_ridge(X, Y, 1.0));
}
BENCHMARK(BM_FitRidge)->Args({1000, 128})->Args({10000, 512})->Unit(benchmark::kMillisecond);

void BM_AssemblePrompts(benchmark::State& state) {
  const auto lexicon = agents::Lexicon::load(std::string(MESA_BENCH_DATA_DIR) + "/lexicon.json");
  const std::string caption = "a pianist playing softly in a rainy city at night, jazz";
  const VAPoint va{0.3, 0.3};
  agents::AttributeBundle b;
  b.scene = agents::rule_scene(caption, lexicon);
  b.verb = agents::rule_verb(caption, va, lexicon);
  b.style = agents::rule_style(caption, va, lexicon);
  b.color = agents::rule_color(caption, va, lexicon);
  b.composition = agents::rule_composition(caption, va, lexicon);
  std::int64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(agents::assemble_prompts(b, 4, seed++, lexicon));
}
BENCHMARK(BM_AssemblePrompts);

}  // namespace

BENCHMARK_MAIN();
