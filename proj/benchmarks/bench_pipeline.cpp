#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "evaug/metrics.hpp"
#include "evaug/mocks.hpp"
#include "evaug/policy.hpp"
#include "evaug/prompts.hpp"
#include "evaug/rng.hpp"
#include "evaug/scoring.hpp"

using namespace evaug;

namespace {

std::string long_context(std::size_t tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens; ++i) {
    out += "tok" + std::to_string(i % 97);
    out += ' ';
  }
  out += '.';
  return out;
}

std::vector<EventRecord> synthetic_records(std::size_t n) {
  std::vector<EventRecord> out;
  Rng rng(n);
  for (std::size_t i = 0; i < n; ++i) {
    EventRecord r;
    r.event_type = i % 2 ? "A" : "B";
    const std::size_t t = rng.below(64);
    r.trigger = {"t", t, t + 1};
    const std::size_t s = rng.below(64);
    r.arguments.emplace_back("role", Span{"a", s, s + 1});
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

static void BM_MaskContext(benchmark::State& state) {
  const std::string context = long_context(state.range(0));
  for (auto _ : state) {
    Rng rng(11);
    benchmark::DoNotOptimize(mask_context(context, {}, 0.3, rng));
  }
}
BENCHMARK(BM_MaskContext)->Arg(32)->Arg(256)->Arg(2048);

static void BM_ScoreArguments(benchmark::State& state) {
  const auto pred = synthetic_records(state.range(0));
  const auto gold = synthetic_records(state.range(0) + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_arguments(pred, gold));
  }
}
BENCHMARK(BM_ScoreArguments)->Arg(8)->Arg(64)->Arg(256);

static void BM_EpisodeDiff(benchmark::State& state) {
  IdSet prev, curr;
  Rng rng(5);
  for (int i = 0; i < state.range(0); ++i) {
    const std::string id = "s" + std::to_string(i);
    if (rng.bernoulli(0.6)) prev.insert(id);
    if (rng.bernoulli(0.6)) curr.insert(id);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(episode_diff(prev, curr));
  }
}
BENCHMARK(BM_EpisodeDiff)->Arg(64)->Arg(1024)->Arg(8192);

static void BM_CorpusPll(benchmark::State& state) {
  auto lm = MockMaskedLM::unigram();
  std::vector<std::string> corpus;
  for (int i = 0; i < state.range(0); ++i) corpus.push_back(long_context(12));
  lm->fine_tune(corpus);
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus_pll(*lm, corpus));
  }
}
BENCHMARK(BM_CorpusPll)->Arg(10)->Arg(50)->Arg(200);
