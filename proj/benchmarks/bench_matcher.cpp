#include <benchmark/benchmark.h>

#include <vector>

#include "evaug/gen_loss.hpp"
#include "evaug/rng.hpp"

using namespace evaug;

namespace {

struct MatcherCase {
  TokenProbMatrix probs;
  std::vector<UncoveredElement> elements;
};

MatcherCase make_case(std::size_t rows, std::size_t vocab,
                      std::size_t n_elements) {
  Rng rng(rows * 131 + vocab * 17 + n_elements);
  MatcherCase c;
  for (std::size_t v = 0; v < vocab; ++v) {
    c.probs.vocab.push_back("w" + std::to_string(v));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row(vocab, 0.0);
    double total = 0.0;
    for (double& x : row) {
      x = rng.real01();
      total += x;
    }
    for (double& x : row) x /= total;
    c.probs.rows.push_back(std::move(row));
  }
  for (std::size_t m = 0; m < n_elements; ++m) {
    UncoveredElement e;
    const std::size_t width = 1 + rng.below(3);
    for (std::size_t w = 0; w < width; ++w) {
      const std::size_t idx = rng.below(vocab);
      e.words.push_back(c.probs.vocab[idx]);
      e.onehot_index.push_back(idx);
    }
    c.elements.push_back(std::move(e));
  }
  return c;
}

}  // namespace

static void BM_GreedyAssign(benchmark::State& state) {
  const auto c = make_case(state.range(0), state.range(1), state.range(2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_assign(c.elements, c.probs));
  }
}
BENCHMARK(BM_GreedyAssign)
    ->Args({20, 30, 5})
    ->Args({64, 100, 8})
    ->Args({128, 300, 12});

static void BM_L1WindowDistance(benchmark::State& state) {
  const auto c = make_case(64, state.range(0), 1);
  const Window window{0, c.elements[0].words.size() - 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        l1_window_distance(c.elements[0], c.probs, window));
  }
}
BENCHMARK(BM_L1WindowDistance)->Arg(50)->Arg(300)->Arg(1000);

static void BM_LmLoss(benchmark::State& state) {
  const auto c = make_case(state.range(0), 100, 1);
  std::vector<std::string> targets;
  Rng rng(7);
  for (std::size_t s = 0; s < c.probs.rows.size(); ++s) {
    targets.push_back(c.probs.vocab[rng.below(c.probs.vocab.size())]);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(lm_loss(c.probs, targets));
  }
}
BENCHMARK(BM_LmLoss)->Arg(16)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
