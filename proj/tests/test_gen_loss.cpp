#include <doctest.h>

#include <cmath>

#include "evaug/error.hpp"
#include "evaug/gen_loss.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace evaug;
using namespace evaug::testing;

namespace {

TokenProbMatrix uniform_matrix(std::size_t rows, std::size_t vocab) {
  TokenProbMatrix m;
  for (std::size_t v = 0; v < vocab; ++v) m.vocab.push_back("w" + std::to_string(v));
  m.rows.assign(rows, std::vector<double>(vocab, 1.0 / double(vocab)));
  return m;
}

UncoveredElement element_of(const std::vector<std::string>& words,
                            const TokenProbMatrix& m) {
  UncoveredElement e;
  e.source_text = join(words, " ");
  e.words = words;
  for (const auto& w : words) {
    auto idx = m.vocab_index(w);
    REQUIRE(idx.has_value());
    e.onehot_index.push_back(*idx);
  }
  return e;
}

}  // namespace

TEST_SUITE("generation_training") {

TEST_CASE("fully covered record yields no uncovered elements") {
  const AnnotatedSentence s = fig1_sentence();
  const auto vocab = split_whitespace(s.context);
  CHECK(find_uncovered_elements(s.records[0], s.context, vocab).empty());
}

TEST_CASE("one missing argument yields exactly that element") {
  const AnnotatedSentence s = fig1_sentence();
  std::string text = s.context;
  // Drop "airports" from the generated text, everything else intact.
  const std::size_t at = text.find("airports");
  text = text.substr(0, at) + "somewhere" + text.substr(at + 8);
  const auto vocab = split_whitespace(s.context);
  const auto uncovered = find_uncovered_elements(s.records[0], text, vocab);
  REQUIRE(uncovered.size() == 1);
  CHECK(uncovered[0].source_text == "airports");
  CHECK(uncovered[0].words == std::vector<std::string>{"airports"});
  CHECK(uncovered[0].encodable);
}

TEST_CASE("empty generated text leaves every element uncovered") {
  const AnnotatedSentence s = fig1_sentence();
  const auto vocab = split_whitespace(s.context);
  const auto uncovered = find_uncovered_elements(s.records[0], "", vocab);
  CHECK(uncovered.size() == 1 + s.records[0].arguments.size());
}

TEST_CASE("word-boundary containment does not cover substrings") {
  EventRecord r;
  r.event_type = "Movement:Transport";
  r.trigger = {"art", 0, 3};
  const auto uncovered = find_uncovered_elements(r, "the party ended", {"art"});
  REQUIRE(uncovered.size() == 1);
  CHECK(uncovered[0].source_text == "art");
}

TEST_CASE("out-of-vocabulary words flag the element, never drop it") {
  EventRecord r;
  r.event_type = "Movement:Transport";
  r.trigger = {"exotic", 0, 6};
  const auto uncovered = find_uncovered_elements(r, "plain text", {"plain"});
  REQUIRE(uncovered.size() == 1);
  CHECK_FALSE(uncovered[0].encodable);
  CHECK(uncovered[0].oov_words == std::vector<std::string>{"exotic"});
}

TEST_CASE("candidate window counts") {
  TokenProbMatrix m = uniform_matrix(5, 3);
  UncoveredElement two = element_of({"w0", "w1"}, m);
  CHECK(candidate_windows(m, two).size() == 4);

  TokenProbMatrix m3 = uniform_matrix(3, 3);
  UncoveredElement three = element_of({"w0", "w1", "w2"}, m3);
  CHECK(candidate_windows(m3, three).size() == 1);

  TokenProbMatrix m2 = uniform_matrix(2, 3);
  CHECK(candidate_windows(m2, three).empty());
}

TEST_CASE("l1 distance is zero on a certain row and hand-checkable otherwise") {
  TokenProbMatrix m;
  m.vocab = {"a", "b", "c"};
  m.rows = {{0.0, 1.0, 0.0}, {0.1, 0.8, 0.1}};
  UncoveredElement e = element_of({"b"}, m);
  CHECK(l1_window_distance(e, m, {0, 0}) == doctest::Approx(0.0));
  CHECK(l1_window_distance(e, m, {1, 1}) == doctest::Approx(0.4));
}

TEST_CASE("l1 distance is invariant to jointly permuting vocab order") {
  TokenProbMatrix m;
  m.vocab = {"a", "b", "c"};
  m.rows = {{0.2, 0.5, 0.3}};
  TokenProbMatrix permuted;
  permuted.vocab = {"c", "a", "b"};
  permuted.rows = {{0.3, 0.2, 0.5}};
  const UncoveredElement e = element_of({"b"}, m);
  const UncoveredElement pe = element_of({"b"}, permuted);
  CHECK(l1_window_distance(e, m, {0, 0}) ==
        doctest::Approx(l1_window_distance(pe, permuted, {0, 0})));
}

TEST_CASE("single element takes its only window") {
  TokenProbMatrix m = uniform_matrix(1, 2);
  const auto result = greedy_assign({element_of({"w0"}, m)}, m);
  REQUIRE(result.placements.size() == 1);
  CHECK(result.placements[0].element == 0);
  CHECK(result.placements[0].window == Window{0, 0});
  CHECK(result.unplaced.empty());
}

TEST_CASE("conflicting best windows resolve by score then fallback") {
  // Two single-word elements both prefer position 0; the lower-scoring one
  // wins it, the other takes its best non-conflicting window.
  TokenProbMatrix m;
  m.vocab = {"a", "b", "c"};
  m.rows = {{0.5, 0.5, 0.0},   // a: 1.0, b: 1.0
            {0.25, 0.0, 0.75},  // a: 1.5, b: 2.0
            {0.0, 0.25, 0.75}};  // a: 2.0, b: 1.5
  const std::vector<UncoveredElement> elements = {element_of({"a"}, m),
                                                  element_of({"b"}, m)};
  const auto result = greedy_assign(elements, m);
  REQUIRE(result.placements.size() == 2);
  // Pool minimum is the tie at position 0 (score 1.0); window-start then
  // element-index tie-breaks give it to element 0.
  CHECK(result.placements[0].element == 0);
  CHECK(result.placements[0].window == Window{0, 0});
  CHECK(result.placements[1].element == 1);
  CHECK(result.placements[1].window == Window{2, 2});
  CHECK(result.placements == brute_force_greedy(elements, m).placements);
}

TEST_CASE("greedy assignment equals the brute-force simulation on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t vocab_size = 2 + rng.below(8);
    const std::size_t rows = 1 + rng.below(12);
    TokenProbMatrix m;
    for (std::size_t v = 0; v < vocab_size; ++v) {
      m.vocab.push_back("w" + std::to_string(v));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      m.rows.push_back(random_exact_row(rng, vocab_size));
    }
    std::vector<UncoveredElement> elements;
    const std::size_t n_elements = 1 + rng.below(4);
    for (std::size_t e = 0; e < n_elements; ++e) {
      std::vector<std::string> words;
      const std::size_t width = 1 + rng.below(3);
      for (std::size_t w = 0; w < width; ++w) {
        words.push_back(m.vocab[rng.below(vocab_size)]);
      }
      elements.push_back(element_of(words, m));
    }
    const AssignmentResult got = greedy_assign(elements, m);
    const AssignmentResult want = brute_force_greedy(elements, m);
    REQUIRE(got.placements.size() == want.placements.size());
    for (std::size_t i = 0; i < got.placements.size(); ++i) {
      CHECK(got.placements[i].element == want.placements[i].element);
      CHECK(got.placements[i].window == want.placements[i].window);
      CHECK(got.placements[i].score == want.placements[i].score);
    }
    CHECK(got.unplaced == want.unplaced);

    // Structural invariants: no overlaps, widths match word counts.
    for (std::size_t i = 0; i < got.placements.size(); ++i) {
      const auto& p = got.placements[i];
      CHECK(p.window.end - p.window.start + 1 ==
            elements[p.element].words.size());
      for (std::size_t j = i + 1; j < got.placements.size(); ++j) {
        const auto& q = got.placements[j];
        CHECK((p.window.end < q.window.start || q.window.end < p.window.start));
      }
    }
  }
}

TEST_CASE("lm loss closed forms") {
  TokenProbMatrix certain;
  certain.vocab = {"a", "b"};
  certain.rows = {{1.0, 0.0}, {0.0, 1.0}};
  CHECK(lm_loss(certain, {"a", "b"}).value == doctest::Approx(0.0));

  const TokenProbMatrix uniform = uniform_matrix(4, 8);
  CHECK(lm_loss(uniform, {"w0", "w3", "w7", "w1"}).value ==
        doctest::Approx(4.0 * std::log(1.0 / 8.0)));
}

TEST_CASE("lm loss hand-evaluated two-position matrix") {
  TokenProbMatrix m;
  m.vocab = {"a", "b"};
  m.rows = {{0.25, 0.75}, {0.5, 0.5}};
  CHECK(lm_loss(m, {"b", "a"}).value ==
        doctest::Approx(std::log(0.75) + std::log(0.5)));
}

TEST_CASE("lm loss clamps zero-probability targets and reports it") {
  TokenProbMatrix m;
  m.vocab = {"a", "b"};
  m.rows = {{1.0, 0.0}};
  const LogLik loss = lm_loss(m, {"b"});
  CHECK(loss.clamped == 1);
  CHECK(loss.value == doctest::Approx(std::log(1e-12)));
}

TEST_CASE("lm loss rejects misaligned targets") {
  CHECK_THROWS_AS(lm_loss(uniform_matrix(3, 2), {"w0"}), Error);
}

TEST_CASE("argument loss closed forms and hand evaluation") {
  TokenProbMatrix m;
  m.vocab = {"a", "b", "c"};
  m.rows = {{1.0, 0.0, 0.0}, {0.2, 0.3, 0.5}, {0.1, 0.6, 0.3}};

  CHECK(argument_loss(m, {}, {}).value == doctest::Approx(0.0));

  const UncoveredElement single = element_of({"a"}, m);
  AssignmentResult one;
  one.placements = {{0, {0, 0}, 0.0}};
  CHECK(argument_loss(m, {single}, one).value == doctest::Approx(0.0));

  const UncoveredElement pair = element_of({"b", "c"}, m);
  AssignmentResult two;
  two.placements = {{0, {1, 2}, 0.0}};
  CHECK(argument_loss(m, {pair}, two).value ==
        doctest::Approx(std::log(0.3) + std::log(0.3)));
}

TEST_CASE("generation loss reduces and annihilates as expected") {
  const std::vector<SampleLoss> samples = {{-2.0, -1.0}, {-4.0, -3.0}};
  CHECK(generation_loss(samples, 0.5, 0.0) ==
        doctest::Approx(-0.5 * (-2.0 - 4.0) / 2.0));
  CHECK(generation_loss({{-2.0, -1.0}}, 0.9, 0.1) == doctest::Approx(1.9));
  CHECK(generation_loss(samples, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(generation_loss({}, 0.9, 0.1), Error);
}

TEST_CASE("weighted loss reduces to unweighted with unit weights, bit for bit") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SampleLoss> samples;
    const std::size_t n = 1 + rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      samples.push_back({-10.0 * rng.real01(), -5.0 * rng.real01()});
    }
    const std::vector<double> ones(n, 1.0);
    CHECK(weighted_generation_loss(samples, ones, 0.9, 0.1) ==
          generation_loss(samples, 0.9, 0.1));
  }
}

TEST_CASE("weighted loss hand evaluation, zero weights, negative weight error") {
  const std::vector<SampleLoss> samples = {{-2.0, -1.0}, {-3.0, -0.5}};
  CHECK(weighted_generation_loss(samples, {0.0, 0.0}, 0.9, 0.1) ==
        doctest::Approx(0.0));
  const double by_hand =
      -(0.9 * 2.0 * -2.0 + 0.1 * 2.0 * -1.0 + 0.9 * 0.5 * -3.0 +
        0.1 * 0.5 * -0.5) /
      2.0;
  CHECK(weighted_generation_loss(samples, {2.0, 0.5}, 0.9, 0.1) ==
        doctest::Approx(by_hand));
  CHECK_THROWS_AS(weighted_generation_loss(samples, {1.0, -0.1}, 0.9, 0.1),
                  Error);
}

TEST_CASE("batch losses agree with the independent references") {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<SampleLoss> samples;
    std::vector<double> weights;
    const std::size_t n = 1 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) {
      samples.push_back({-20.0 * rng.real01(), -10.0 * rng.real01()});
      weights.push_back(3.0 * rng.real01());
    }
    const double beta = rng.real01();
    const double gamma = rng.real01();
    CHECK(std::fabs(generation_loss(samples, beta, gamma) -
                    reference_generation_loss(samples, beta, gamma)) < 1e-9);
    CHECK(std::fabs(weighted_generation_loss(samples, weights, beta, gamma) -
                    reference_weighted_generation_loss(samples, weights, beta,
                                                       gamma)) < 1e-9);
  }
}

TEST_CASE("argument loss falls as mass moves onto the assigned element") {
  TokenProbMatrix m;
  m.vocab = {"a", "b"};
  const UncoveredElement e = element_of({"a"}, {{"a", "b"}, {}});
  AssignmentResult fixed;
  fixed.placements = {{0, {0, 0}, 0.0}};
  double previous = -1e9;
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    m.rows = {{p, 1.0 - p}};
    const double value = argument_loss(m, {e}, fixed).value;
    CHECK(value > previous);
    previous = value;
  }
  CHECK(previous < 0.0);  // approaches 0 from below
}

TEST_CASE("coverage rate counts triggers and arguments") {
  const AnnotatedSentence s = fig1_sentence();
  CHECK(coverage_rate({{s.records, s.context}}) == doctest::Approx(1.0));
  CHECK(coverage_rate({{s.records, "unrelated text entirely"}}) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(coverage_rate({}), Error);
}

TEST_CASE("coverage rate hits the 0.7 pretraining threshold on a hand count") {
  // 10 elements across two records, 7 present in the generated text.
  EventRecord a;
  a.event_type = "Movement:Transport";
  a.trigger = {"e0", 0, 2};
  a.arguments = {{"Artifact", {"e1", 0, 2}},
                 {"Destination", {"e2", 0, 2}},
                 {"Origin", {"e3", 0, 2}}};
  EventRecord b;
  b.event_type = "Movement:Transport";
  b.trigger = {"e4", 0, 2};
  b.arguments = {{"Artifact", {"e5", 0, 2}},
                 {"Destination", {"e6", 0, 2}},
                 {"Origin", {"e7", 0, 2}}};
  EventRecord c;
  c.event_type = "Movement:Transport";
  c.trigger = {"e8", 0, 2};
  c.arguments = {{"Artifact", {"e9", 0, 2}}};
  const double rate = coverage_rate({{{a, b}, "e0 e1 e2 e3 e4 e5 e6"},
                                     {{c}, "nothing relevant"}});
  CHECK(rate == doctest::Approx(0.7));
}

TEST_CASE("finite differences match analytic gradients through the loss stack") {
  // Softmax-parameterized probability rows; the assignment is computed once
  // and held fixed while the parameters move.
  Rng rng(99);
  for (int config_idx = 0; config_idx < 10; ++config_idx) {
    const std::size_t vocab_size = 3 + rng.below(4);
    const std::size_t length = 2 + rng.below(4);
    std::vector<std::string> vocab;
    for (std::size_t v = 0; v < vocab_size; ++v) {
      vocab.push_back("w" + std::to_string(v));
    }
    std::vector<std::vector<double>> theta(length,
                                           std::vector<double>(vocab_size));
    for (auto& row : theta) {
      for (double& x : row) x = 2.0 * rng.real01() - 1.0;
    }
    std::vector<std::string> targets;
    for (std::size_t s = 0; s < length; ++s) {
      targets.push_back(vocab[rng.below(vocab_size)]);
    }

    auto probs_of = [&](const std::vector<std::vector<double>>& params) {
      TokenProbMatrix m;
      m.vocab = vocab;
      for (const auto& row : params) {
        double norm = 0.0;
        std::vector<double> p(row.size());
        for (std::size_t v = 0; v < row.size(); ++v) {
          p[v] = std::exp(row[v]);
          norm += p[v];
        }
        for (double& x : p) x /= norm;
        m.rows.push_back(std::move(p));
      }
      return m;
    };

    TokenProbMatrix base = probs_of(theta);
    UncoveredElement elem;
    elem.source_text = targets[0];
    elem.words = {targets[0]};
    elem.onehot_index = {*base.vocab_index(targets[0])};
    const AssignmentResult assignment = greedy_assign({elem}, base);

    const double beta = 0.9;
    const double gamma = 0.1;
    auto loss_of = [&](const std::vector<std::vector<double>>& params) {
      const TokenProbMatrix m = probs_of(params);
      const SampleLoss sample{lm_loss(m, targets).value,
                              argument_loss(m, {elem}, assignment).value};
      return generation_loss({sample}, beta, gamma);
    };

    // Analytic: dL/dtheta[s][v] = -(beta*(1[v==y_s]-p) + gamma*(hits at s)).
    const TokenProbMatrix m = probs_of(theta);
    for (int probe = 0; probe < 4; ++probe) {
      const std::size_t s = rng.below(length);
      const std::size_t v = rng.below(vocab_size);
      double grad = 0.0;
      const std::size_t target_idx = *m.vocab_index(targets[s]);
      grad += beta * ((v == target_idx ? 1.0 : 0.0) - m.rows[s][v]);
      for (const Placement& p : assignment.placements) {
        if (s >= p.window.start && s <= p.window.end) {
          const std::size_t hot = elem.onehot_index[s - p.window.start];
          grad += gamma * ((v == hot ? 1.0 : 0.0) - m.rows[s][v]);
        }
      }
      grad = -grad;

      const double h = 1e-4;
      auto bumped = theta;
      bumped[s][v] += h;
      const double up = loss_of(bumped);
      bumped[s][v] -= 2 * h;
      const double down = loss_of(bumped);
      const double fd = (up - down) / (2 * h);
      CHECK(std::fabs(fd - grad) / std::max(1e-6, std::fabs(grad)) < 1e-4);
    }
  }
}

}  // TEST_SUITE
