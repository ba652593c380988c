#include <doctest.h>

#include "evaug/scoring.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace evaug;
using namespace evaug::testing;

namespace {

EventRecord make_record(const std::string& type, std::size_t trig_start,
                        std::initializer_list<std::pair<const char*, std::size_t>>
                            role_starts) {
  EventRecord r;
  r.event_type = type;
  r.trigger = {"t", trig_start, trig_start + 1};
  for (const auto& [role, start] : role_starts) {
    r.arguments.emplace_back(role, Span{"a", start, start + 1});
  }
  return r;
}

std::vector<EventRecord> random_records(Rng& rng, std::size_t max_records) {
  static const std::vector<std::string> types = {"A", "B", "C"};
  static const std::vector<std::string> roles = {"r1", "r2"};
  std::vector<EventRecord> out;
  const std::size_t n = rng.below(max_records + 1);
  for (std::size_t i = 0; i < n; ++i) {
    EventRecord r;
    r.event_type = types[rng.below(types.size())];
    const std::size_t t = rng.below(6);
    r.trigger = {"t", t, t + 1};
    const std::size_t args = rng.below(3);
    for (std::size_t a = 0; a < args; ++a) {
      const std::size_t s = rng.below(6);
      r.arguments.emplace_back(roles[rng.below(roles.size())],
                               Span{"a", s, s + 1});
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

TEST_SUITE("scoring") {

TEST_CASE("perfect match on the two-event fixture scores ones") {
  const auto records = fig1_sentence().records;
  const PRF t = score_triggers(records, records);
  const PRF a = score_arguments(records, records);
  CHECK(t.precision == doctest::Approx(1.0));
  CHECK(t.recall == doctest::Approx(1.0));
  CHECK(t.f1 == doctest::Approx(1.0));
  CHECK(a.precision == doctest::Approx(1.0));
  CHECK(a.recall == doctest::Approx(1.0));
  CHECK(a.f1 == doctest::Approx(1.0));
}

TEST_CASE("empty predictions against non-empty gold score zero") {
  const auto gold = fig1_sentence().records;
  const PRF t = score_triggers({}, gold);
  CHECK(t.precision == doctest::Approx(0.0));
  CHECK(t.recall == doctest::Approx(0.0));
  CHECK(t.f1 == doctest::Approx(0.0));
}

TEST_CASE("trigger hand count: 2 predicted, 1 correct, 2 gold") {
  const std::vector<EventRecord> gold = {make_record("A", 0, {}),
                                         make_record("A", 2, {})};
  const std::vector<EventRecord> pred = {make_record("A", 0, {}),
                                         make_record("A", 9, {})};
  const PRF t = score_triggers(pred, gold);
  CHECK(t.precision == doctest::Approx(0.5));
  CHECK(t.recall == doctest::Approx(0.5));
  CHECK(t.f1 == doctest::Approx(0.5));
}

TEST_CASE("matching span with the wrong role counts incorrect") {
  const std::vector<EventRecord> gold = {make_record("A", 0, {{"r1", 3}})};
  const std::vector<EventRecord> pred = {make_record("A", 0, {{"r2", 3}})};
  const PRF a = score_arguments(pred, gold);
  CHECK(a.num_correct == 0);
}

TEST_CASE("argument hand count: 3 predicted, 2 correct, 4 gold") {
  const std::vector<EventRecord> gold = {
      make_record("A", 0, {{"r1", 2}, {"r2", 3}}),
      make_record("B", 1, {{"r1", 4}, {"r1", 5}})};
  const std::vector<EventRecord> pred = {
      make_record("A", 0, {{"r1", 2}, {"r2", 9}}),
      make_record("B", 1, {{"r1", 4}})};
  const PRF a = score_arguments(pred, gold);
  CHECK(a.precision == doctest::Approx(2.0 / 3.0));
  CHECK(a.recall == doctest::Approx(0.5));
  CHECK(a.f1 == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("duplicate predictions cannot double count one gold item") {
  const std::vector<EventRecord> gold = {make_record("A", 0, {})};
  const std::vector<EventRecord> pred = {make_record("A", 0, {}),
                                         make_record("A", 0, {})};
  const PRF t = score_triggers(pred, gold);
  CHECK(t.num_correct == 1);
  CHECK(t.num_predicted == 2);
}

TEST_CASE("scores equal the counting oracle on random pairs") {
  Rng rng(619);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pred = random_records(rng, 4);
    const auto gold = random_records(rng, 4);
    const PRF t = score_triggers(pred, gold);
    const PRF to = oracle_score_triggers(pred, gold);
    CHECK(t.num_correct == to.num_correct);
    CHECK(t.precision == doctest::Approx(to.precision));
    CHECK(t.recall == doctest::Approx(to.recall));
    CHECK(t.f1 == doctest::Approx(to.f1));
    const PRF a = score_arguments(pred, gold);
    const PRF ao = oracle_score_arguments(pred, gold);
    CHECK(a.num_correct == ao.num_correct);
    CHECK(a.f1 == doctest::Approx(ao.f1));
  }
}

TEST_CASE("matching is order invariant") {
  Rng rng(620);
  for (int trial = 0; trial < 200; ++trial) {
    auto pred = random_records(rng, 4);
    auto gold = random_records(rng, 4);
    const PRF before_t = score_triggers(pred, gold);
    const PRF before_a = score_arguments(pred, gold);
    rng.shuffle(pred);
    rng.shuffle(gold);
    const PRF after_t = score_triggers(pred, gold);
    const PRF after_a = score_arguments(pred, gold);
    CHECK(before_t.num_correct == after_t.num_correct);
    CHECK(before_t.f1 == doctest::Approx(after_t.f1));
    CHECK(before_a.num_correct == after_a.num_correct);
    CHECK(before_a.f1 == doctest::Approx(after_a.f1));
  }
}

TEST_CASE("reward formula and antisymmetry") {
  CHECK(reward(0.4, 0.4, 10.0) == doctest::Approx(0.0));
  CHECK(reward(0.52, 0.50, 10.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(reward(0.50, 0.52, 10.0) ==
        doctest::Approx(-reward(0.52, 0.50, 10.0)).epsilon(1e-12));
}

TEST_CASE("checkpoint rule updates on either improvement, strictly") {
  SUBCASE("dominated scores do not update") {
    const auto d = should_update_checkpoint(0.5, 0.5, 0.6, 0.6);
    CHECK_FALSE(d.update);
    CHECK(d.best_trigger == doctest::Approx(0.6));
    CHECK(d.best_argument == doctest::Approx(0.6));
  }
  SUBCASE("trigger improves while argument regresses: update, no regression") {
    const auto d = should_update_checkpoint(0.7, 0.4, 0.6, 0.6);
    CHECK(d.update);
    CHECK(d.best_trigger == doctest::Approx(0.7));
    CHECK(d.best_argument == doctest::Approx(0.6));
  }
  SUBCASE("equality on both is no update") {
    const auto d = should_update_checkpoint(0.6, 0.6, 0.6, 0.6);
    CHECK_FALSE(d.update);
  }
}

TEST_CASE("stored bests are component-wise non-decreasing over random runs") {
  Rng rng(88);
  for (int run = 0; run < 100; ++run) {
    double best_t = rng.real01();
    double best_a = rng.real01();
    for (int epoch = 0; epoch < 50; ++epoch) {
      const auto d = should_update_checkpoint(rng.real01(), rng.real01(),
                                              best_t, best_a);
      CHECK(d.best_trigger >= best_t);
      CHECK(d.best_argument >= best_a);
      best_t = d.best_trigger;
      best_a = d.best_argument;
    }
  }
}

TEST_CASE("pooled sentence evaluation sums counts before the ratios") {
  const auto records = fig1_sentence().records;
  std::vector<SentencePair> pairs;
  pairs.push_back({records, records});            // all correct
  pairs.push_back({{}, records});                 // all missed
  const ScoreReport report = evaluate_sentences(pairs);
  CHECK(report.triggers.num_gold == 4);
  CHECK(report.triggers.num_predicted == 2);
  CHECK(report.triggers.num_correct == 2);
  CHECK(report.triggers.precision == doctest::Approx(1.0));
  CHECK(report.triggers.recall == doctest::Approx(0.5));
}

}  // TEST_SUITE
