#pragma once

#include <cstddef>
#include <vector>

#include "evaug/schema.hpp"

namespace evaug {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t num_correct = 0;
  std::size_t num_predicted = 0;
  std::size_t num_gold = 0;
};

/// P = correct/predicted (0 when nothing predicted), R = correct/gold (0 when
/// no gold), F1 = 2PR/(P+R) (0 when P+R = 0).
PRF prf_from_counts(std::size_t correct, std::size_t predicted,
                    std::size_t gold);

/// Trigger classification: a predicted trigger is correct iff some still
/// unmatched gold trigger has the same event type and the same (start, end).
/// Matching is one-to-one, greedy in input order between identical keys, so
/// duplicates never double-count.
PRF score_triggers(const std::vector<EventRecord>& predicted,
                   const std::vector<EventRecord>& gold);

/// Argument classification: event type, role, and (start, end) must all match
/// a still unmatched gold argument.
PRF score_arguments(const std::vector<EventRecord>& predicted,
                    const std::vector<EventRecord>& gold);

/// Sentence-aligned prediction/gold pairs scored with pooled counts;
/// matching never crosses sentence boundaries.
struct SentencePair {
  std::vector<EventRecord> predicted;
  std::vector<EventRecord> gold;
};

struct ScoreReport {
  PRF triggers;
  PRF arguments;
  double reward = 0.0;
};

ScoreReport evaluate_sentences(const std::vector<SentencePair>& pairs);

/// reward = alpha * (f_curr - f_prev).
double reward(double f_curr, double f_prev, double alpha);

/// One epoch's reward computation, kept with its inputs.
struct RewardRecord {
  int epoch = 0;
  double f_curr = 0.0;  // dev argument F1 this epoch
  double f_prev = 0.0;  // dev argument F1 the epoch before
  double alpha = 0.0;
  double value = 0.0;   // alpha * (f_curr - f_prev)
};

RewardRecord make_reward_record(int epoch, double f_curr, double f_prev,
                                double alpha);

struct CheckpointDecision {
  bool update = false;
  double best_trigger = 0.0;
  double best_argument = 0.0;
};

/// Update iff either score strictly exceeds its stored best. On update each
/// best is refreshed from its own metric, never downward, so the stored pair
/// is component-wise non-decreasing over any run.
CheckpointDecision should_update_checkpoint(double f1_trigger,
                                            double f1_argument,
                                            double best_trigger,
                                            double best_argument);

}  // namespace evaug
