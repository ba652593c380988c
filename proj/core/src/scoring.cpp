#include "evaug/scoring.hpp"

#include <algorithm>
#include <string>
#include <tuple>

namespace evaug {

PRF prf_from_counts(std::size_t correct, std::size_t predicted,
                    std::size_t gold) {
  PRF out;
  out.num_correct = correct;
  out.num_predicted = predicted;
  out.num_gold = gold;
  out.precision =
      predicted == 0 ? 0.0
                     : static_cast<double>(correct) / static_cast<double>(predicted);
  out.recall =
      gold == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold);
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

namespace {

using TriggerKey = std::tuple<std::string, std::size_t, std::size_t>;
using ArgumentKey =
    std::tuple<std::string, std::string, std::size_t, std::size_t>;

std::vector<TriggerKey> trigger_keys(const std::vector<EventRecord>& records) {
  std::vector<TriggerKey> keys;
  for (const auto& r : records) {
    keys.emplace_back(r.event_type, r.trigger.start, r.trigger.end);
  }
  return keys;
}

std::vector<ArgumentKey> argument_keys(const std::vector<EventRecord>& records) {
  std::vector<ArgumentKey> keys;
  for (const auto& r : records) {
    for (const auto& [role, span] : r.arguments) {
      keys.emplace_back(r.event_type, role, span.start, span.end);
    }
  }
  return keys;
}

template <class Key>
std::size_t match_one_to_one(const std::vector<Key>& predicted,
                             const std::vector<Key>& gold) {
  std::vector<bool> used(gold.size(), false);
  std::size_t correct = 0;
  for (const Key& p : predicted) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (!used[g] && gold[g] == p) {
        used[g] = true;
        ++correct;
        break;
      }
    }
  }
  return correct;
}

}  // namespace

PRF score_triggers(const std::vector<EventRecord>& predicted,
                   const std::vector<EventRecord>& gold) {
  const auto p = trigger_keys(predicted);
  const auto g = trigger_keys(gold);
  return prf_from_counts(match_one_to_one(p, g), p.size(), g.size());
}

PRF score_arguments(const std::vector<EventRecord>& predicted,
                    const std::vector<EventRecord>& gold) {
  const auto p = argument_keys(predicted);
  const auto g = argument_keys(gold);
  return prf_from_counts(match_one_to_one(p, g), p.size(), g.size());
}

ScoreReport evaluate_sentences(const std::vector<SentencePair>& pairs) {
  std::size_t trig_correct = 0, trig_pred = 0, trig_gold = 0;
  std::size_t arg_correct = 0, arg_pred = 0, arg_gold = 0;
  for (const SentencePair& pair : pairs) {
    const PRF t = score_triggers(pair.predicted, pair.gold);
    const PRF a = score_arguments(pair.predicted, pair.gold);
    trig_correct += t.num_correct;
    trig_pred += t.num_predicted;
    trig_gold += t.num_gold;
    arg_correct += a.num_correct;
    arg_pred += a.num_predicted;
    arg_gold += a.num_gold;
  }
  ScoreReport report;
  report.triggers = prf_from_counts(trig_correct, trig_pred, trig_gold);
  report.arguments = prf_from_counts(arg_correct, arg_pred, arg_gold);
  return report;
}

double reward(double f_curr, double f_prev, double alpha) {
  return alpha * (f_curr - f_prev);
}

RewardRecord make_reward_record(int epoch, double f_curr, double f_prev,
                                double alpha) {
  return {epoch, f_curr, f_prev, alpha, reward(f_curr, f_prev, alpha)};
}

CheckpointDecision should_update_checkpoint(double f1_trigger,
                                            double f1_argument,
                                            double best_trigger,
                                            double best_argument) {
  CheckpointDecision out;
  out.update = f1_trigger > best_trigger || f1_argument > best_argument;
  out.best_trigger = std::max(best_trigger, out.update ? f1_trigger : best_trigger);
  out.best_argument =
      std::max(best_argument, out.update ? f1_argument : best_argument);
  return out;
}

}  // namespace evaug
