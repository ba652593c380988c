#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evaug/prompts.hpp"
#include "evaug/rng.hpp"
#include "evaug/schema.hpp"

namespace evaug {

class PolicyBackend;

enum class Action { retain, remove };
enum class DecisionMode { sampled, greedy };

struct PolicyDecision {
  std::string id;
  double retain_probability = 0.0;
  Action action = Action::remove;
  DecisionMode mode = DecisionMode::greedy;
};

/// One decision per input. Sampled mode draws Bernoulli(p) from the supplied
/// stream (one draw per input, always); greedy retains iff p >= 0.5. Backend
/// failures are rethrown with the sample id attached.
std::vector<PolicyDecision> decide(
    PolicyBackend& backend,
    const std::vector<std::pair<std::string, PolicyInput>>& inputs,
    DecisionMode mode, Rng& rng);

struct Partition {
  std::vector<std::string> positives;  // retained ids, input order
  std::vector<std::string> negatives;  // removed ids, input order
};

/// Splits instance ids by decision; decisions and ids must align one to one.
Partition partition(const std::vector<PolicyDecision>& decisions,
                    const std::vector<std::string>& instance_ids);

using IdSet = std::set<std::string>;

/// Episode set algebra over negative partitions:
///   first  = prev \ curr   (samples no longer removed)
///   second = curr \ prev   (samples newly removed)
std::pair<IdSet, IdSet> episode_diff(const IdSet& prev_negatives,
                                     const IdSet& curr_negatives);

/// Uniform subsamples without replacement of size min(c, |set|) from each
/// diff, returned sorted for stable downstream iteration.
std::pair<std::vector<std::string>, std::vector<std::string>> subsample_diffs(
    const IdSet& diff_prev, const IdSet& diff_curr, std::size_t c, Rng& rng);

struct PolicyExample {
  PolicyInput input;
  int label = 0;  // 1 retain, 0 remove
};

enum class BatchPurpose { pretrain, retrain_new, retrain_old };

struct PolicyBatch {
  std::vector<PolicyExample> items;
  BatchPurpose purpose = BatchPurpose::pretrain;
};

struct PolicyLoss {
  double value = 0.0;
  int clamped = 0;
};

/// Binary cross-entropy over gold classes: -(1/N) * sum log p(gold class),
/// where retain examples contribute log p(retain) and remove examples
/// log(1 - p(retain)). `retain_probs` align with batch items.
PolicyLoss pretrain_loss(const PolicyBatch& batch,
                         const std::vector<double>& retain_probs);

/// One Eq-style reward-weighted term: the taken action's label and the
/// model's current retain probability for that input.
struct RlItem {
  int action_label = 0;       // action taken when the sample entered the set
  double retain_prob = 0.0;   // current model p(retain)
};

/// Reward-weighted retraining quantity over the two diff subsamples:
///   sum_new log p(action) * reward + sum_old log p(action) * (-reward),
/// no normalization. Minimized as written.
PolicyLoss retrain_loss(const std::vector<RlItem>& diff_new,
                        const std::vector<RlItem>& diff_old, double reward);

/// Generator sample weight w = 1 - log p(retain); >= 1, decreasing in p.
/// p is clamped at epsilon from below.
double removal_weight(double retain_probability);

/// One generated instance as seen by pretraining-set construction.
struct PretrainSeed {
  std::string source_id;
  std::string event_description;
  std::string generated_text;
  bool covered = false;
};

/// Positives: generated sentences containing all their elements. Negatives:
/// the uncovered ones, topped up (when balancing) with event descriptions
/// paired against random unrelated corpus sentences until classes match.
/// Throws when balancing is requested but no unrelated sentence exists.
PolicyBatch build_pretrain_set(const std::vector<PretrainSeed>& generated,
                               const Dataset& corpus, Rng& rng, bool balance);

/// Per-epoch bookkeeping for the retraining loop.
struct EpisodeState {
  int epoch = 0;
  std::vector<std::string> generated_ids;
  IdSet positives;
  IdSet negatives;
  IdSet prev_negatives;
  IdSet diff_prev;
  IdSet diff_curr;
  /// (trigger F1, argument F1) per evaluation, index 0 = pre-loop state.
  std::vector<std::pair<double, double>> f1_history;
  double best_f1_trigger = 0.0;
  double best_f1_argument = 0.0;
};

}  // namespace evaug
