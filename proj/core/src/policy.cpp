#include "evaug/policy.hpp"

#include <algorithm>
#include <cmath>

#include "evaug/backends.hpp"
#include "evaug/error.hpp"
#include "evaug/gen_loss.hpp"

namespace evaug {

std::vector<PolicyDecision> decide(
    PolicyBackend& backend,
    const std::vector<std::pair<std::string, PolicyInput>>& inputs,
    DecisionMode mode, Rng& rng) {
  std::vector<PolicyDecision> decisions;
  decisions.reserve(inputs.size());
  for (const auto& [id, input] : inputs) {
    double p = 0.0;
    try {
      p = backend.score(input);
    } catch (const std::exception& e) {
      throw Error("policy backend failed on sample '" + id + "': " + e.what());
    }
    PolicyDecision d;
    d.id = id;
    d.retain_probability = p;
    d.mode = mode;
    if (mode == DecisionMode::sampled) {
      d.action = rng.bernoulli(p) ? Action::retain : Action::remove;
    } else {
      d.action = p >= 0.5 ? Action::retain : Action::remove;
    }
    decisions.push_back(std::move(d));
  }
  return decisions;
}

Partition partition(const std::vector<PolicyDecision>& decisions,
                    const std::vector<std::string>& instance_ids) {
  if (decisions.size() != instance_ids.size()) {
    throw Error("partition: " + std::to_string(decisions.size()) +
                " decisions for " + std::to_string(instance_ids.size()) +
                " instances");
  }
  Partition out;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i].id != instance_ids[i]) {
      throw Error("partition: decision id '" + decisions[i].id +
                  "' does not match instance id '" + instance_ids[i] + "'");
    }
    if (decisions[i].action == Action::retain) {
      out.positives.push_back(instance_ids[i]);
    } else {
      out.negatives.push_back(instance_ids[i]);
    }
  }
  return out;
}

std::pair<IdSet, IdSet> episode_diff(const IdSet& prev_negatives,
                                     const IdSet& curr_negatives) {
  IdSet gone;
  IdSet fresh;
  std::set_difference(prev_negatives.begin(), prev_negatives.end(),
                      curr_negatives.begin(), curr_negatives.end(),
                      std::inserter(gone, gone.begin()));
  std::set_difference(curr_negatives.begin(), curr_negatives.end(),
                      prev_negatives.begin(), prev_negatives.end(),
                      std::inserter(fresh, fresh.begin()));
  return {std::move(gone), std::move(fresh)};
}

std::pair<std::vector<std::string>, std::vector<std::string>> subsample_diffs(
    const IdSet& diff_prev, const IdSet& diff_curr, std::size_t c, Rng& rng) {
  auto pick = [&](const IdSet& set) {
    std::vector<std::string> pool(set.begin(), set.end());
    auto sampled = rng.sample_without_replacement(std::move(pool), c);
    std::sort(sampled.begin(), sampled.end());
    return sampled;
  };
  auto prev = pick(diff_prev);
  auto curr = pick(diff_curr);
  return {std::move(prev), std::move(curr)};
}

namespace {

double clamped_log(double p, int& clamped) {
  if (p < kProbEpsilon) {
    ++clamped;
    return std::log(kProbEpsilon);
  }
  return std::log(p);
}

double gold_class_prob(int label, double retain_prob) {
  return label == 1 ? retain_prob : 1.0 - retain_prob;
}

}  // namespace

PolicyLoss pretrain_loss(const PolicyBatch& batch,
                         const std::vector<double>& retain_probs) {
  if (batch.items.size() != retain_probs.size()) {
    throw Error("pretrain_loss: " + std::to_string(retain_probs.size()) +
                " probabilities for " + std::to_string(batch.items.size()) +
                " items");
  }
  if (batch.items.empty()) throw Error("pretrain_loss: empty batch");
  PolicyLoss out;
  for (std::size_t n = 0; n < batch.items.size(); ++n) {
    out.value -=
        clamped_log(gold_class_prob(batch.items[n].label, retain_probs[n]),
                    out.clamped);
  }
  out.value /= static_cast<double>(batch.items.size());
  return out;
}

PolicyLoss retrain_loss(const std::vector<RlItem>& diff_new,
                        const std::vector<RlItem>& diff_old, double reward) {
  if (!std::isfinite(reward)) throw Error("retrain_loss: reward is not finite");
  PolicyLoss out;
  for (const RlItem& item : diff_new) {
    out.value += clamped_log(gold_class_prob(item.action_label,
                                             item.retain_prob),
                             out.clamped) *
                 reward;
  }
  for (const RlItem& item : diff_old) {
    out.value += clamped_log(gold_class_prob(item.action_label,
                                             item.retain_prob),
                             out.clamped) *
                 (-reward);
  }
  return out;
}

double removal_weight(double retain_probability) {
  if (retain_probability > 1.0) {
    throw Error("removal_weight: probability above 1");
  }
  const double p = std::max(retain_probability, kProbEpsilon);
  return 1.0 - std::log(p);
}

PolicyBatch build_pretrain_set(const std::vector<PretrainSeed>& generated,
                               const Dataset& corpus, Rng& rng, bool balance) {
  PolicyBatch batch;
  batch.purpose = BatchPurpose::pretrain;

  std::size_t positives = 0;
  std::size_t negatives = 0;
  for (const PretrainSeed& seed : generated) {
    PolicyExample ex;
    ex.input = build_policy_input(seed.event_description, seed.generated_text);
    ex.label = seed.covered ? 1 : 0;
    seed.covered ? ++positives : ++negatives;
    batch.items.push_back(std::move(ex));
  }

  if (balance && negatives < positives) {
    // Pair event descriptions with unrelated corpus sentences until classes
    // match. Unrelated means: a different sentence id than the description's
    // source.
    std::size_t needed = positives - negatives;
    while (needed > 0) {
      if (generated.empty() || corpus.sentences.empty()) {
        throw Error("build_pretrain_set: cannot synthesize negatives from an "
                    "empty corpus");
      }
      const PretrainSeed& seed = generated[rng.below(generated.size())];
      std::vector<const AnnotatedSentence*> unrelated;
      for (const auto& s : corpus.sentences) {
        if (s.id != seed.source_id && !s.context.empty()) {
          unrelated.push_back(&s);
        }
      }
      if (unrelated.empty()) {
        throw Error("build_pretrain_set: no sentence unrelated to '" +
                    seed.source_id + "' to synthesize a negative from");
      }
      const AnnotatedSentence* mate = unrelated[rng.below(unrelated.size())];
      PolicyExample ex;
      ex.input = build_policy_input(seed.event_description, mate->context);
      ex.label = 0;
      batch.items.push_back(std::move(ex));
      --needed;
    }
  }
  return batch;
}

}  // namespace evaug
