#pragma once

#include <functional>
#include <string>
#include <vector>

#include "evaug/gen_loss.hpp"
#include "evaug/policy.hpp"
#include "evaug/prompts.hpp"
#include "evaug/schema.hpp"

namespace evaug {

/// Model interfaces the framework trains and queries. Implementations must be
/// deterministic under a fixed seed and state, tolerate concurrent read-only
/// queries, and expect train calls to be serialized by the caller.

struct GeneratedSample {
  std::string text;
  TokenProbMatrix probs;  // rows align one-to-one with generated tokens
};

/// One generator training unit: the input sequence, the elements currently
/// missing from its generated text (encoded over the backend vocabulary), and
/// a retraining weight.
struct GenTrainSample {
  GenerationInput input;
  std::vector<UncoveredElement> uncovered;
  double weight = 1.0;
};

/// The matching procedure is supplied by the caller so every backend trains
/// against the same argument-aware machinery.
using AssignmentSupplier = std::function<AssignmentResult(
    const std::vector<UncoveredElement>&, const TokenProbMatrix&)>;

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;

  /// Optional corpus preparation before any generation (vocabulary fitting
  /// for the mock; a no-op for pretrained plugins).
  virtual void prepare(const std::vector<std::string>& /*target_texts*/) {}

  virtual GeneratedSample generate(const GenerationInput& input) = 0;
  virtual GenLossReport train(const std::vector<GenTrainSample>& batch,
                              double beta, double gamma,
                              const AssignmentSupplier& assign) = 0;
  virtual std::vector<std::string> vocab() const = 0;
  virtual void save(const std::string& path) const = 0;
  virtual void load(const std::string& path) = 0;
  virtual std::string name() const = 0;
};

class ExtractorBackend {
 public:
  virtual ~ExtractorBackend() = default;

  virtual std::string extract(const ExtractionInput& input) = 0;
  /// Returns one loss value per epoch.
  virtual std::vector<double> train(
      const std::vector<AnnotatedSentence>& sentences, int epochs,
      double negative_prompt_ratio) = 0;
  virtual void save(const std::string& path) const = 0;
  virtual void load(const std::string& path) = 0;
  virtual std::string name() const = 0;
};

class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;

  /// Probability of retaining the sample, in [0,1].
  virtual double score(const PolicyInput& input) = 0;
  virtual double train(const PolicyBatch& batch) = 0;
  virtual double train_rl(const std::vector<std::pair<PolicyInput, int>>& diff_new,
                          const std::vector<std::pair<PolicyInput, int>>& diff_old,
                          double reward) = 0;
  virtual void save(const std::string& path) const = 0;
  virtual void load(const std::string& path) = 0;
  virtual std::string name() const = 0;
};

class MaskedLMBackend {
 public:
  virtual ~MaskedLMBackend() = default;

  /// Probability of the true token at `masked_position` given the rest of the
  /// sentence, in [0,1].
  virtual double token_prob(const std::vector<std::string>& tokens,
                            std::size_t masked_position) = 0;
  virtual void fine_tune(const std::vector<std::string>& /*corpus*/) {}
  virtual std::string name() const = 0;
};

}  // namespace evaug
