#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "evaug/backends.hpp"

namespace evaug {

/// Deterministic generator for desk-scale runs. Two modes:
///
///  - table: a fixed per-position probability table; generate() samples the
///    same table whatever the input (useful for closed-form checks).
///  - trainable: one probability matrix per source sentence, sized to the
///    target token count and initialized uniform over the fitted vocabulary.
///    Each train call shifts mass toward the target tokens by
///    step * sample weight (capped), so row intervals around the target token
///    only ever grow: coverage is non-decreasing in training steps by
///    construction.
///
/// Sampling draws position t from the stream (seed, "gen:" + source_id, t),
/// so the emitted text is a pure function of (seed, state, input).
class MockGenerator : public GeneratorBackend {
 public:
  MockGenerator(std::uint64_t seed, double step);

  static std::unique_ptr<MockGenerator> from_table(
      std::vector<std::string> vocab, std::vector<std::vector<double>> rows,
      std::uint64_t seed);

  /// Builds the vocabulary from target texts (sorted unique whitespace
  /// tokens). Must run before the first generate() in trainable mode.
  void fit_vocab(const std::vector<std::string>& target_texts);
  void prepare(const std::vector<std::string>& target_texts) override {
    if (!table_mode_ && vocab_.empty()) fit_vocab(target_texts);
  }

  GeneratedSample generate(const GenerationInput& input) override;
  GenLossReport train(const std::vector<GenTrainSample>& batch, double beta,
                      double gamma, const AssignmentSupplier& assign) override;
  std::vector<std::string> vocab() const override { return vocab_; }
  void save(const std::string& path) const override;
  void load(const std::string& path) override;
  std::string name() const override { return "generator"; }

  /// Current rows for one source (trainable mode), for closed-form tests.
  const std::vector<std::vector<double>>* rows_for(const std::string& source_id) const;

 private:
  std::vector<std::vector<double>>& ensure_rows(const GenerationInput& input);

  bool table_mode_ = false;
  std::uint64_t seed_ = 0;
  double step_ = 0.0;
  std::vector<std::string> vocab_;
  std::vector<std::vector<double>> table_rows_;
  std::map<std::string, std::vector<std::vector<double>>> source_rows_;
};

/// Fidelity-q extractor: answers a prompt with the gold-filled template when
/// hash01(seed, context, event type) < q, otherwise with the unfilled
/// template. q rises with every training epoch by
///   q += delta * (1 - q) * positives / reference,
/// where positives counts record-bearing sentences in the batch and reference
/// is the first training batch's size, so added positive samples raise
/// fidelity and q saturates below 1.
class MockExtractor : public ExtractorBackend {
 public:
  MockExtractor(double q0, double delta, std::uint64_t seed);

  void set_oracle(const EventSchema& schema,
                  const std::vector<AnnotatedSentence>& sentences);

  std::string extract(const ExtractionInput& input) override;
  std::vector<double> train(const std::vector<AnnotatedSentence>& sentences,
                            int epochs, double negative_prompt_ratio) override;
  void save(const std::string& path) const override;
  void load(const std::string& path) override;
  std::string name() const override { return "extractor"; }

  double fidelity() const { return q_; }

 private:
  double q_ = 0.0;
  double delta_ = 0.0;
  std::uint64_t seed_ = 0;
  std::size_t reference_ = 0;
  double last_negative_ratio_ = 0.0;
  EventSchema schema_;
  std::map<std::string, std::vector<EventRecord>> gold_by_context_;
};

/// Coverage-rule policy: parses the element strings out of the event
/// description clauses and scores `hi` when the generated text contains all
/// of them (word-bounded), else `lo`. BCE training drifts the levels apart;
/// reward-weighted training moves the uncovered level down under positive
/// reward and up under negative reward, the covered level the other way.
class MockPolicy : public PolicyBackend {
 public:
  MockPolicy(double hi, double lo, double eta, double eta_rl);

  double score(const PolicyInput& input) override;
  double train(const PolicyBatch& batch) override;
  double train_rl(const std::vector<std::pair<PolicyInput, int>>& diff_new,
                  const std::vector<std::pair<PolicyInput, int>>& diff_old,
                  double reward) override;
  void save(const std::string& path) const override;
  void load(const std::string& path) override;
  std::string name() const override { return "policy"; }

  double covered_level() const { return hi_; }
  double uncovered_level() const { return lo_; }

  /// Element strings named by a rendered event description.
  static std::vector<std::string> description_elements(
      const std::string& event_description);

 private:
  double hi_;
  double lo_;
  double eta_;
  double eta_rl_;
};

/// Masked-LM stand-ins for PLL scoring.
class MockMaskedLM : public MaskedLMBackend {
 public:
  enum class Kind { uniform, oracle, table, unigram };

  static std::unique_ptr<MockMaskedLM> uniform(std::size_t vocab_size);
  static std::unique_ptr<MockMaskedLM> oracle();
  static std::unique_ptr<MockMaskedLM> table(std::map<std::string, double> probs,
                                             double default_prob);
  /// Add-one-smoothed unigram model; fit via fine_tune().
  static std::unique_ptr<MockMaskedLM> unigram();

  double token_prob(const std::vector<std::string>& tokens,
                    std::size_t masked_position) override;
  void fine_tune(const std::vector<std::string>& corpus) override;
  std::string name() const override { return "masked-lm"; }

 private:
  Kind kind_ = Kind::oracle;
  std::size_t vocab_size_ = 1;
  std::map<std::string, double> table_;
  double default_prob_ = 0.0;
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t total_count_ = 0;
};

}  // namespace evaug
