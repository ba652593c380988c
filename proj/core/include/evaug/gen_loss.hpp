#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evaug/schema.hpp"

namespace evaug {

/// Per-generated-position probability rows over a fixed vocabulary.
struct TokenProbMatrix {
  std::vector<std::string> vocab;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> vocab_index(const std::string& token) const;
};

/// Throws unless every row sums to 1 within 1e-6 with no negative entries;
/// the message names the first offending row.
void validate_matrix(const TokenProbMatrix& probs);

/// One trigger or argument missing from the generated text, tokenized to
/// words with a one-hot vocabulary index per word. Words outside the
/// vocabulary leave the element unencodable; it is reported, never dropped,
/// so coverage accounting stays honest.
struct UncoveredElement {
  std::string source_text;               // the original trigger/argument
  std::vector<std::string> words;
  std::vector<std::size_t> onehot_index;  // one index per word when encodable
  bool encodable = true;
  std::vector<std::string> oov_words;
};

/// The trigger and every argument whose text does not occur word-bounded in
/// the generated text, in (trigger, argument...) order.
std::vector<UncoveredElement> find_uncovered_elements(
    const EventRecord& record, const std::string& generated_text,
    const std::vector<std::string>& vocab);

/// True when the trigger and all arguments occur word-bounded in `text`.
bool record_covered(const EventRecord& record, const std::string& text);

/// Inclusive position window [start, end] over probability rows.
struct Window {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Window&) const = default;
};

/// All width-|element| windows at stride 1; empty when the element is longer
/// than the sequence.
std::vector<Window> candidate_windows(const TokenProbMatrix& probs,
                                      const UncoveredElement& element);

/// Sum over window offsets of the L1 distance between the element's one-hot
/// vector and the probability row.
double l1_window_distance(const UncoveredElement& element,
                          const TokenProbMatrix& probs, const Window& window);

struct Placement {
  std::size_t element = 0;
  Window window;
  double score = 0.0;

  bool operator==(const Placement&) const = default;
};

struct AssignmentResult {
  std::vector<Placement> placements;    // in commit order
  std::vector<std::size_t> unplaced;    // ascending element indices
};

/// Pools every (element, window, L1) candidate, then repeatedly commits the
/// globally lowest-scoring pair whose element is still free and whose window
/// overlaps no committed window. Ties break on lower window start, then lower
/// element index. Unencodable or infeasible elements end up in `unplaced`.
AssignmentResult greedy_assign(const std::vector<UncoveredElement>& elements,
                               const TokenProbMatrix& probs);

/// A log-likelihood together with the number of positions whose probability
/// had to be clamped at epsilon.
struct LogLik {
  double value = 0.0;
  int clamped = 0;
};

inline constexpr double kProbEpsilon = 1e-12;

/// Sum over positions of log p(target token). Stored as a log-likelihood
/// (<= 0); the batch loss applies the leading minus. Zero or out-of-vocabulary
/// targets clamp at log(epsilon) and are counted.
LogLik lm_loss(const TokenProbMatrix& probs,
               const std::vector<std::string>& target_tokens);

/// Sum over placed elements and their window positions of log p(element word
/// at that offset). Unplaced elements contribute nothing.
LogLik argument_loss(const TokenProbMatrix& probs,
                     const std::vector<UncoveredElement>& elements,
                     const AssignmentResult& assignment);

struct SampleLoss {
  double lm = 0.0;   // language-model log-likelihood for one sample
  double arg = 0.0;  // argument-aware log-likelihood for one sample
};

/// Batch loss: -(1/N) * sum(beta * lm + gamma * arg).
double generation_loss(const std::vector<SampleLoss>& samples, double beta,
                       double gamma);

/// Removal-weighted batch loss: -(1/N) * sum(beta*w*lm + gamma*w*arg).
/// Weights must be non-negative, one per sample; all-ones reduces exactly to
/// generation_loss.
double weighted_generation_loss(const std::vector<SampleLoss>& samples,
                                const std::vector<double>& weights,
                                double beta, double gamma);

struct CoverageItem {
  std::vector<EventRecord> records;
  std::string generated_text;
};

/// Fraction of triggers+arguments present (word-bounded) in their generated
/// text. Errors on empty input.
double coverage_rate(const std::vector<CoverageItem>& items);

/// What a generator training step reports back.
struct GenLossReport {
  std::vector<SampleLoss> samples;
  double batch_loss = 0.0;                  // unweighted form
  std::optional<double> weighted_loss;      // present when weights supplied
  double beta = 0.0;
  double gamma = 0.0;
  int clamped_positions = 0;
};

}  // namespace evaug
