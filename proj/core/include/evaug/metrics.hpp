#pragma once

#include <string>
#include <vector>

namespace evaug {

class MaskedLMBackend;

/// Mean masked-token log probability of one sentence: each position is masked
/// in turn and predicted from all past and future tokens. Probabilities below
/// epsilon clamp at epsilon.
double pll_sentence(MaskedLMBackend& backend,
                    const std::vector<std::string>& tokens);

/// Arithmetic mean of per-sentence scores over the corpus (whitespace
/// tokenized). Errors on an empty corpus.
double corpus_pll(MaskedLMBackend& backend,
                  const std::vector<std::string>& sentences);

struct PLLReport {
  std::vector<double> per_sentence;
  double mean = 0.0;
};

PLLReport corpus_pll_report(MaskedLMBackend& backend,
                            const std::vector<std::string>& sentences);

struct DiversityReport {
  int n = 0;
  std::size_t novel_distinct = 0;  // distinct n-grams absent from the original
  std::size_t total_distinct = 0;  // distinct n-grams in the generated text
  double ratio = 0.0;              // novel / total, 0 when total is 0
};

/// Distinct n-grams of the generated corpus that never appear in the original
/// corpus. Both the count and the ratio are reported.
DiversityReport novel_distinct_ngrams(const std::vector<std::string>& generated,
                                      const std::vector<std::string>& original,
                                      int n);

}  // namespace evaug
