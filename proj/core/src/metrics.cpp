#include "evaug/metrics.hpp"

#include <cmath>
#include <set>

#include "evaug/backends.hpp"
#include "evaug/error.hpp"
#include "evaug/gen_loss.hpp"
#include "evaug/text.hpp"

namespace evaug {

double pll_sentence(MaskedLMBackend& backend,
                    const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw Error("pll_sentence: empty sentence");
  double sum = 0.0;
  for (std::size_t s = 0; s < tokens.size(); ++s) {
    double p = backend.token_prob(tokens, s);
    if (p < kProbEpsilon) p = kProbEpsilon;
    sum += std::log(p);
  }
  return sum / static_cast<double>(tokens.size());
}

double corpus_pll(MaskedLMBackend& backend,
                  const std::vector<std::string>& sentences) {
  return corpus_pll_report(backend, sentences).mean;
}

PLLReport corpus_pll_report(MaskedLMBackend& backend,
                            const std::vector<std::string>& sentences) {
  if (sentences.empty()) throw Error("corpus_pll: empty corpus");
  PLLReport report;
  double sum = 0.0;
  for (const std::string& sentence : sentences) {
    report.per_sentence.push_back(
        pll_sentence(backend, split_whitespace(sentence)));
    sum += report.per_sentence.back();
  }
  report.mean = sum / static_cast<double>(sentences.size());
  return report;
}

namespace {

std::set<std::string> distinct_ngrams(const std::vector<std::string>& corpus,
                                      int n) {
  std::set<std::string> grams;
  for (const std::string& sentence : corpus) {
    const auto tokens = split_whitespace(sentence);
    if (tokens.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (int k = 1; k < n; ++k) {
        gram += ' ';
        gram += tokens[i + k];
      }
      grams.insert(std::move(gram));
    }
  }
  return grams;
}

}  // namespace

DiversityReport novel_distinct_ngrams(const std::vector<std::string>& generated,
                                      const std::vector<std::string>& original,
                                      int n) {
  if (n < 1) throw Error("novel_distinct_ngrams: n must be >= 1");
  DiversityReport report;
  report.n = n;
  const auto gen_grams = distinct_ngrams(generated, n);
  const auto orig_grams = distinct_ngrams(original, n);
  report.total_distinct = gen_grams.size();
  for (const auto& gram : gen_grams) {
    if (!orig_grams.count(gram)) ++report.novel_distinct;
  }
  report.ratio = report.total_distinct == 0
                     ? 0.0
                     : static_cast<double>(report.novel_distinct) /
                           static_cast<double>(report.total_distinct);
  return report;
}

}  // namespace evaug
