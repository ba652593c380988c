#include "evaug/gen_loss.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "evaug/error.hpp"
#include "evaug/text.hpp"

namespace evaug {

std::optional<std::size_t> TokenProbMatrix::vocab_index(
    const std::string& token) const {
  auto it = std::find(vocab.begin(), vocab.end(), token);
  if (it == vocab.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vocab.begin());
}

void validate_matrix(const TokenProbMatrix& probs) {
  for (std::size_t r = 0; r < probs.rows.size(); ++r) {
    const auto& row = probs.rows[r];
    if (row.size() != probs.vocab.size()) {
      throw Error("probability matrix: row " + std::to_string(r) + " has " +
                  std::to_string(row.size()) + " entries for vocab size " +
                  std::to_string(probs.vocab.size()));
    }
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) {
        throw Error("probability matrix: row " + std::to_string(r) +
                    " has a negative entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw Error("probability matrix: row " + std::to_string(r) +
                  " sums to " + std::to_string(sum));
    }
  }
}

bool record_covered(const EventRecord& record, const std::string& text) {
  if (!contains_word_bounded(text, record.trigger.text)) return false;
  for (const auto& [role, span] : record.arguments) {
    if (!contains_word_bounded(text, span.text)) return false;
  }
  return true;
}

std::vector<UncoveredElement> find_uncovered_elements(
    const EventRecord& record, const std::string& generated_text,
    const std::vector<std::string>& vocab) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab[i], i);

  auto make_element = [&](const std::string& text) {
    UncoveredElement e;
    e.source_text = text;
    e.words = split_whitespace(text);
    for (const auto& w : e.words) {
      auto it = index.find(w);
      if (it == index.end()) {
        e.encodable = false;
        e.oov_words.push_back(w);
      } else {
        e.onehot_index.push_back(it->second);
      }
    }
    if (!e.encodable) e.onehot_index.clear();
    return e;
  };

  std::vector<UncoveredElement> out;
  if (!contains_word_bounded(generated_text, record.trigger.text)) {
    out.push_back(make_element(record.trigger.text));
  }
  for (const auto& [role, span] : record.arguments) {
    if (!contains_word_bounded(generated_text, span.text)) {
      out.push_back(make_element(span.text));
    }
  }
  return out;
}

std::vector<Window> candidate_windows(const TokenProbMatrix& probs,
                                      const UncoveredElement& element) {
  std::vector<Window> out;
  const std::size_t width = element.words.size();
  if (width == 0 || width > probs.rows.size()) return out;
  for (std::size_t start = 0; start + width <= probs.rows.size(); ++start) {
    out.push_back({start, start + width - 1});
  }
  return out;
}

double l1_window_distance(const UncoveredElement& element,
                          const TokenProbMatrix& probs, const Window& window) {
  if (!element.encodable) {
    throw Error("l1_window_distance: element '" + element.source_text +
                "' is not encodable over the vocabulary");
  }
  const std::size_t width = element.words.size();
  if (window.end - window.start + 1 != width || window.end >= probs.rows.size()) {
    throw Error("l1_window_distance: window does not fit element width");
  }
  double total = 0.0;
  for (std::size_t offset = 0; offset < width; ++offset) {
    const auto& row = probs.rows[window.start + offset];
    const std::size_t hot = element.onehot_index[offset];
    for (std::size_t v = 0; v < row.size(); ++v) {
      const double target = (v == hot) ? 1.0 : 0.0;
      total += std::abs(target - row[v]);
    }
  }
  return total;
}

AssignmentResult greedy_assign(const std::vector<UncoveredElement>& elements,
                               const TokenProbMatrix& probs) {
  struct Candidate {
    double score;
    std::size_t start;
    std::size_t element;
    Window window;
  };

  // Pool every candidate after traversing all elements, then commit in
  // (score, window start, element index) order. Feasibility only ever
  // shrinks, so a single pass over the sorted pool equals repeated argmin.
  std::vector<Candidate> pool;
  for (std::size_t m = 0; m < elements.size(); ++m) {
    if (!elements[m].encodable) continue;
    for (const Window& w : candidate_windows(probs, elements[m])) {
      pool.push_back({l1_window_distance(elements[m], probs, w), w.start, m, w});
    }
  }
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.score != b.score) return a.score < b.score;
                     if (a.start != b.start) return a.start < b.start;
                     return a.element < b.element;
                   });

  AssignmentResult result;
  std::vector<bool> placed(elements.size(), false);
  auto conflicts = [&](const Window& w) {
    for (const Placement& p : result.placements) {
      if (w.start <= p.window.end && p.window.start <= w.end) return true;
    }
    return false;
  };
  for (const Candidate& c : pool) {
    if (placed[c.element] || conflicts(c.window)) continue;
    result.placements.push_back({c.element, c.window, c.score});
    placed[c.element] = true;
  }
  for (std::size_t m = 0; m < elements.size(); ++m) {
    if (!placed[m]) result.unplaced.push_back(m);
  }
  return result;
}

namespace {

double clamped_log(double p, int& clamped) {
  if (p < kProbEpsilon) {
    ++clamped;
    return std::log(kProbEpsilon);
  }
  return std::log(p);
}

}  // namespace

LogLik lm_loss(const TokenProbMatrix& probs,
               const std::vector<std::string>& target_tokens) {
  if (target_tokens.size() != probs.rows.size()) {
    throw Error("lm_loss: " + std::to_string(target_tokens.size()) +
                " target tokens for " + std::to_string(probs.rows.size()) +
                " probability rows");
  }
  LogLik out;
  for (std::size_t s = 0; s < target_tokens.size(); ++s) {
    auto idx = probs.vocab_index(target_tokens[s]);
    const double p = idx ? probs.rows[s][*idx] : 0.0;
    out.value += clamped_log(p, out.clamped);
  }
  return out;
}

LogLik argument_loss(const TokenProbMatrix& probs,
                     const std::vector<UncoveredElement>& elements,
                     const AssignmentResult& assignment) {
  LogLik out;
  for (const Placement& p : assignment.placements) {
    if (p.element >= elements.size()) {
      throw Error("argument_loss: placement references element " +
                  std::to_string(p.element) + " of " +
                  std::to_string(elements.size()));
    }
    const UncoveredElement& element = elements[p.element];
    if (p.window.end >= probs.rows.size()) {
      throw Error("argument_loss: window exceeds probability rows");
    }
    for (std::size_t offset = 0; offset < element.words.size(); ++offset) {
      const std::size_t hot = element.onehot_index[offset];
      out.value += clamped_log(probs.rows[p.window.start + offset][hot],
                               out.clamped);
    }
  }
  return out;
}

double generation_loss(const std::vector<SampleLoss>& samples, double beta,
                       double gamma) {
  if (samples.empty()) throw Error("generation_loss: empty batch");
  double sum = 0.0;
  for (const SampleLoss& s : samples) {
    sum += beta * s.lm + gamma * s.arg;
  }
  return -sum / static_cast<double>(samples.size());
}

double weighted_generation_loss(const std::vector<SampleLoss>& samples,
                                const std::vector<double>& weights,
                                double beta, double gamma) {
  if (samples.empty()) throw Error("weighted_generation_loss: empty batch");
  if (weights.size() != samples.size()) {
    throw Error("weighted_generation_loss: " + std::to_string(weights.size()) +
                " weights for " + std::to_string(samples.size()) + " samples");
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    if (weights[n] < 0.0) {
      throw Error("weighted_generation_loss: negative weight at index " +
                  std::to_string(n));
    }
    sum += beta * weights[n] * samples[n].lm + gamma * weights[n] * samples[n].arg;
  }
  return -sum / static_cast<double>(samples.size());
}

double coverage_rate(const std::vector<CoverageItem>& items) {
  if (items.empty()) throw Error("coverage_rate: empty input");
  std::size_t total = 0;
  std::size_t covered = 0;
  for (const CoverageItem& item : items) {
    for (const EventRecord& r : item.records) {
      ++total;
      if (contains_word_bounded(item.generated_text, r.trigger.text)) ++covered;
      for (const auto& [role, span] : r.arguments) {
        ++total;
        if (contains_word_bounded(item.generated_text, span.text)) ++covered;
      }
    }
  }
  if (total == 0) throw Error("coverage_rate: no triggers or arguments");
  return static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace evaug
