#include "evaug/mocks.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "evaug/dataset_io.hpp"
#include "evaug/error.hpp"
#include "evaug/rng.hpp"
#include "evaug/text.hpp"

namespace evaug {

using nlohmann::json;

// ---------------------------------------------------------------------------
// MockGenerator

MockGenerator::MockGenerator(std::uint64_t seed, double step)
    : seed_(seed), step_(step) {
  if (step < 0.0 || step > 1.0) {
    throw Error("MockGenerator: step must lie in [0,1]");
  }
}

std::unique_ptr<MockGenerator> MockGenerator::from_table(
    std::vector<std::string> vocab, std::vector<std::vector<double>> rows,
    std::uint64_t seed) {
  auto gen = std::make_unique<MockGenerator>(seed, 0.0);
  gen->table_mode_ = true;
  gen->vocab_ = std::move(vocab);
  gen->table_rows_ = std::move(rows);
  TokenProbMatrix probe{gen->vocab_, gen->table_rows_};
  validate_matrix(probe);  // malformed tables are rejected up front
  return gen;
}

void MockGenerator::fit_vocab(const std::vector<std::string>& target_texts) {
  std::set<std::string> tokens;
  for (const auto& text : target_texts) {
    for (auto& tok : split_whitespace(text)) tokens.insert(std::move(tok));
  }
  vocab_.assign(tokens.begin(), tokens.end());
  source_rows_.clear();
}

std::vector<std::vector<double>>& MockGenerator::ensure_rows(
    const GenerationInput& input) {
  if (table_mode_) return table_rows_;
  if (vocab_.empty()) {
    throw Error("MockGenerator: fit_vocab must run before generate/train");
  }
  auto it = source_rows_.find(input.source_id);
  if (it == source_rows_.end()) {
    const std::size_t length = split_whitespace(input.target).size();
    std::vector<std::vector<double>> rows(
        length,
        std::vector<double>(vocab_.size(), 1.0 / static_cast<double>(vocab_.size())));
    it = source_rows_.emplace(input.source_id, std::move(rows)).first;
  }
  return it->second;
}

const std::vector<std::vector<double>>* MockGenerator::rows_for(
    const std::string& source_id) const {
  auto it = source_rows_.find(source_id);
  return it == source_rows_.end() ? nullptr : &it->second;
}

GeneratedSample MockGenerator::generate(const GenerationInput& input) {
  const auto& rows = ensure_rows(input);
  GeneratedSample out;
  out.probs.vocab = vocab_;
  out.probs.rows = rows;
  std::vector<std::string> tokens;
  tokens.reserve(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    Rng rng = Rng::stream(seed_, "gen:" + input.source_id, t);
    const double u = rng.real01();
    // Inverse-CDF sampling in vocab order. As training moves mass toward the
    // target token its CDF interval grows on both sides, so a position that
    // once emitted the target keeps emitting it.
    double cum = 0.0;
    std::size_t pick = rows[t].size() - 1;
    for (std::size_t v = 0; v < rows[t].size(); ++v) {
      cum += rows[t][v];
      if (u < cum) {
        pick = v;
        break;
      }
    }
    tokens.push_back(vocab_[pick]);
  }
  out.text = join(tokens, " ");
  return out;
}

GenLossReport MockGenerator::train(const std::vector<GenTrainSample>& batch,
                                   double beta, double gamma,
                                   const AssignmentSupplier& assign) {
  GenLossReport report;
  report.beta = beta;
  report.gamma = gamma;
  std::vector<double> weights;
  std::vector<std::pair<std::string, std::vector<std::string>>> updates;
  for (const GenTrainSample& sample : batch) {
    auto& rows = ensure_rows(sample.input);
    TokenProbMatrix probs{vocab_, rows};
    const auto targets = split_whitespace(sample.input.target);

    SampleLoss loss;
    if (targets.size() == rows.size()) {
      const LogLik lm = lm_loss(probs, targets);
      loss.lm = lm.value;
      report.clamped_positions += lm.clamped;
    }
    const AssignmentResult assignment = assign(sample.uncovered, probs);
    const LogLik arg = argument_loss(probs, sample.uncovered, assignment);
    loss.arg = arg.value;
    report.clamped_positions += arg.clamped;
    report.samples.push_back(loss);
    weights.push_back(sample.weight);
    updates.emplace_back(sample.input.source_id, targets);
  }
  report.batch_loss = generation_loss(report.samples, beta, gamma);
  report.weighted_loss =
      weighted_generation_loss(report.samples, weights, beta, gamma);

  // Parameter step after the loss snapshot: blend each row toward the
  // one-hot of its target token.
  for (std::size_t n = 0; n < batch.size(); ++n) {
    auto& rows = ensure_rows(batch[n].input);
    const auto& targets = updates[n].second;
    const double shift =
        std::clamp(step_ * std::max(batch[n].weight, 0.0), 0.0, 0.95);
    if (shift == 0.0) continue;
    for (std::size_t t = 0; t < rows.size() && t < targets.size(); ++t) {
      auto idx = std::find(vocab_.begin(), vocab_.end(), targets[t]);
      if (idx == vocab_.end()) continue;
      const std::size_t hot = static_cast<std::size_t>(idx - vocab_.begin());
      for (double& p : rows[t]) p *= (1.0 - shift);
      rows[t][hot] += shift;
    }
  }
  return report;
}

void MockGenerator::save(const std::string& path) const {
  json j;
  j["kind"] = table_mode_ ? "table" : "trainable";
  j["seed"] = seed_;
  j["step"] = step_;
  j["vocab"] = vocab_;
  if (table_mode_) {
    j["rows"] = table_rows_;
  } else {
    json sources = json::object();
    for (const auto& [id, rows] : source_rows_) sources[id] = rows;
    j["sources"] = std::move(sources);
  }
  write_text_file(path, j.dump());
}

void MockGenerator::load(const std::string& path) {
  json j = json::parse(read_text_file(path));
  table_mode_ = j.at("kind").get<std::string>() == "table";
  seed_ = j.at("seed").get<std::uint64_t>();
  step_ = j.at("step").get<double>();
  vocab_ = j.at("vocab").get<std::vector<std::string>>();
  table_rows_.clear();
  source_rows_.clear();
  if (table_mode_) {
    table_rows_ = j.at("rows").get<std::vector<std::vector<double>>>();
  } else {
    for (const auto& [id, rows] : j.at("sources").items()) {
      source_rows_[id] = rows.get<std::vector<std::vector<double>>>();
    }
  }
}

// ---------------------------------------------------------------------------
// MockExtractor

MockExtractor::MockExtractor(double q0, double delta, std::uint64_t seed)
    : q_(q0), delta_(delta), seed_(seed) {
  if (q0 < 0.0 || q0 > 1.0) throw Error("MockExtractor: q0 must lie in [0,1]");
}

void MockExtractor::set_oracle(const EventSchema& schema,
                               const std::vector<AnnotatedSentence>& sentences) {
  schema_ = schema;
  gold_by_context_.clear();
  for (const auto& s : sentences) {
    auto& records = gold_by_context_[s.context];
    records.insert(records.end(), s.records.begin(), s.records.end());
  }
}

std::string MockExtractor::extract(const ExtractionInput& input) {
  const EventRecord* gold = nullptr;
  auto it = gold_by_context_.find(input.context);
  if (it != gold_by_context_.end()) {
    for (const auto& r : it->second) {
      if (r.event_type == input.event_type) {
        gold = &r;
        break;
      }
    }
  }
  if (gold == nullptr) return unfilled_template(schema_, input.event_type);

  const std::uint64_t h =
      mix64(seed_ ^ mix64(fnv1a64(input.context)) ^ fnv1a64(input.event_type));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  if (u < q_) return fill_template(schema_, *gold);
  return unfilled_template(schema_, input.event_type);
}

std::vector<double> MockExtractor::train(
    const std::vector<AnnotatedSentence>& sentences, int epochs,
    double negative_prompt_ratio) {
  last_negative_ratio_ = negative_prompt_ratio;
  if (reference_ == 0) reference_ = std::max<std::size_t>(sentences.size(), 1);
  std::size_t positives = 0;
  for (const auto& s : sentences) {
    if (!s.records.empty()) ++positives;
  }
  std::vector<double> losses;
  for (int e = 0; e < epochs; ++e) {
    q_ = q_ + delta_ * (1.0 - q_) * static_cast<double>(positives) /
                  static_cast<double>(reference_);
    q_ = std::min(q_, 1.0);
    losses.push_back(1.0 - q_);
  }
  return losses;
}

void MockExtractor::save(const std::string& path) const {
  json j{{"q", q_},
         {"delta", delta_},
         {"seed", seed_},
         {"reference", reference_},
         {"negative_ratio", last_negative_ratio_}};
  write_text_file(path, j.dump());
}

void MockExtractor::load(const std::string& path) {
  json j = json::parse(read_text_file(path));
  q_ = j.at("q").get<double>();
  delta_ = j.at("delta").get<double>();
  seed_ = j.at("seed").get<std::uint64_t>();
  reference_ = j.at("reference").get<std::size_t>();
  last_negative_ratio_ = j.value("negative_ratio", 0.0);
}

// ---------------------------------------------------------------------------
// MockPolicy

MockPolicy::MockPolicy(double hi, double lo, double eta, double eta_rl)
    : hi_(hi), lo_(lo), eta_(eta), eta_rl_(eta_rl) {}

std::vector<std::string> MockPolicy::description_elements(
    const std::string& event_description) {
  // Clauses look like "<element> is the ..." separated by " . ".
  std::vector<std::string> elements;
  std::size_t pos = 0;
  while (pos < event_description.size()) {
    std::size_t stop = event_description.find(" . ", pos);
    std::string clause =
        stop == std::string::npos
            ? event_description.substr(pos)
            : event_description.substr(pos, stop - pos);
    pos = stop == std::string::npos ? event_description.size() : stop + 3;
    clause = trim(clause);
    if (clause.size() >= 2 && clause.rfind(" .") == clause.size() - 2) {
      clause = trim(clause.substr(0, clause.size() - 2));
    }
    const std::size_t marker = clause.find(" is the ");
    if (marker != std::string::npos && marker > 0) {
      elements.push_back(clause.substr(0, marker));
    }
  }
  return elements;
}

double MockPolicy::score(const PolicyInput& input) {
  for (const auto& element :
       description_elements(input.event_description)) {
    if (!contains_word_bounded(input.generated_text, element)) return lo_;
  }
  return hi_;
}

double MockPolicy::train(const PolicyBatch& batch) {
  std::vector<double> probs;
  probs.reserve(batch.items.size());
  for (const auto& item : batch.items) probs.push_back(score(item.input));
  const PolicyLoss loss = pretrain_loss(batch, probs);
  hi_ += eta_ * (0.95 - hi_);
  lo_ += eta_ * (0.05 - lo_);
  return loss.value;
}

double MockPolicy::train_rl(
    const std::vector<std::pair<PolicyInput, int>>& diff_new,
    const std::vector<std::pair<PolicyInput, int>>& diff_old, double reward) {
  auto to_items = [&](const std::vector<std::pair<PolicyInput, int>>& pairs) {
    std::vector<RlItem> items;
    items.reserve(pairs.size());
    for (const auto& [input, label] : pairs) {
      items.push_back({label, score(input)});
    }
    return items;
  };
  const PolicyLoss loss =
      retrain_loss(to_items(diff_new), to_items(diff_old), reward);
  lo_ = std::clamp(lo_ - eta_rl_ * reward, 0.02, 0.49);
  hi_ = std::clamp(hi_ + eta_rl_ * reward, 0.51, 0.98);
  return loss.value;
}

void MockPolicy::save(const std::string& path) const {
  json j{{"hi", hi_}, {"lo", lo_}, {"eta", eta_}, {"eta_rl", eta_rl_}};
  write_text_file(path, j.dump());
}

void MockPolicy::load(const std::string& path) {
  json j = json::parse(read_text_file(path));
  hi_ = j.at("hi").get<double>();
  lo_ = j.at("lo").get<double>();
  eta_ = j.at("eta").get<double>();
  eta_rl_ = j.at("eta_rl").get<double>();
}

// ---------------------------------------------------------------------------
// MockMaskedLM

std::unique_ptr<MockMaskedLM> MockMaskedLM::uniform(std::size_t vocab_size) {
  if (vocab_size == 0) throw Error("MockMaskedLM: vocab size must be positive");
  auto lm = std::make_unique<MockMaskedLM>();
  lm->kind_ = Kind::uniform;
  lm->vocab_size_ = vocab_size;
  return lm;
}

std::unique_ptr<MockMaskedLM> MockMaskedLM::oracle() {
  auto lm = std::make_unique<MockMaskedLM>();
  lm->kind_ = Kind::oracle;
  return lm;
}

std::unique_ptr<MockMaskedLM> MockMaskedLM::table(
    std::map<std::string, double> probs, double default_prob) {
  auto lm = std::make_unique<MockMaskedLM>();
  lm->kind_ = Kind::table;
  lm->table_ = std::move(probs);
  lm->default_prob_ = default_prob;
  return lm;
}

std::unique_ptr<MockMaskedLM> MockMaskedLM::unigram() {
  auto lm = std::make_unique<MockMaskedLM>();
  lm->kind_ = Kind::unigram;
  return lm;
}

double MockMaskedLM::token_prob(const std::vector<std::string>& tokens,
                                std::size_t masked_position) {
  if (masked_position >= tokens.size()) {
    throw Error("MockMaskedLM: masked position out of range");
  }
  const std::string& token = tokens[masked_position];
  switch (kind_) {
    case Kind::uniform:
      return 1.0 / static_cast<double>(vocab_size_);
    case Kind::oracle:
      return 1.0;
    case Kind::table: {
      auto it = table_.find(token);
      return it == table_.end() ? default_prob_ : it->second;
    }
    case Kind::unigram: {
      const std::uint64_t vocab = std::max<std::uint64_t>(counts_.size(), 1);
      auto it = counts_.find(token);
      const std::uint64_t c = it == counts_.end() ? 0 : it->second;
      return static_cast<double>(c + 1) /
             static_cast<double>(total_count_ + vocab);
    }
  }
  return 0.0;
}

void MockMaskedLM::fine_tune(const std::vector<std::string>& corpus) {
  if (kind_ != Kind::unigram) return;
  for (const auto& sentence : corpus) {
    for (const auto& token : split_whitespace(sentence)) {
      ++counts_[token];
      ++total_count_;
    }
  }
}

}  // namespace evaug
