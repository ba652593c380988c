#include "evaug/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include <json.hpp>

#include "evaug/adapter.hpp"
#include "evaug/dataset_io.hpp"
#include "evaug/error.hpp"
#include "evaug/gen_loss.hpp"
#include "evaug/metrics.hpp"
#include "evaug/mocks.hpp"
#include "evaug/prompts.hpp"
#include "evaug/report.hpp"
#include "evaug/rng.hpp"

namespace evaug {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

RunConfig default_config() { return RunConfig{}; }

namespace {

json schedules_to_json(const ScheduleConfig& s) {
  return json{{"generator_pretrain_max", s.generator_pretrain_max},
              {"policy_pretrain_max", s.policy_pretrain_max},
              {"extractor_pretrain", s.extractor_pretrain},
              {"extractor_retrain", s.extractor_retrain},
              {"policy_retrain", s.policy_retrain},
              {"generator_retrain", s.generator_retrain}};
}

void schedules_from_json(const json& j, ScheduleConfig& s) {
  s.generator_pretrain_max =
      j.value("generator_pretrain_max", s.generator_pretrain_max);
  s.policy_pretrain_max = j.value("policy_pretrain_max", s.policy_pretrain_max);
  s.extractor_pretrain = j.value("extractor_pretrain", s.extractor_pretrain);
  s.extractor_retrain = j.value("extractor_retrain", s.extractor_retrain);
  s.policy_retrain = j.value("policy_retrain", s.policy_retrain);
  s.generator_retrain = j.value("generator_retrain", s.generator_retrain);
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
  json j;
  j["run_id"] = c.run_id;
  j["runs_root"] = c.runs_root;
  j["seed"] = c.seed;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["mask_rate"] = c.mask_rate;
  j["epochs"] = c.epochs;
  j["diff_subsample"] = c.diff_subsample;
  j["original_sample_ratio"] = c.original_sample_ratio;
  j["negative_prompt_ratio"] = c.negative_prompt_ratio;
  j["coverage_stop"] = c.coverage_stop;
  j["precision_band"] = json::array({c.precision_band_low, c.precision_band_high});
  j["protect_event_tokens"] = c.protect_event_tokens;
  j["stop_after"] = c.stop_after;
  j["max_wall_seconds"] = c.max_wall_seconds;
  j["schedules"] = schedules_to_json(c.schedules);
  j["paths"] = json{{"train", c.paths.train},
                    {"dev", c.paths.dev},
                    {"schema", c.paths.schema},
                    {"pretrained", c.paths.pretrained}};
  j["backends"] = json{
      {"generator",
       json{{"kind", c.generator.kind},
            {"step", c.generator.step},
            {"command", c.generator.command}}},
      {"extractor",
       json{{"kind", c.extractor.kind},
            {"q0", c.extractor.q0},
            {"delta", c.extractor.delta},
            {"command", c.extractor.command}}},
      {"policy",
       json{{"kind", c.policy.kind},
            {"hi", c.policy.hi},
            {"lo", c.policy.lo},
            {"eta", c.policy.eta},
            {"eta_rl", c.policy.eta_rl},
            {"command", c.policy.command}}},
      {"masked_lm",
       json{{"kind", c.masked_lm.kind},
            {"vocab_size", c.masked_lm.vocab_size},
            {"fine_tune", c.masked_lm.fine_tune},
            {"command", c.masked_lm.command}}}};
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(origin + ": config parse error: " + e.what());
  }
  RunConfig c = default_config();
  try {
    c.run_id = j.value("run_id", c.run_id);
    c.runs_root = j.value("runs_root", c.runs_root);
    c.seed = j.value("seed", c.seed);
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.gamma = j.value("gamma", c.gamma);
    c.mask_rate = j.value("mask_rate", c.mask_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.diff_subsample = j.value("diff_subsample", c.diff_subsample);
    c.original_sample_ratio =
        j.value("original_sample_ratio", c.original_sample_ratio);
    c.negative_prompt_ratio =
        j.value("negative_prompt_ratio", c.negative_prompt_ratio);
    c.coverage_stop = j.value("coverage_stop", c.coverage_stop);
    if (j.contains("precision_band")) {
      const auto& band = j.at("precision_band");
      c.precision_band_low = band.at(0).get<double>();
      c.precision_band_high = band.at(1).get<double>();
    }
    c.protect_event_tokens =
        j.value("protect_event_tokens", c.protect_event_tokens);
    c.stop_after = j.value("stop_after", c.stop_after);
    c.max_wall_seconds = j.value("max_wall_seconds", c.max_wall_seconds);
    if (j.contains("schedules")) schedules_from_json(j.at("schedules"), c.schedules);
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.paths.train = p.value("train", c.paths.train);
      c.paths.dev = p.value("dev", c.paths.dev);
      c.paths.schema = p.value("schema", c.paths.schema);
      c.paths.pretrained = p.value("pretrained", c.paths.pretrained);
    }
    if (j.contains("backends")) {
      const auto& b = j.at("backends");
      if (b.contains("generator")) {
        const auto& g = b.at("generator");
        c.generator.kind = g.value("kind", c.generator.kind);
        c.generator.step = g.value("step", c.generator.step);
        c.generator.command = g.value("command", c.generator.command);
      }
      if (b.contains("extractor")) {
        const auto& e = b.at("extractor");
        c.extractor.kind = e.value("kind", c.extractor.kind);
        c.extractor.q0 = e.value("q0", c.extractor.q0);
        c.extractor.delta = e.value("delta", c.extractor.delta);
        c.extractor.command = e.value("command", c.extractor.command);
      }
      if (b.contains("policy")) {
        const auto& p = b.at("policy");
        c.policy.kind = p.value("kind", c.policy.kind);
        c.policy.hi = p.value("hi", c.policy.hi);
        c.policy.lo = p.value("lo", c.policy.lo);
        c.policy.eta = p.value("eta", c.policy.eta);
        c.policy.eta_rl = p.value("eta_rl", c.policy.eta_rl);
        c.policy.command = p.value("command", c.policy.command);
      }
      if (b.contains("masked_lm")) {
        const auto& m = b.at("masked_lm");
        c.masked_lm.kind = m.value("kind", c.masked_lm.kind);
        c.masked_lm.vocab_size = m.value("vocab_size", c.masked_lm.vocab_size);
        c.masked_lm.fine_tune = m.value("fine_tune", c.masked_lm.fine_tune);
        c.masked_lm.command = m.value("command", c.masked_lm.command);
      }
    }
  } catch (const json::exception& e) {
    throw Error(origin + ": malformed config field: " + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  RunConfig c = config_from_json(read_text_file(path), path);
  validate_config(c);
  return c;
}

void validate_config(const RunConfig& c) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(c.mask_rate)) throw Error("config: mask_rate must lie in [0,1]");
  if (!in_unit(c.original_sample_ratio)) {
    throw Error("config: original_sample_ratio must lie in [0,1]");
  }
  if (!in_unit(c.negative_prompt_ratio)) {
    throw Error("config: negative_prompt_ratio must lie in [0,1]");
  }
  if (!in_unit(c.coverage_stop)) {
    throw Error("config: coverage_stop must lie in [0,1]");
  }
  if (!in_unit(c.precision_band_low) || !in_unit(c.precision_band_high) ||
      c.precision_band_low > c.precision_band_high) {
    throw Error("config: precision band must satisfy 0 <= low <= high <= 1");
  }
  if (c.epochs < 1) throw Error("config: epochs must be >= 1");
  if (c.beta < 0.0 || c.gamma < 0.0) {
    throw Error("config: beta and gamma must be non-negative");
  }
  if (c.run_id.empty()) throw Error("config: run_id must not be empty");
}

std::string describe_defaults() {
  const RunConfig c;
  std::string out = config_to_json(c);
  out += "\n";
  out += "alpha=10: scale applied to dev argument-F1 deltas to form the reward\n";
  out += "beta=0.9, gamma=0.1: language-model vs argument-aware loss mix\n";
  out += "mask_rate=0.3: per-token probability of replacing a context token with [M]\n";
  out += "epochs=80: retraining episodes (the shipped toy profile scales this to 10)\n";
  out += "diff_subsample=32: samples drawn from each episode diff set\n";
  out += "original_sample_ratio=0.5: share of the original training set mixed in per episode\n";
  out += "negative_prompt_ratio=0.12: negative prompt share for extractor training\n";
  out += "coverage_stop=0.7: generator pretraining halts once coverage exceeds this\n";
  out += "precision_band=[0.8,0.9]: policy pretraining halts inside this precision band\n";
  out += "schedules: extractor 15 pretrain / 2 retrain epochs; policy and generator retrain 1 each\n";
  return out;
}

// ---------------------------------------------------------------------------
// Backend construction

Backends make_backends(const RunConfig& config, const Dataset& train,
                       const Dataset& dev) {
  Backends out;

  auto plugin = [](const std::vector<std::string>& command) {
    if (command.empty()) {
      throw Error("config: process backend needs a non-empty command");
    }
    return std::make_shared<PluginProcess>(command);
  };

  if (config.generator.kind == "mock") {
    out.generator =
        std::make_unique<MockGenerator>(config.seed, config.generator.step);
  } else if (config.generator.kind == "process") {
    out.generator =
        std::make_unique<ProcessGenerator>(plugin(config.generator.command));
  } else {
    throw Error("config: unknown generator kind '" + config.generator.kind + "'");
  }

  if (config.extractor.kind == "mock") {
    auto mock = std::make_unique<MockExtractor>(
        config.extractor.q0, config.extractor.delta, config.seed);
    std::vector<AnnotatedSentence> oracle = train.sentences;
    oracle.insert(oracle.end(), dev.sentences.begin(), dev.sentences.end());
    mock->set_oracle(train.schema, oracle);
    out.extractor = std::move(mock);
  } else if (config.extractor.kind == "process") {
    out.extractor =
        std::make_unique<ProcessExtractor>(plugin(config.extractor.command));
  } else {
    throw Error("config: unknown extractor kind '" + config.extractor.kind + "'");
  }

  if (config.policy.kind == "mock") {
    out.policy = std::make_unique<MockPolicy>(config.policy.hi, config.policy.lo,
                                              config.policy.eta,
                                              config.policy.eta_rl);
  } else if (config.policy.kind == "process") {
    out.policy = std::make_unique<ProcessPolicy>(plugin(config.policy.command));
  } else {
    throw Error("config: unknown policy kind '" + config.policy.kind + "'");
  }

  if (config.masked_lm.kind == "unigram") {
    out.masked_lm = MockMaskedLM::unigram();
  } else if (config.masked_lm.kind == "uniform") {
    out.masked_lm = MockMaskedLM::uniform(config.masked_lm.vocab_size);
  } else if (config.masked_lm.kind == "oracle") {
    out.masked_lm = MockMaskedLM::oracle();
  } else if (config.masked_lm.kind == "process") {
    out.masked_lm =
        std::make_unique<ProcessMaskedLM>(plugin(config.masked_lm.command));
  } else {
    throw Error("config: unknown masked_lm kind '" + config.masked_lm.kind + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generation and evaluation passes

std::vector<GenerationInstance> build_instances(const RunConfig& config,
                                                const Dataset& train,
                                                GeneratorBackend& generator,
                                                const std::string& mask_stream,
                                                std::uint64_t tag) {
  Rng mask_rng = Rng::stream(config.seed, mask_stream, tag);
  std::vector<GenerationInstance> out;
  for (const AnnotatedSentence& sentence : train.sentences) {
    if (sentence.records.empty()) continue;  // never an augmentation source
    GenerationInstance inst;
    inst.id = sentence.id;
    inst.records = sentence.records;
    inst.input = build_generation_input(train.schema, sentence, config.mask_rate,
                                        mask_rng, config.protect_event_tokens);
    GeneratedSample sample = generator.generate(inst.input);
    inst.generated = sample.text;
    inst.covered = std::all_of(
        inst.records.begin(), inst.records.end(),
        [&](const EventRecord& r) { return record_covered(r, inst.generated); });
    out.push_back(std::move(inst));
  }
  return out;
}

ScoreReport evaluate_extractor(const RunConfig& config, const Dataset& dev,
                               ExtractorBackend& extractor) {
  std::vector<SentencePair> pairs;
  const auto type_names = dev.schema.type_names();
  for (const AnnotatedSentence& sentence : dev.sentences) {
    if (sentence.context.empty()) continue;
    std::vector<std::pair<std::string, std::string>> answered;
    for (const std::string& type : type_names) {
      ExtractionInput input =
          build_extraction_input(dev.schema, type, sentence.context);
      answered.emplace_back(type, extractor.extract(input));
    }
    SentencePair pair;
    pair.predicted = decode_predictions(dev.schema, sentence.context, answered);
    pair.gold = sentence.records;
    pairs.push_back(std::move(pair));
  }
  ScoreReport report = evaluate_sentences(pairs);
  (void)config;
  return report;
}

// ---------------------------------------------------------------------------
// Pretraining schedules

namespace {

std::vector<GenTrainSample> make_train_batch(
    const std::vector<GenerationInstance>& instances,
    const std::vector<std::string>& vocab, bool use_weights) {
  std::vector<GenTrainSample> batch;
  batch.reserve(instances.size());
  for (const GenerationInstance& inst : instances) {
    GenTrainSample sample;
    sample.input = inst.input;
    sample.weight = use_weights ? inst.weight : 1.0;
    for (const EventRecord& record : inst.records) {
      auto uncovered = find_uncovered_elements(record, inst.generated, vocab);
      sample.uncovered.insert(sample.uncovered.end(),
                              std::make_move_iterator(uncovered.begin()),
                              std::make_move_iterator(uncovered.end()));
    }
    batch.push_back(std::move(sample));
  }
  return batch;
}

double instance_coverage(const std::vector<GenerationInstance>& instances) {
  std::vector<CoverageItem> items;
  items.reserve(instances.size());
  for (const auto& inst : instances) {
    items.push_back({inst.records, inst.generated});
  }
  return coverage_rate(items);
}

const AssignmentSupplier kGreedySupplier =
    [](const std::vector<UncoveredElement>& elements,
       const TokenProbMatrix& probs) { return greedy_assign(elements, probs); };

}  // namespace

GeneratorPretrainResult pretrain_generator(const RunConfig& config,
                                           const Dataset& train,
                                           GeneratorBackend& generator) {
  if (train.sentences.empty()) {
    throw Error("pretrain_generator: empty training set");
  }
  GeneratorPretrainResult result;

  std::vector<std::string> targets;
  for (const auto& s : train.sentences) {
    if (!s.records.empty()) targets.push_back(s.context);
  }
  generator.prepare(targets);

  std::vector<GenerationInstance> instances =
      build_instances(config, train, generator, "pretrain-mask", 0);
  if (instances.empty()) {
    throw Error("pretrain_generator: no record-bearing sentences to train on");
  }

  for (int epoch = 1; epoch <= config.schedules.generator_pretrain_max; ++epoch) {
    auto batch = make_train_batch(instances, generator.vocab(), false);
    generator.train(batch, config.beta, config.gamma, kGreedySupplier);

    instances = build_instances(config, train, generator, "pretrain-mask",
                                static_cast<std::uint64_t>(epoch));
    const double coverage = instance_coverage(instances);
    result.coverage_trace.push_back(coverage);
    result.epochs_run = epoch;
    if (coverage > config.coverage_stop) {
      result.reached_threshold = true;
      return result;
    }
  }
  throw Error("pretrain_generator: coverage " +
              std::to_string(result.coverage_trace.empty()
                                 ? 0.0
                                 : result.coverage_trace.back()) +
              " never exceeded " + std::to_string(config.coverage_stop) +
              " within " +
              std::to_string(config.schedules.generator_pretrain_max) +
              " epochs");
}

PolicyPretrainResult pretrain_policy(const RunConfig& config,
                                     const PolicyBatch& batch,
                                     PolicyBackend& policy) {
  PolicyBatch train_slice;
  train_slice.purpose = BatchPurpose::pretrain;
  std::vector<PolicyExample> held_out;
  for (std::size_t i = 0; i < batch.items.size(); ++i) {
    if (i % 4 == 3) {
      held_out.push_back(batch.items[i]);
    } else {
      train_slice.items.push_back(batch.items[i]);
    }
  }

  auto class_counts = [](const std::vector<PolicyExample>& items) {
    std::pair<std::size_t, std::size_t> counts{0, 0};
    for (const auto& item : items) {
      item.label == 1 ? ++counts.first : ++counts.second;
    }
    return counts;
  };
  const auto train_counts = class_counts(train_slice.items);
  const auto eval_counts = class_counts(held_out);
  if (train_counts.first == 0 || train_counts.second == 0 ||
      eval_counts.first == 0 || eval_counts.second == 0) {
    throw Error("pretrain_policy: both classes required (train " +
                std::to_string(train_counts.first) + "+/" +
                std::to_string(train_counts.second) + "-, held-out " +
                std::to_string(eval_counts.first) + "+/" +
                std::to_string(eval_counts.second) + "-)");
  }

  const fs::path tmp_dir =
      fs::temp_directory_path() /
      ("evaug-policy-" + std::to_string(mix64(config.seed)));
  fs::create_directories(tmp_dir);

  PolicyPretrainResult result;
  int closest_epoch = 0;
  double closest_deviation = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= config.schedules.policy_pretrain_max; ++epoch) {
    policy.train(train_slice);

    std::size_t tp = 0;
    std::size_t fp = 0;
    for (const auto& item : held_out) {
      const bool retained = policy.score(item.input) >= 0.5;
      if (!retained) continue;
      item.label == 1 ? ++tp : ++fp;
    }
    const double precision =
        (tp + fp) == 0 ? 0.0
                       : static_cast<double>(tp) / static_cast<double>(tp + fp);
    result.precision_trace.push_back(precision);
    result.epochs_run = epoch;

    const std::string state_path =
        (tmp_dir / ("epoch-" + std::to_string(epoch) + ".state")).string();
    policy.save(state_path);

    if (precision >= config.precision_band_low &&
        precision <= config.precision_band_high) {
      result.entered_band = true;
      result.stopped_epoch = epoch;
      break;
    }
    const double deviation = precision < config.precision_band_low
                                 ? config.precision_band_low - precision
                                 : precision - config.precision_band_high;
    if (deviation < closest_deviation) {
      closest_deviation = deviation;
      closest_epoch = epoch;
    }
  }

  if (!result.entered_band) {
    result.stopped_epoch = closest_epoch;
    result.band_deviation = closest_deviation;
    policy.load(
        (tmp_dir / ("epoch-" + std::to_string(closest_epoch) + ".state"))
            .string());
  }
  fs::remove_all(tmp_dir);
  return result;
}

std::vector<double> pretrain_extractor(const RunConfig& config,
                                       const Dataset& train,
                                       ExtractorBackend& extractor) {
  return extractor.train(train.sentences, config.schedules.extractor_pretrain,
                         config.negative_prompt_ratio);
}

// ---------------------------------------------------------------------------
// Episode persistence

std::string epoch_log_to_json(const EpochLog& log) {
  json j;
  j["epoch"] = log.epoch;
  j["retained_ids"] = log.retained_ids;
  j["removed_ids"] = log.removed_ids;
  j["diff_new_ids"] = log.diff_new_ids;
  j["diff_old_ids"] = log.diff_old_ids;
  j["tsub_ids"] = log.tsub_ids;
  j["reward"] = log.reward;
  j["f1_trigger"] = log.f1_trigger;
  j["f1_argument"] = log.f1_argument;
  j["trig_p"] = log.trig_p;
  j["trig_r"] = log.trig_r;
  j["arg_p"] = log.arg_p;
  j["arg_r"] = log.arg_r;
  j["best_f1_trigger"] = log.best_f1_trigger;
  j["best_f1_argument"] = log.best_f1_argument;
  j["checkpoint_updated"] = log.checkpoint_updated;
  j["pll"] = log.pll;
  j["distinct2"] = log.distinct2;
  j["distinct3"] = log.distinct3;
  j["weights"] = log.weights;
  j["generated"] = log.generated;
  j["covered"] = log.covered;
  return j.dump(2) + "\n";
}

EpochLog epoch_log_from_json(const std::string& text,
                             const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(origin + ": episode parse error: " + e.what());
  }
  EpochLog log;
  try {
    log.epoch = j.at("epoch").get<int>();
    log.retained_ids = j.value("retained_ids", log.retained_ids);
    log.removed_ids = j.value("removed_ids", log.removed_ids);
    log.diff_new_ids = j.value("diff_new_ids", log.diff_new_ids);
    log.diff_old_ids = j.value("diff_old_ids", log.diff_old_ids);
    log.tsub_ids = j.value("tsub_ids", log.tsub_ids);
    log.reward = j.value("reward", 0.0);
    log.f1_trigger = j.at("f1_trigger").get<double>();
    log.f1_argument = j.at("f1_argument").get<double>();
    log.trig_p = j.value("trig_p", 0.0);
    log.trig_r = j.value("trig_r", 0.0);
    log.arg_p = j.value("arg_p", 0.0);
    log.arg_r = j.value("arg_r", 0.0);
    log.best_f1_trigger = j.value("best_f1_trigger", 0.0);
    log.best_f1_argument = j.value("best_f1_argument", 0.0);
    log.checkpoint_updated = j.value("checkpoint_updated", false);
    log.pll = j.value("pll", 0.0);
    log.distinct2 = j.value("distinct2", 0.0);
    log.distinct3 = j.value("distinct3", 0.0);
    if (j.contains("weights")) {
      log.weights = j.at("weights").get<std::map<std::string, double>>();
    }
    if (j.contains("generated")) {
      log.generated =
          j.at("generated").get<std::map<std::string, std::string>>();
    }
    if (j.contains("covered")) {
      log.covered = j.at("covered").get<std::map<std::string, bool>>();
    }
  } catch (const json::exception& e) {
    throw Error(origin + ": malformed episode field: " + e.what());
  }
  return log;
}

RunPaths run_paths(const RunConfig& config) {
  std::string root = config.runs_root;
  if (const char* override_root = std::getenv(kRunsRootEnvVar)) {
    if (override_root[0] != '\0') root = override_root;
  }
  return RunPaths{root + "/" + config.run_id};
}

// ---------------------------------------------------------------------------
// Retraining loop

namespace {

struct BackendStates {
  GeneratorBackend& generator;
  ExtractorBackend& extractor;
  PolicyBackend& policy;

  void save_all(const std::string& dir) const {
    fs::create_directories(dir);
    generator.save(dir + "/" + generator.name() + ".state");
    extractor.save(dir + "/" + extractor.name() + ".state");
    policy.save(dir + "/" + policy.name() + ".state");
  }
  void load_all(const std::string& dir) {
    generator.load(dir + "/" + generator.name() + ".state");
    extractor.load(dir + "/" + extractor.name() + ".state");
    policy.load(dir + "/" + policy.name() + ".state");
  }
  bool all_present(const std::string& dir) const {
    return fs::exists(dir + "/" + generator.name() + ".state") &&
           fs::exists(dir + "/" + extractor.name() + ".state") &&
           fs::exists(dir + "/" + policy.name() + ".state");
  }
};

std::string config_diff_summary(const std::string& stored,
                                const std::string& current) {
  json a = json::parse(stored, nullptr, false);
  json b = json::parse(current, nullptr, false);
  if (a.is_discarded() || b.is_discarded()) return "stored config unreadable";
  std::string diff;
  for (const auto& [key, value] : b.items()) {
    if (!a.contains(key) || a.at(key) != value) {
      if (!diff.empty()) diff += ", ";
      diff += key;
    }
  }
  for (const auto& [key, value] : a.items()) {
    if (!b.contains(key)) {
      if (!diff.empty()) diff += ", ";
      diff += key;
    }
  }
  return diff.empty() ? "contents differ" : "differing fields: " + diff;
}

std::vector<std::string> instance_texts(
    const std::vector<GenerationInstance>& instances) {
  std::vector<std::string> texts;
  texts.reserve(instances.size());
  for (const auto& inst : instances) texts.push_back(inst.generated);
  return texts;
}

/// Best-effort projection of gold records onto generated text: triggers are
/// located one by one, arguments nearest their trigger; anything unlocatable
/// is dropped rather than given bogus offsets.
std::vector<EventRecord> project_records(const std::vector<EventRecord>& records,
                                         const std::string& text) {
  OffsetDecoder decoder(text);
  std::vector<EventRecord> out;
  for (const EventRecord& r : records) {
    std::optional<Span> trigger = decoder.decode(r.trigger.text);
    if (!trigger) continue;
    EventRecord projected;
    projected.event_type = r.event_type;
    projected.trigger = *trigger;
    for (const auto& [role, span] : r.arguments) {
      std::optional<Span> arg = decoder.decode_near(span.text, *trigger);
      if (arg) projected.arguments.emplace_back(role, *arg);
    }
    out.push_back(std::move(projected));
  }
  return out;
}

PolicyInput instance_policy_input(const GenerationInstance& inst) {
  return build_policy_input(inst.input.event_description, inst.generated);
}

std::vector<GenerationInstance> instances_from_log(const RunConfig& config,
                                                   const Dataset& train,
                                                   const EpochLog& log) {
  std::vector<GenerationInstance> out;
  for (const AnnotatedSentence& sentence : train.sentences) {
    if (sentence.records.empty()) continue;
    auto it = log.generated.find(sentence.id);
    if (it == log.generated.end()) {
      throw Error("resume: episode for epoch " + std::to_string(log.epoch) +
                  " lacks generated text for sentence '" + sentence.id + "'");
    }
    GenerationInstance inst;
    inst.id = sentence.id;
    inst.records = sentence.records;
    inst.generated = it->second;
    inst.input.source_id = sentence.id;
    inst.input.target = sentence.context;
    inst.input.event_description =
        render_event_description(train.schema, sentence.records);
    auto cov = log.covered.find(sentence.id);
    inst.covered = cov != log.covered.end()
                       ? cov->second
                       : std::all_of(inst.records.begin(), inst.records.end(),
                                     [&](const EventRecord& r) {
                                       return record_covered(r, inst.generated);
                                     });
    auto w = log.weights.find(sentence.id);
    inst.weight = w == log.weights.end() ? 1.0 : w->second;
    out.push_back(std::move(inst));
  }
  (void)config;
  return out;
}

}  // namespace

RetrainResult retrain_loop(const RunConfig& config, const Dataset& train,
                           const Dataset& dev, Backends& backends,
                           bool resume) {
  validate_config(config);
  const auto started = std::chrono::steady_clock::now();
  const RunPaths paths = run_paths(config);
  fs::create_directories(paths.root);

  BackendStates states{*backends.generator, *backends.extractor,
                       *backends.policy};
  // Interruption knobs do not define the run: a run stopped early and a run
  // left to finish must still compare as the same configuration.
  RunConfig persisted = config;
  persisted.stop_after = 0;
  persisted.max_wall_seconds = 0;
  const std::string canonical = config_to_json(persisted);

  if (config.masked_lm.fine_tune) {
    std::vector<std::string> contexts;
    contexts.reserve(train.sentences.size());
    for (const auto& s : train.sentences) contexts.push_back(s.context);
    backends.masked_lm->fine_tune(contexts);
  }

  std::vector<std::string> original_texts;
  original_texts.reserve(train.sentences.size());
  for (const auto& s : train.sentences) original_texts.push_back(s.context);

  RetrainResult result;
  EpisodeState& state = result.state;
  std::vector<GenerationInstance> instances;
  int start_epoch = 1;

  if (resume) {
    if (!fs::exists(paths.config_path())) {
      throw Error("resume: no config.json under '" + paths.root + "'");
    }
    const std::string stored = read_text_file(paths.config_path());
    if (stored != canonical) {
      throw Error("resume: config does not match run '" + config.run_id +
                  "' (" + config_diff_summary(stored, canonical) + ")");
    }
    int last = -1;
    for (int e = 0; e <= config.epochs; ++e) {
      if (fs::exists(paths.episode_path(e)) &&
          states.all_present(paths.backend_dir(e))) {
        last = e;
      }
    }
    if (last < 0) {
      throw Error("resume: run '" + config.run_id +
                  "' has no complete epoch to resume from");
    }
    for (int e = 0; e <= last; ++e) {
      result.logs.push_back(epoch_log_from_json(
          read_text_file(paths.episode_path(e)), paths.episode_path(e)));
    }
    states.load_all(paths.backend_dir(last));
    for (const EpochLog& log : result.logs) {
      state.f1_history.emplace_back(log.f1_trigger, log.f1_argument);
    }
    const EpochLog& last_log = result.logs.back();
    state.epoch = last;
    state.best_f1_trigger = last_log.best_f1_trigger;
    state.best_f1_argument = last_log.best_f1_argument;
    state.prev_negatives =
        IdSet(last_log.removed_ids.begin(), last_log.removed_ids.end());
    instances = instances_from_log(config, train, last_log);
    start_epoch = last + 1;
    result.last_epoch = last;
  } else {
    if (fs::exists(paths.config_path())) {
      throw Error("run '" + config.run_id + "' already exists under '" +
                  paths.root + "'; resume it or pick a fresh run id");
    }
    write_text_file(paths.config_path(), canonical);

    // Epoch 0: initial dev evaluation and initial generation set.
    const ScoreReport initial = evaluate_extractor(config, dev, *backends.extractor);
    state.f1_history.emplace_back(initial.triggers.f1, initial.arguments.f1);
    state.best_f1_trigger = initial.triggers.f1;
    state.best_f1_argument = initial.arguments.f1;
    instances = build_instances(config, train, *backends.generator, "mask", 0);

    EpochLog log0;
    log0.epoch = 0;
    log0.f1_trigger = initial.triggers.f1;
    log0.f1_argument = initial.arguments.f1;
    log0.trig_p = initial.triggers.precision;
    log0.trig_r = initial.triggers.recall;
    log0.arg_p = initial.arguments.precision;
    log0.arg_r = initial.arguments.recall;
    log0.best_f1_trigger = state.best_f1_trigger;
    log0.best_f1_argument = state.best_f1_argument;
    log0.pll = corpus_pll(*backends.masked_lm, instance_texts(instances));
    log0.distinct2 =
        novel_distinct_ngrams(instance_texts(instances), original_texts, 2).ratio;
    log0.distinct3 =
        novel_distinct_ngrams(instance_texts(instances), original_texts, 3).ratio;
    for (const auto& inst : instances) {
      log0.generated[inst.id] = inst.generated;
      log0.covered[inst.id] = inst.covered;
      log0.weights[inst.id] = inst.weight;
    }
    fs::create_directories(paths.epoch_dir(0));
    write_text_file(paths.episode_path(0), epoch_log_to_json(log0));
    states.save_all(paths.backend_dir(0));
    result.logs.push_back(std::move(log0));
  }

  std::map<std::string, const AnnotatedSentence*> sentences_by_id;
  for (const auto& s : train.sentences) sentences_by_id[s.id] = &s;

  for (int epoch = start_epoch; epoch <= config.epochs; ++epoch) {
    // (1) Sample actions over the previous generation set.
    std::vector<std::pair<std::string, PolicyInput>> policy_inputs;
    std::vector<std::string> instance_ids;
    for (const auto& inst : instances) {
      policy_inputs.emplace_back(inst.id, instance_policy_input(inst));
      instance_ids.push_back(inst.id);
    }
    Rng action_rng = Rng::stream(config.seed, "action", epoch);
    const auto decisions = decide(*backends.policy, policy_inputs,
                                  DecisionMode::sampled, action_rng);

    // (2) Partition into positives and negatives.
    const Partition part = partition(decisions, instance_ids);
    state.positives = IdSet(part.positives.begin(), part.positives.end());
    state.negatives = IdSet(part.negatives.begin(), part.negatives.end());
    state.generated_ids = instance_ids;

    // (3) Episode diffs and their subsamples.
    auto [diff_prev, diff_curr] =
        episode_diff(state.prev_negatives, state.negatives);
    state.diff_prev = diff_prev;
    state.diff_curr = diff_curr;
    Rng diff_rng = Rng::stream(config.seed, "diff", epoch);
    auto [diff_prev_sample, diff_curr_sample] =
        subsample_diffs(diff_prev, diff_curr, config.diff_subsample, diff_rng);

    // (4) Original subset plus retained augmentation sentences.
    Rng subset_rng = Rng::stream(config.seed, "subset", epoch);
    const std::size_t subset_size = static_cast<std::size_t>(
        std::lround(config.original_sample_ratio *
                    static_cast<double>(train.sentences.size())));
    std::vector<std::size_t> indices(train.sentences.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    auto subset_indices =
        subset_rng.sample_without_replacement(std::move(indices), subset_size);
    std::sort(subset_indices.begin(), subset_indices.end());

    std::vector<AnnotatedSentence> train_batch;
    std::vector<std::string> tsub_ids;
    for (std::size_t idx : subset_indices) {
      train_batch.push_back(train.sentences[idx]);
      tsub_ids.push_back(train.sentences[idx].id);
    }
    std::map<std::string, const GenerationInstance*> by_id;
    for (const auto& inst : instances) by_id[inst.id] = &inst;
    for (const std::string& id : part.positives) {
      const GenerationInstance& inst = *by_id.at(id);
      AnnotatedSentence augmented;
      augmented.id = id + "#aug";
      augmented.context = inst.generated;
      augmented.records = project_records(inst.records, inst.generated);
      train_batch.push_back(std::move(augmented));
    }

    // (5) Retrain the extractor on the reconstructed set.
    backends.extractor->train(train_batch, config.schedules.extractor_retrain,
                              config.negative_prompt_ratio);

    // (6) Dev evaluation and reward.
    const ScoreReport report = evaluate_extractor(config, dev, *backends.extractor);
    const double prev_arg_f1 = state.f1_history.back().second;
    const RewardRecord reward_record = make_reward_record(
        epoch, report.arguments.f1, prev_arg_f1, config.alpha);
    const double epoch_reward = reward_record.value;
    state.f1_history.emplace_back(report.triggers.f1, report.arguments.f1);

    // (7) Checkpoint rule: bank states when either F1 improves.
    const CheckpointDecision ck = should_update_checkpoint(
        report.triggers.f1, report.arguments.f1, state.best_f1_trigger,
        state.best_f1_argument);
    state.best_f1_trigger = ck.best_trigger;
    state.best_f1_argument = ck.best_argument;
    if (ck.update) states.save_all(paths.best_dir());

    // (8) Reward-weighted policy retraining on the diff subsamples.
    auto rl_items = [&](const std::vector<std::string>& ids) {
      std::vector<std::pair<PolicyInput, int>> items;
      for (const std::string& id : ids) {
        // Samples in a negative partition were removed; that is the action
        // the agent took when they entered the set.
        items.emplace_back(instance_policy_input(*by_id.at(id)), 0);
      }
      return items;
    };
    const auto new_items = rl_items(diff_curr_sample);
    const auto old_items = rl_items(diff_prev_sample);
    for (int pass = 0; pass < config.schedules.policy_retrain; ++pass) {
      backends.policy->train_rl(new_items, old_items, epoch_reward);
    }

    // (9) Removal weights for every sample in the generator training set.
    for (auto& inst : instances) {
      const double p = backends.policy->score(instance_policy_input(inst));
      inst.weight = removal_weight(p);
    }

    // (10) Weighted generator retraining on freshly masked inputs.
    Rng mask_rng = Rng::stream(config.seed, "mask", epoch);
    for (auto& inst : instances) {
      inst.input = build_generation_input(
          train.schema, *sentences_by_id.at(inst.id), config.mask_rate,
          mask_rng, config.protect_event_tokens);
    }
    auto gen_batch = make_train_batch(instances, backends.generator->vocab(), true);
    for (int pass = 0; pass < config.schedules.generator_retrain; ++pass) {
      backends.generator->train(gen_batch, config.beta, config.gamma,
                                kGreedySupplier);
    }

    // (11) Regenerate and persist the episode.
    for (auto& inst : instances) {
      const GeneratedSample sample = backends.generator->generate(inst.input);
      inst.generated = sample.text;
      inst.covered = std::all_of(
          inst.records.begin(), inst.records.end(),
          [&](const EventRecord& r) { return record_covered(r, inst.generated); });
    }

    EpochLog log;
    log.epoch = epoch;
    log.retained_ids = part.positives;
    log.removed_ids = part.negatives;
    log.diff_new_ids = diff_curr_sample;
    log.diff_old_ids = diff_prev_sample;
    log.tsub_ids = tsub_ids;
    log.reward = epoch_reward;
    log.f1_trigger = report.triggers.f1;
    log.f1_argument = report.arguments.f1;
    log.trig_p = report.triggers.precision;
    log.trig_r = report.triggers.recall;
    log.arg_p = report.arguments.precision;
    log.arg_r = report.arguments.recall;
    log.best_f1_trigger = state.best_f1_trigger;
    log.best_f1_argument = state.best_f1_argument;
    log.checkpoint_updated = ck.update;
    log.pll = corpus_pll(*backends.masked_lm, instance_texts(instances));
    log.distinct2 =
        novel_distinct_ngrams(instance_texts(instances), original_texts, 2).ratio;
    log.distinct3 =
        novel_distinct_ngrams(instance_texts(instances), original_texts, 3).ratio;
    for (const auto& inst : instances) {
      log.weights[inst.id] = inst.weight;
      log.generated[inst.id] = inst.generated;
      log.covered[inst.id] = inst.covered;
    }

    fs::create_directories(paths.epoch_dir(epoch));
    write_text_file(paths.episode_path(epoch), epoch_log_to_json(log));
    states.save_all(paths.backend_dir(epoch));
    result.logs.push_back(std::move(log));
    write_text_file(paths.report_path(), render_report_csv(result.logs));

    state.prev_negatives = state.negatives;
    state.epoch = epoch;
    result.last_epoch = epoch;

    if (config.stop_after > 0 && epoch >= config.stop_after) break;
    if (config.max_wall_seconds > 0) {
      const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::steady_clock::now() - started)
                               .count();
      if (elapsed >= config.max_wall_seconds) break;
    }
  }

  result.finished = result.last_epoch >= config.epochs;
  if (result.logs.size() > 1) {
    write_text_file(paths.report_path(), render_report_csv(result.logs));
  }
  return result;
}

}  // namespace evaug
