#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evaug/backends.hpp"
#include "evaug/policy.hpp"
#include "evaug/scoring.hpp"

namespace evaug {

struct ScheduleConfig {
  int generator_pretrain_max = 20;
  int policy_pretrain_max = 20;
  int extractor_pretrain = 15;
  int extractor_retrain = 2;
  int policy_retrain = 1;
  int generator_retrain = 1;

  bool operator==(const ScheduleConfig&) const = default;
};

struct GeneratorConfig {
  std::string kind = "mock";  // "mock", "table", or "process"
  double step = 0.35;
  std::vector<std::string> command;  // plugin argv for kind == "process"

  bool operator==(const GeneratorConfig&) const = default;
};

struct ExtractorConfig {
  std::string kind = "mock";
  double q0 = 0.30;
  double delta = 0.05;
  std::vector<std::string> command;

  bool operator==(const ExtractorConfig&) const = default;
};

struct PolicyConfig {
  std::string kind = "mock";
  double hi = 0.90;
  double lo = 0.10;
  double eta = 0.10;
  double eta_rl = 0.05;
  std::vector<std::string> command;

  bool operator==(const PolicyConfig&) const = default;
};

struct MaskedLMConfig {
  std::string kind = "unigram";  // "unigram", "uniform", "oracle", "process"
  std::size_t vocab_size = 50;   // uniform mode
  bool fine_tune = true;
  std::vector<std::string> command;

  bool operator==(const MaskedLMConfig&) const = default;
};

struct PathsConfig {
  std::string train;
  std::string dev;
  std::string schema;
  std::string pretrained = "runs/pretrained";

  bool operator==(const PathsConfig&) const = default;
};

struct RunConfig {
  std::string run_id = "run";
  std::string runs_root = "runs";
  std::uint64_t seed = 42;

  double alpha = 10.0;      // reward scale
  double beta = 0.9;        // language-model loss weight
  double gamma = 0.1;       // argument-aware loss weight
  double mask_rate = 0.3;
  int epochs = 80;          // retraining episodes
  std::size_t diff_subsample = 32;
  double original_sample_ratio = 0.5;
  double negative_prompt_ratio = 0.12;
  double coverage_stop = 0.70;
  double precision_band_low = 0.80;
  double precision_band_high = 0.90;
  bool protect_event_tokens = false;
  /// Halt the retraining loop after this many episodes (0 = run them all);
  /// the run stays resumable. Exists for interruption tests and ops.
  int stop_after = 0;
  /// Wall-clock guard: stop (resumably) at the first epoch boundary past this
  /// many seconds. 0 disables the guard.
  int max_wall_seconds = 0;

  ScheduleConfig schedules;
  PathsConfig paths;
  GeneratorConfig generator;
  ExtractorConfig extractor;
  PolicyConfig policy;
  MaskedLMConfig masked_lm;

  bool operator==(const RunConfig&) const = default;
};

RunConfig default_config();
RunConfig config_from_json(const std::string& text,
                           const std::string& origin = "<config>");
/// Canonical (sorted keys, 2-space indent) serialization; two configs are
/// interchangeable for resume iff their canonical dumps match.
std::string config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& config);

/// Human-oriented listing of the default configuration with a note per value.
std::string describe_defaults();

struct Backends {
  std::unique_ptr<GeneratorBackend> generator;
  std::unique_ptr<ExtractorBackend> extractor;
  std::unique_ptr<PolicyBackend> policy;
  std::unique_ptr<MaskedLMBackend> masked_lm;
};

/// Instantiates the configured backends. Mock extractors receive their gold
/// oracle from the supplied datasets.
Backends make_backends(const RunConfig& config, const Dataset& train,
                       const Dataset& dev);

/// One structured-record-to-text unit flowing through the loop, keyed by its
/// source sentence id.
struct GenerationInstance {
  std::string id;
  GenerationInput input;
  std::vector<EventRecord> records;
  std::string generated;
  bool covered = false;
  double weight = 1.0;
};

/// Builds generation inputs (mask stream (seed, stream, tag)) and runs the
/// generator over every record-bearing sentence, dataset order.
std::vector<GenerationInstance> build_instances(const RunConfig& config,
                                                const Dataset& train,
                                                GeneratorBackend& generator,
                                                const std::string& mask_stream,
                                                std::uint64_t tag);

/// Greedy-decoded dev-set evaluation: one prompt per (sentence, event type),
/// predictions decoded back to records by template parsing and offset
/// matching, scored with pooled counts.
ScoreReport evaluate_extractor(const RunConfig& config, const Dataset& dev,
                               ExtractorBackend& extractor);

struct GeneratorPretrainResult {
  int epochs_run = 0;
  bool reached_threshold = false;
  std::vector<double> coverage_trace;  // one entry per epoch
};

/// Epoch-by-epoch training on the batch loss; after each epoch the training
/// set is regenerated and coverage measured. Stops at the first epoch whose
/// coverage strictly exceeds the configured threshold; throws (naming the
/// final coverage) when the epoch cap is hit first.
GeneratorPretrainResult pretrain_generator(const RunConfig& config,
                                           const Dataset& train,
                                           GeneratorBackend& generator);

struct PolicyPretrainResult {
  int epochs_run = 0;
  int stopped_epoch = 0;
  bool entered_band = false;
  double band_deviation = 0.0;  // 0 when stopped inside the band
  std::vector<double> precision_trace;
};

/// Cross-entropy pretraining with held-out precision early stopping: training
/// halts the first time retain-class precision lands inside the configured
/// band. If the band is never entered before the cap, the state from the
/// epoch closest to the band is restored and the deviation recorded. Every
/// fourth batch item is held out for the precision estimate.
PolicyPretrainResult pretrain_policy(const RunConfig& config,
                                     const PolicyBatch& batch,
                                     PolicyBackend& policy);

/// Fixed-epoch extractor pretraining at the configured negative-prompt ratio.
std::vector<double> pretrain_extractor(const RunConfig& config,
                                       const Dataset& train,
                                       ExtractorBackend& extractor);

/// Per-epoch episode record; the source of truth every report row is rebuilt
/// from.
struct EpochLog {
  int epoch = 0;
  std::vector<std::string> retained_ids;
  std::vector<std::string> removed_ids;
  std::vector<std::string> diff_new_ids;
  std::vector<std::string> diff_old_ids;
  std::vector<std::string> tsub_ids;
  double reward = 0.0;
  double f1_trigger = 0.0;
  double f1_argument = 0.0;
  double trig_p = 0.0, trig_r = 0.0;
  double arg_p = 0.0, arg_r = 0.0;
  double best_f1_trigger = 0.0;
  double best_f1_argument = 0.0;
  bool checkpoint_updated = false;
  double pll = 0.0;
  double distinct2 = 0.0;
  double distinct3 = 0.0;
  std::map<std::string, double> weights;        // id -> removal weight
  std::map<std::string, std::string> generated;  // id -> generated text
  std::map<std::string, bool> covered;
};

std::string epoch_log_to_json(const EpochLog& log);
EpochLog epoch_log_from_json(const std::string& text,
                             const std::string& origin = "<episode>");

/// Checkpoint directory layout:
///   <root>/<run-id>/config.json
///   <root>/<run-id>/epoch-<i>/episode.json
///   <root>/<run-id>/epoch-<i>/backends/<name>.state
///   <root>/<run-id>/best/<name>.state
///   <root>/<run-id>/report.csv
struct RunPaths {
  std::string root;

  std::string config_path() const { return root + "/config.json"; }
  std::string epoch_dir(int epoch) const {
    return root + "/epoch-" + std::to_string(epoch);
  }
  std::string episode_path(int epoch) const {
    return epoch_dir(epoch) + "/episode.json";
  }
  std::string backend_dir(int epoch) const {
    return epoch_dir(epoch) + "/backends";
  }
  std::string backend_state_path(int epoch, const std::string& name) const {
    return backend_dir(epoch) + "/" + name + ".state";
  }
  std::string best_dir() const { return root + "/best"; }
  std::string report_path() const { return root + "/report.csv"; }
  std::string plots_dir() const { return root + "/plots"; }
};

/// Resolves runs_root/run_id, honoring the EVAUG_RUNS_ROOT override.
RunPaths run_paths(const RunConfig& config);

inline constexpr const char* kRunsRootEnvVar = "EVAUG_RUNS_ROOT";

struct RetrainResult {
  int last_epoch = 0;       // last completed episode
  bool finished = false;    // ran through config.epochs
  EpisodeState state;
  std::vector<EpochLog> logs;  // epoch 0 .. last_epoch
};

/// The full retraining loop. Fresh runs write epoch 0 (initial evaluation and
/// initial generation) and then run episodes 1..epochs, each in order: action
/// sampling over the previous generation set, partition, episode diffs and
/// subsampling, original-subset mixing, extractor retraining, dev evaluation
/// and reward, checkpoint rule, reward-weighted policy retraining, removal
/// weights, weighted generator retraining, regeneration, persistence. Resume
/// picks up after the last fully persisted epoch and reproduces the remaining
/// epochs byte-identically.
RetrainResult retrain_loop(const RunConfig& config, const Dataset& train,
                           const Dataset& dev, Backends& backends,
                           bool resume);

}  // namespace evaug
