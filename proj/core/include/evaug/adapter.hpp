#pragma once

#include <memory>
#include <string>
#include <vector>

#include "evaug/backends.hpp"

namespace evaug {

/// Out-of-process backend protocol: newline-delimited JSON over the plugin's
/// stdin/stdout. One request per line:
///
///   {"op": "generate"|"extract"|"score"|"train"|"token_prob"|"vocab"
///          |"save"|"load", "payload": {...}}
///
/// and one response per line:
///
///   {"ok": true, "result": {...}}   or   {"ok": false, "error": "..."}
///
/// Payloads carry rendered strings in and generated text plus per-position
/// probability rows out; training batches travel as weighted text pairs (the
/// plugin applies its own matching internally). State save/load name opaque
/// files in the checkpoint directory. Protocol violations are surfaced with
/// the payload context attached.
class PluginProcess {
 public:
  /// Spawns argv[0] with the remaining arguments; pipes are closed and the
  /// child reaped on destruction.
  explicit PluginProcess(std::vector<std::string> argv);
  ~PluginProcess();

  PluginProcess(const PluginProcess&) = delete;
  PluginProcess& operator=(const PluginProcess&) = delete;

  /// Sends one request line and returns the response line.
  std::string round_trip(const std::string& request_line);

  const std::string& command() const { return command_; }

 private:
  std::string command_;
  int to_child_ = -1;
  int from_child_ = -1;
  long pid_ = -1;
  std::string buffer_;
};

class ProcessGenerator : public GeneratorBackend {
 public:
  explicit ProcessGenerator(std::shared_ptr<PluginProcess> process);

  GeneratedSample generate(const GenerationInput& input) override;
  /// Remote backends train on the serialized batch and report their loss;
  /// the assignment supplier stays in-process and is not forwarded.
  GenLossReport train(const std::vector<GenTrainSample>& batch, double beta,
                      double gamma, const AssignmentSupplier& assign) override;
  std::vector<std::string> vocab() const override;
  void save(const std::string& path) const override;
  void load(const std::string& path) override;
  std::string name() const override { return "generator"; }

 private:
  std::shared_ptr<PluginProcess> process_;
};

class ProcessExtractor : public ExtractorBackend {
 public:
  explicit ProcessExtractor(std::shared_ptr<PluginProcess> process);

  std::string extract(const ExtractionInput& input) override;
  std::vector<double> train(const std::vector<AnnotatedSentence>& sentences,
                            int epochs, double negative_prompt_ratio) override;
  void save(const std::string& path) const override;
  void load(const std::string& path) override;
  std::string name() const override { return "extractor"; }

 private:
  std::shared_ptr<PluginProcess> process_;
};

class ProcessPolicy : public PolicyBackend {
 public:
  explicit ProcessPolicy(std::shared_ptr<PluginProcess> process);

  double score(const PolicyInput& input) override;
  double train(const PolicyBatch& batch) override;
  double train_rl(const std::vector<std::pair<PolicyInput, int>>& diff_new,
                  const std::vector<std::pair<PolicyInput, int>>& diff_old,
                  double reward) override;
  void save(const std::string& path) const override;
  void load(const std::string& path) override;
  std::string name() const override { return "policy"; }

 private:
  std::shared_ptr<PluginProcess> process_;
};

class ProcessMaskedLM : public MaskedLMBackend {
 public:
  explicit ProcessMaskedLM(std::shared_ptr<PluginProcess> process);

  double token_prob(const std::vector<std::string>& tokens,
                    std::size_t masked_position) override;
  void fine_tune(const std::vector<std::string>& corpus) override;
  std::string name() const override { return "masked-lm"; }

 private:
  std::shared_ptr<PluginProcess> process_;
};

/// Interface conformance checks, run against any backend (mock, in-process,
/// or plugin). Each returned string names the probe index and the violated
/// invariant; an empty list means the backend conforms.
std::vector<std::string> conformance_generator(
    GeneratorBackend& backend, const std::vector<GenerationInput>& probes);
std::vector<std::string> conformance_extractor(
    ExtractorBackend& backend, const std::vector<ExtractionInput>& probes);
std::vector<std::string> conformance_policy(
    PolicyBackend& backend, const std::vector<PolicyInput>& probes);
std::vector<std::string> conformance_masked_lm(
    MaskedLMBackend& backend,
    const std::vector<std::vector<std::string>>& probes);

}  // namespace evaug
