#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "evaug/backends.hpp"
#include "evaug/dataset_io.hpp"
#include "evaug/error.hpp"
#include "evaug/rng.hpp"

namespace evaug::testing {

inline std::string project_dir() { return EVAUG_PROJECT_DIR; }

inline EventSchema toy_schema() {
  return load_schema(project_dir() + "/data/toy_schema.json");
}

inline Dataset toy_train() {
  return load_dataset(project_dir() + "/data/toy_train.jsonl", toy_schema());
}

inline Dataset toy_dev() {
  return load_dataset(project_dir() + "/data/toy_dev.jsonl", toy_schema());
}

inline Dataset fig1_dataset() {
  return load_dataset(project_dir() + "/tests/data/fig1.jsonl", toy_schema());
}

inline AnnotatedSentence fig1_sentence() {
  Dataset d = fig1_dataset();
  return d.sentences.at(0);
}

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label) {
    static std::uint64_t counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("evaug-test-" + label + "-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter++)))
                .string();
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Generator whose post-training coverage follows a fixed script: sentence
/// s emits its trigger token iff its index falls inside the scripted fraction
/// for the current train-call count. Sentences must be "s<k>" with a one-word
/// trigger and no arguments, so corpus coverage equals the script exactly.
class ScriptedCoverageGenerator : public GeneratorBackend {
 public:
  ScriptedCoverageGenerator(std::vector<double> schedule, std::size_t corpus_size)
      : schedule_(std::move(schedule)), corpus_size_(corpus_size) {}

  GeneratedSample generate(const GenerationInput& input) override {
    const std::size_t index = std::stoul(input.source_id.substr(1));
    const double frac =
        schedule_.at(std::min(train_calls_, schedule_.size() - 1));
    const std::size_t covered_count = static_cast<std::size_t>(
        std::lround(frac * static_cast<double>(corpus_size_)));
    // The trigger is the first token of the target by construction.
    const std::string trigger =
        split_whitespace(input.target).at(0);
    GeneratedSample out;
    out.text = index < covered_count ? trigger : "zzz";
    out.probs.vocab = {trigger, "zzz"};
    out.probs.rows = {{index < covered_count ? 1.0 : 0.0,
                       index < covered_count ? 0.0 : 1.0}};
    return out;
  }

  GenLossReport train(const std::vector<GenTrainSample>& batch, double beta,
                      double gamma, const AssignmentSupplier&) override {
    ++train_calls_;
    GenLossReport report;
    report.beta = beta;
    report.gamma = gamma;
    report.samples.assign(batch.size(), SampleLoss{});
    return report;
  }

  std::vector<std::string> vocab() const override { return {"zzz"}; }
  void save(const std::string& path) const override {
    write_text_file(path, std::to_string(train_calls_));
  }
  void load(const std::string& path) override {
    train_calls_ = std::stoul(read_text_file(path));
  }
  std::string name() const override { return "generator"; }

  std::size_t train_calls() const { return train_calls_; }

 private:
  std::vector<double> schedule_;
  std::size_t corpus_size_ = 0;
  std::size_t train_calls_ = 0;
};

/// Policy whose retain decisions follow a per-epoch plan keyed by the item
/// index embedded in the generated text ("item-<k> ..."). Training only
/// advances the epoch counter, so held-out precision per epoch is fully
/// scripted by the test.
class ScriptedPrecisionPolicy : public PolicyBackend {
 public:
  explicit ScriptedPrecisionPolicy(std::vector<std::set<int>> retain_plan)
      : plan_(std::move(retain_plan)) {}

  double score(const PolicyInput& input) override {
    const std::string& text = input.generated_text;
    const std::size_t at = text.find("item-");
    if (at == std::string::npos) return 0.0;
    const int k = std::stoi(text.substr(at + 5));
    const std::set<int>& retain =
        plan_.at(std::min(epoch_, plan_.size() - 1));
    return retain.count(k) ? 0.9 : 0.1;
  }

  double train(const PolicyBatch&) override {
    ++epoch_;
    return 0.0;
  }
  double train_rl(const std::vector<std::pair<PolicyInput, int>>&,
                  const std::vector<std::pair<PolicyInput, int>>&,
                  double) override {
    return 0.0;
  }
  void save(const std::string& path) const override {
    write_text_file(path, std::to_string(epoch_));
  }
  void load(const std::string& path) override {
    epoch_ = std::stoul(read_text_file(path));
  }
  std::string name() const override { return "policy"; }

  std::size_t epoch() const { return epoch_; }

 private:
  std::vector<std::set<int>> plan_;
  std::size_t epoch_ = 0;  // advanced per train call; 0-based plan index
};

/// Wrappers that append "<backend>.<op>" to a shared trace, then delegate.
struct CallTrace {
  std::vector<std::string> ops;
};

class RecordingGenerator : public GeneratorBackend {
 public:
  RecordingGenerator(GeneratorBackend& inner, CallTrace& trace)
      : inner_(inner), trace_(trace) {}
  void prepare(const std::vector<std::string>& t) override { inner_.prepare(t); }
  GeneratedSample generate(const GenerationInput& input) override {
    trace_.ops.push_back("generator.generate");
    return inner_.generate(input);
  }
  GenLossReport train(const std::vector<GenTrainSample>& batch, double beta,
                      double gamma, const AssignmentSupplier& assign) override {
    trace_.ops.push_back("generator.train");
    return inner_.train(batch, beta, gamma, assign);
  }
  std::vector<std::string> vocab() const override { return inner_.vocab(); }
  void save(const std::string& path) const override { inner_.save(path); }
  void load(const std::string& path) override { inner_.load(path); }
  std::string name() const override { return inner_.name(); }

 private:
  GeneratorBackend& inner_;
  CallTrace& trace_;
};

class RecordingExtractor : public ExtractorBackend {
 public:
  RecordingExtractor(ExtractorBackend& inner, CallTrace& trace)
      : inner_(inner), trace_(trace) {}
  std::string extract(const ExtractionInput& input) override {
    trace_.ops.push_back("extractor.extract");
    return inner_.extract(input);
  }
  std::vector<double> train(const std::vector<AnnotatedSentence>& sentences,
                            int epochs, double ratio) override {
    trace_.ops.push_back("extractor.train");
    return inner_.train(sentences, epochs, ratio);
  }
  void save(const std::string& path) const override { inner_.save(path); }
  void load(const std::string& path) override { inner_.load(path); }
  std::string name() const override { return inner_.name(); }

 private:
  ExtractorBackend& inner_;
  CallTrace& trace_;
};

class RecordingPolicy : public PolicyBackend {
 public:
  RecordingPolicy(PolicyBackend& inner, CallTrace& trace)
      : inner_(inner), trace_(trace) {}
  double score(const PolicyInput& input) override {
    trace_.ops.push_back("policy.score");
    return inner_.score(input);
  }
  double train(const PolicyBatch& batch) override {
    trace_.ops.push_back("policy.train");
    return inner_.train(batch);
  }
  double train_rl(const std::vector<std::pair<PolicyInput, int>>& a,
                  const std::vector<std::pair<PolicyInput, int>>& b,
                  double reward) override {
    trace_.ops.push_back("policy.train_rl");
    return inner_.train_rl(a, b, reward);
  }
  void save(const std::string& path) const override { inner_.save(path); }
  void load(const std::string& path) override { inner_.load(path); }
  std::string name() const override { return inner_.name(); }

 private:
  PolicyBackend& inner_;
  CallTrace& trace_;
};

}  // namespace evaug::testing
