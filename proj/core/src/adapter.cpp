#include "evaug/adapter.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "evaug/error.hpp"
#include "evaug/text.hpp"

namespace evaug {

using nlohmann::json;

// ---------------------------------------------------------------------------
// PluginProcess

PluginProcess::PluginProcess(std::vector<std::string> argv) {
  if (argv.empty()) throw Error("PluginProcess: empty command");
  command_ = join(argv, " ");

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw Error("PluginProcess: pipe failed: " + std::string(strerror(errno)));
  }

  pid_t pid = fork();
  if (pid < 0) {
    throw Error("PluginProcess: fork failed: " + std::string(strerror(errno)));
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (auto& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }

  pid_ = pid;
  close(to_child[0]);
  close(from_child[1]);
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

PluginProcess::~PluginProcess() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(static_cast<pid_t>(pid_), &status, 0);
  }
}

std::string PluginProcess::round_trip(const std::string& request_line) {
  std::string payload = request_line;
  payload.push_back('\n');
  std::size_t written = 0;
  while (written < payload.size()) {
    ssize_t n = write(to_child_, payload.data() + written,
                      payload.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("plugin '" + command_ +
                  "' write failed: " + std::string(strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }

  for (;;) {
    std::size_t eol = buffer_.find('\n');
    if (eol != std::string::npos) {
      std::string line = buffer_.substr(0, eol);
      buffer_.erase(0, eol + 1);
      return line;
    }
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("plugin '" + command_ +
                  "' read failed: " + std::string(strerror(errno)));
    }
    if (n == 0) {
      throw Error("plugin '" + command_ + "' closed its output mid-request");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

namespace {

json call(PluginProcess& process, const std::string& op, json payload) {
  const json request{{"op", op}, {"payload", std::move(payload)}};
  const std::string reply_line = process.round_trip(request.dump());
  json reply;
  try {
    reply = json::parse(reply_line);
  } catch (const json::exception& e) {
    throw Error("plugin '" + process.command() +
                "' sent unparsable reply to op '" + op + "': " + e.what() +
                "; payload was " + request.dump());
  }
  if (!reply.value("ok", false)) {
    throw Error("plugin '" + process.command() + "' rejected op '" + op +
                "': " + reply.value("error", "<no error message>") +
                "; payload was " + request.dump());
  }
  if (!reply.contains("result")) {
    throw Error("plugin '" + process.command() + "' reply to op '" + op +
                "' lacks a result; payload was " + request.dump());
  }
  return reply.at("result");
}

json generation_input_to_json(const GenerationInput& input) {
  return json{{"rendered", input.rendered},
              {"target", input.target},
              {"source_id", input.source_id}};
}

}  // namespace

// ---------------------------------------------------------------------------
// ProcessGenerator

ProcessGenerator::ProcessGenerator(std::shared_ptr<PluginProcess> process)
    : process_(std::move(process)) {}

GeneratedSample ProcessGenerator::generate(const GenerationInput& input) {
  json result = call(*process_, "generate", generation_input_to_json(input));
  GeneratedSample out;
  try {
    out.text = result.at("text").get<std::string>();
    out.probs.vocab = result.at("vocab").get<std::vector<std::string>>();
    out.probs.rows = result.at("rows").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw Error("plugin '" + process_->command() +
                "' generate result malformed: " + e.what());
  }
  return out;
}

GenLossReport ProcessGenerator::train(const std::vector<GenTrainSample>& batch,
                                      double beta, double gamma,
                                      const AssignmentSupplier&) {
  json samples = json::array();
  for (const auto& s : batch) {
    json uncovered = json::array();
    for (const auto& e : s.uncovered) uncovered.push_back(e.words);
    json one = generation_input_to_json(s.input);
    one["weight"] = s.weight;
    one["uncovered"] = std::move(uncovered);
    samples.push_back(std::move(one));
  }
  json result = call(*process_, "train",
                     json{{"kind", "generator"},
                          {"beta", beta},
                          {"gamma", gamma},
                          {"samples", std::move(samples)}});
  GenLossReport report;
  report.beta = beta;
  report.gamma = gamma;
  report.batch_loss = result.value("loss", 0.0);
  if (result.contains("weighted_loss")) {
    report.weighted_loss = result.at("weighted_loss").get<double>();
  }
  return report;
}

std::vector<std::string> ProcessGenerator::vocab() const {
  json result = call(*process_, "vocab", json::object());
  return result.at("vocab").get<std::vector<std::string>>();
}

void ProcessGenerator::save(const std::string& path) const {
  call(*process_, "save", json{{"path", path}});
}

void ProcessGenerator::load(const std::string& path) {
  call(*process_, "load", json{{"path", path}});
}

// ---------------------------------------------------------------------------
// ProcessExtractor

ProcessExtractor::ProcessExtractor(std::shared_ptr<PluginProcess> process)
    : process_(std::move(process)) {}

std::string ProcessExtractor::extract(const ExtractionInput& input) {
  json result = call(*process_, "extract",
                     json{{"rendered", input.rendered},
                          {"event_type", input.event_type},
                          {"context", input.context},
                          {"prompt", input.prompt}});
  return result.at("answered").get<std::string>();
}

std::vector<double> ProcessExtractor::train(
    const std::vector<AnnotatedSentence>& sentences, int epochs,
    double negative_prompt_ratio) {
  json contexts = json::array();
  for (const auto& s : sentences) {
    contexts.push_back(json{{"id", s.id},
                            {"context", s.context},
                            {"records", s.records.size()}});
  }
  json result = call(*process_, "train",
                     json{{"kind", "extractor"},
                          {"epochs", epochs},
                          {"negative_prompt_ratio", negative_prompt_ratio},
                          {"sentences", std::move(contexts)}});
  return result.value("losses", std::vector<double>{});
}

void ProcessExtractor::save(const std::string& path) const {
  call(*process_, "save", json{{"path", path}});
}

void ProcessExtractor::load(const std::string& path) {
  call(*process_, "load", json{{"path", path}});
}

// ---------------------------------------------------------------------------
// ProcessPolicy

ProcessPolicy::ProcessPolicy(std::shared_ptr<PluginProcess> process)
    : process_(std::move(process)) {}

double ProcessPolicy::score(const PolicyInput& input) {
  json result = call(*process_, "score",
                     json{{"rendered", input.rendered},
                          {"event_description", input.event_description},
                          {"generated_text", input.generated_text}});
  return result.at("p").get<double>();
}

double ProcessPolicy::train(const PolicyBatch& batch) {
  json items = json::array();
  for (const auto& item : batch.items) {
    items.push_back(
        json{{"rendered", item.input.rendered}, {"label", item.label}});
  }
  json result = call(*process_, "train",
                     json{{"kind", "policy"}, {"items", std::move(items)}});
  return result.value("loss", 0.0);
}

double ProcessPolicy::train_rl(
    const std::vector<std::pair<PolicyInput, int>>& diff_new,
    const std::vector<std::pair<PolicyInput, int>>& diff_old, double reward) {
  auto pack = [](const std::vector<std::pair<PolicyInput, int>>& items) {
    json out = json::array();
    for (const auto& [input, label] : items) {
      out.push_back(json{{"rendered", input.rendered}, {"label", label}});
    }
    return out;
  };
  json result = call(*process_, "train",
                     json{{"kind", "policy_rl"},
                          {"reward", reward},
                          {"diff_new", pack(diff_new)},
                          {"diff_old", pack(diff_old)}});
  return result.value("loss", 0.0);
}

void ProcessPolicy::save(const std::string& path) const {
  call(*process_, "save", json{{"path", path}});
}

void ProcessPolicy::load(const std::string& path) {
  call(*process_, "load", json{{"path", path}});
}

// ---------------------------------------------------------------------------
// ProcessMaskedLM

ProcessMaskedLM::ProcessMaskedLM(std::shared_ptr<PluginProcess> process)
    : process_(std::move(process)) {}

double ProcessMaskedLM::token_prob(const std::vector<std::string>& tokens,
                                   std::size_t masked_position) {
  json result = call(*process_, "token_prob",
                     json{{"tokens", tokens}, {"position", masked_position}});
  return result.at("p").get<double>();
}

void ProcessMaskedLM::fine_tune(const std::vector<std::string>& corpus) {
  call(*process_, "train", json{{"kind", "masked_lm"}, {"corpus", corpus}});
}

// ---------------------------------------------------------------------------
// Conformance

namespace {

bool rows_equal(const TokenProbMatrix& a, const TokenProbMatrix& b) {
  return a.vocab == b.vocab && a.rows == b.rows;
}

}  // namespace

std::vector<std::string> conformance_generator(
    GeneratorBackend& backend, const std::vector<GenerationInput>& probes) {
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const std::string tag = "generate probe " + std::to_string(i);
    GeneratedSample first;
    try {
      first = backend.generate(probes[i]);
    } catch (const std::exception& e) {
      violations.push_back(tag + ": backend threw: " + e.what());
      continue;
    }
    const std::size_t tokens = split_whitespace(first.text).size();
    if (first.probs.rows.size() != tokens) {
      violations.push_back(
          tag + ": " + std::to_string(first.probs.rows.size()) +
          " probability rows for " + std::to_string(tokens) +
          " generated tokens");
    }
    for (std::size_t r = 0; r < first.probs.rows.size(); ++r) {
      const auto& row = first.probs.rows[r];
      if (row.size() != first.probs.vocab.size()) {
        violations.push_back(tag + ": row " + std::to_string(r) +
                             " width does not match vocab size");
        continue;
      }
      double sum = 0.0;
      bool negative = false;
      for (double p : row) {
        sum += p;
        negative = negative || p < 0.0;
      }
      if (negative) {
        violations.push_back(tag + ": row " + std::to_string(r) +
                             " has a negative entry");
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        violations.push_back(tag + ": row " + std::to_string(r) + " sums to " +
                             std::to_string(sum));
      }
    }
    try {
      GeneratedSample second = backend.generate(probes[i]);
      if (second.text != first.text || !rows_equal(second.probs, first.probs)) {
        violations.push_back(tag + ": repeated call is not deterministic");
      }
    } catch (const std::exception& e) {
      violations.push_back(tag + ": repeat call threw: " + e.what());
    }
  }
  return violations;
}

std::vector<std::string> conformance_extractor(
    ExtractorBackend& backend, const std::vector<ExtractionInput>& probes) {
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const std::string tag = "extract probe " + std::to_string(i);
    try {
      const std::string first = backend.extract(probes[i]);
      if (backend.extract(probes[i]) != first) {
        violations.push_back(tag + ": repeated call is not deterministic");
      }
    } catch (const std::exception& e) {
      violations.push_back(tag + ": backend threw: " + e.what());
    }
  }
  return violations;
}

std::vector<std::string> conformance_policy(
    PolicyBackend& backend, const std::vector<PolicyInput>& probes) {
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const std::string tag = "score probe " + std::to_string(i);
    try {
      const double p = backend.score(probes[i]);
      if (!(p >= 0.0 && p <= 1.0)) {
        violations.push_back(tag + ": score " + std::to_string(p) +
                             " outside [0,1]");
      }
      if (backend.score(probes[i]) != p) {
        violations.push_back(tag + ": repeated call is not deterministic");
      }
    } catch (const std::exception& e) {
      violations.push_back(tag + ": backend threw: " + e.what());
    }
  }
  return violations;
}

std::vector<std::string> conformance_masked_lm(
    MaskedLMBackend& backend,
    const std::vector<std::vector<std::string>>& probes) {
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const std::string tag = "token_prob probe " + std::to_string(i);
    if (probes[i].empty()) continue;
    try {
      for (std::size_t pos = 0; pos < probes[i].size(); ++pos) {
        const double p = backend.token_prob(probes[i], pos);
        if (!(p >= 0.0 && p <= 1.0)) {
          violations.push_back(tag + ": probability " + std::to_string(p) +
                               " outside [0,1] at position " +
                               std::to_string(pos));
        }
      }
    } catch (const std::exception& e) {
      violations.push_back(tag + ": backend threw: " + e.what());
    }
  }
  return violations;
}

}  // namespace evaug
