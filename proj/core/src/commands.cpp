#include "evaug/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "evaug/dataset_io.hpp"
#include "evaug/error.hpp"
#include "evaug/metrics.hpp"
#include "evaug/mocks.hpp"
#include "evaug/orchestrator.hpp"
#include "evaug/report.hpp"
#include "evaug/scoring.hpp"

namespace evaug {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct LoadedRun {
  RunConfig config;
  Dataset train;
  Dataset dev;
};

LoadedRun load_run_inputs(const std::string& config_path) {
  LoadedRun out;
  out.config = load_config(config_path);
  for (const auto& [label, path] :
       {std::pair<const char*, const std::string&>{"schema", out.config.paths.schema},
        {"train dataset", out.config.paths.train},
        {"dev dataset", out.config.paths.dev}}) {
    if (path.empty() || !fs::exists(path)) {
      throw Error(std::string(label) + " path missing or not found: '" + path +
                  "'");
    }
  }
  const EventSchema schema = load_schema(out.config.paths.schema);
  out.train = load_dataset(out.config.paths.train, schema);
  out.dev = load_dataset(out.config.paths.dev, schema);
  return out;
}

std::string pretrained_state_path(const RunConfig& config,
                                  const std::string& name) {
  return config.paths.pretrained + "/" + name + ".state";
}

void require_pretrained(const RunConfig& config, const std::string& name) {
  const std::string path = pretrained_state_path(config, name);
  if (!fs::exists(path)) {
    throw Error("missing pretrained " + name + " state: '" + path +
                "' (run: pretrain --phase " + name + ")");
  }
}

int run_guarded(const char* what, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << what << " failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_pretrain(const PretrainOptions& options) {
  return run_guarded("pretrain", [&]() -> int {
    LoadedRun run = load_run_inputs(options.config_path);
    Backends backends = make_backends(run.config, run.train, run.dev);
    fs::create_directories(run.config.paths.pretrained);

    if (options.phase == "generator") {
      const GeneratorPretrainResult result =
          pretrain_generator(run.config, run.train, *backends.generator);
      backends.generator->save(pretrained_state_path(run.config, "generator"));
      json trace{{"epochs_run", result.epochs_run},
                 {"reached_threshold", result.reached_threshold},
                 {"coverage_trace", result.coverage_trace}};
      write_text_file(run.config.paths.pretrained + "/generator.coverage.json",
                      trace.dump(2) + "\n");
      std::cout << "generator pretrained in " << result.epochs_run
                << " epochs; final coverage "
                << (result.coverage_trace.empty() ? 0.0
                                                  : result.coverage_trace.back())
                << "\n";
      return 0;
    }
    if (options.phase == "policy") {
      require_pretrained(run.config, "generator");
      backends.generator->load(pretrained_state_path(run.config, "generator"));
      auto instances = build_instances(run.config, run.train,
                                       *backends.generator, "pretrain-mask", 0);
      std::vector<PretrainSeed> seeds;
      for (const auto& inst : instances) {
        seeds.push_back({inst.id, inst.input.event_description, inst.generated,
                         inst.covered});
      }
      Rng rng = Rng::stream(run.config.seed, "pretrain-negatives", 0);
      const PolicyBatch batch =
          build_pretrain_set(seeds, run.train, rng, /*balance=*/true);
      const PolicyPretrainResult result =
          pretrain_policy(run.config, batch, *backends.policy);
      backends.policy->save(pretrained_state_path(run.config, "policy"));
      json trace{{"epochs_run", result.epochs_run},
                 {"stopped_epoch", result.stopped_epoch},
                 {"entered_band", result.entered_band},
                 {"band_deviation", result.band_deviation},
                 {"precision_trace", result.precision_trace}};
      write_text_file(run.config.paths.pretrained + "/policy.precision.json",
                      trace.dump(2) + "\n");
      std::cout << "policy pretrained; stopped at epoch " << result.stopped_epoch
                << (result.entered_band ? " inside the precision band"
                                        : " nearest the precision band")
                << "\n";
      return 0;
    }
    if (options.phase == "extractor") {
      pretrain_extractor(run.config, run.train, *backends.extractor);
      backends.extractor->save(pretrained_state_path(run.config, "extractor"));
      std::cout << "extractor pretrained for "
                << run.config.schedules.extractor_pretrain << " epochs\n";
      return 0;
    }
    throw Error("unknown pretrain phase '" + options.phase +
                "' (expected generator, policy, or extractor)");
  });
}

int cmd_retrain(const RetrainOptions& options) {
  return run_guarded("retrain", [&]() -> int {
    LoadedRun run = load_run_inputs(options.config_path);
    if (options.resume && !options.resume_run_id.empty()) {
      run.config.run_id = options.resume_run_id;
    }
    if (options.stop_after > 0) run.config.stop_after = options.stop_after;

    Backends backends = make_backends(run.config, run.train, run.dev);
    if (!options.resume) {
      for (const char* name : {"generator", "extractor", "policy"}) {
        require_pretrained(run.config, name);
      }
      backends.generator->load(pretrained_state_path(run.config, "generator"));
      backends.extractor->load(pretrained_state_path(run.config, "extractor"));
      backends.policy->load(pretrained_state_path(run.config, "policy"));
    }

    const RetrainResult result = retrain_loop(run.config, run.train, run.dev,
                                              backends, options.resume);
    const RunPaths paths = run_paths(run.config);
    std::cout << "run '" << run.config.run_id << "' at epoch "
              << result.last_epoch << "/" << run.config.epochs
              << (result.finished ? " (complete)" : " (stopped, resumable)")
              << "\n";
    std::cout << "report: " << paths.report_path() << "\n";
    std::cout << "best trigger F1 " << result.state.best_f1_trigger
              << ", best argument F1 " << result.state.best_f1_argument << "\n";
    return 0;
  });
}

int cmd_metrics(const MetricsOptions& options) {
  return run_guarded("metrics", [&]() -> int {
    if (options.which != "pll" && options.which != "diversity") {
      throw Error("unknown metric '" + options.which +
                  "' (expected pll or diversity)");
    }
    const auto generated = load_text_lines(options.generated_path);
    json report;

    if (options.which == "diversity") {
      if (options.original_path.empty()) {
        throw Error("diversity needs --original");
      }
      const auto original = load_text_lines(options.original_path);
      const DiversityReport d2 = novel_distinct_ngrams(generated, original, 2);
      const DiversityReport d3 = novel_distinct_ngrams(generated, original, 3);
      for (const DiversityReport& d : {d2, d3}) {
        std::printf("distinct-%d: novel=%zu total=%zu ratio=%.6f\n", d.n,
                    d.novel_distinct, d.total_distinct, d.ratio);
        report["distinct_" + std::to_string(d.n)] =
            json{{"novel", d.novel_distinct},
                 {"total", d.total_distinct},
                 {"ratio", d.ratio}};
      }
    } else {
      MaskedLMConfig lm_config;
      if (!options.config_path.empty()) {
        lm_config = load_config(options.config_path).masked_lm;
      }
      std::unique_ptr<MaskedLMBackend> backend;
      if (lm_config.kind == "uniform") {
        backend = MockMaskedLM::uniform(lm_config.vocab_size);
      } else if (lm_config.kind == "oracle") {
        backend = MockMaskedLM::oracle();
      } else {
        backend = MockMaskedLM::unigram();
        if (lm_config.fine_tune) {
          backend->fine_tune(options.original_path.empty()
                                 ? generated
                                 : load_text_lines(options.original_path));
        }
      }
      const double pll = corpus_pll(*backend, generated);
      std::printf("pll: %.6f over %zu sentences\n", pll, generated.size());
      report["pll"] = pll;
      report["sentences"] = generated.size();
    }

    if (!options.out_path.empty()) {
      write_text_file(options.out_path, report.dump(2) + "\n");
      std::printf("report written to %s\n", options.out_path.c_str());
    }
    return 0;
  });
}

int cmd_evaluate(const EvaluateOptions& options) {
  return run_guarded("evaluate", [&]() -> int {
    const auto pred = load_sentences_jsonl(options.pred_path);
    const auto gold = load_sentences_jsonl(options.gold_path);

    std::map<std::string, const AnnotatedSentence*> pred_by_id;
    for (const auto& s : pred) pred_by_id[s.id] = &s;
    std::set<std::string> seen;

    std::vector<SentencePair> pairs;
    for (const auto& g : gold) {
      SentencePair pair;
      pair.gold = g.records;
      auto it = pred_by_id.find(g.id);
      if (it != pred_by_id.end()) {
        pair.predicted = it->second->records;
        seen.insert(g.id);
      }
      pairs.push_back(std::move(pair));
    }
    for (const auto& p : pred) {
      if (seen.count(p.id)) continue;
      SentencePair pair;
      pair.predicted = p.records;  // predictions with no gold sentence
      pairs.push_back(std::move(pair));
    }

    const ScoreReport report = evaluate_sentences(pairs);
    std::printf("%-8s %9s %9s %9s %9s %9s %9s\n", "", "P", "R", "F1", "correct",
                "pred", "gold");
    auto print_row = [](const char* label, const PRF& prf) {
      std::printf("%-8s %9.3f %9.3f %9.3f %9zu %9zu %9zu\n", label,
                  prf.precision, prf.recall, prf.f1, prf.num_correct,
                  prf.num_predicted, prf.num_gold);
    };
    print_row("Trig-C", report.triggers);
    print_row("Arg-C", report.arguments);
    return 0;
  });
}

int cmd_plot(const PlotOptions& options) {
  return run_guarded("plot", [&]() -> int {
    std::string run_dir = options.run;
    if (!fs::exists(run_dir)) {
      std::string root = "runs";
      if (const char* env_root = std::getenv(kRunsRootEnvVar)) {
        if (env_root[0] != '\0') root = env_root;
      }
      run_dir = root + "/" + options.run;
    }
    const std::string report_path = run_dir + "/report.csv";
    if (!fs::exists(report_path)) {
      throw Error("no report found at '" + report_path + "'");
    }
    const auto rows = parse_report_csv(read_text_file(report_path), report_path);
    if (rows.empty()) throw Error("report '" + report_path + "' has no rows");
    const auto written = write_report_plots(rows, run_dir + "/plots");
    for (const auto& path : written) std::cout << path << "\n";
    return 0;
  });
}

int cmd_print_defaults() {
  std::cout << describe_defaults();
  return 0;
}

}  // namespace evaug
