#pragma once

#include <string>

namespace evaug {

/// Command implementations behind the CLI. Each returns a process exit code:
/// 0 on success, 1 on any failure, with the offending file or field named on
/// stderr.

struct PretrainOptions {
  std::string config_path;
  std::string phase;  // "generator", "policy", or "extractor"
};
int cmd_pretrain(const PretrainOptions& options);

struct RetrainOptions {
  std::string config_path;
  bool resume = false;
  std::string resume_run_id;  // optional run id override for --resume
  int stop_after = 0;         // 0 = run every epoch
};
int cmd_retrain(const RetrainOptions& options);

struct MetricsOptions {
  std::string which;  // "pll" or "diversity"
  std::string generated_path;
  std::string original_path;  // required for diversity; corpus for pll tuning
  std::string config_path;    // optional backend configuration
  std::string out_path;       // optional report destination
};
int cmd_metrics(const MetricsOptions& options);

struct EvaluateOptions {
  std::string pred_path;
  std::string gold_path;
};
int cmd_evaluate(const EvaluateOptions& options);

struct PlotOptions {
  std::string run;  // run directory, or run id under the runs root
};
int cmd_plot(const PlotOptions& options);

int cmd_print_defaults();

}  // namespace evaug
