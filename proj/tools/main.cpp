#include <string>

#include <CLI11.hpp>

#include "evaug/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "evaug: structure-to-text data augmentation for event extraction with "
      "a reward-driven filtering agent"};
  app.require_subcommand(0, 1);

  bool print_defaults = false;
  app.add_flag("--defaults", print_defaults,
               "Print the default configuration with notes and exit");

  evaug::PretrainOptions pretrain_options;
  CLI::App* pretrain = app.add_subcommand(
      "pretrain", "Run one pretraining phase and persist the backend state");
  pretrain->add_option("--config", pretrain_options.config_path, "Config file")
      ->required();
  pretrain
      ->add_option("--phase", pretrain_options.phase,
                   "generator, policy, or extractor")
      ->required();

  evaug::RetrainOptions retrain_options;
  CLI::App* retrain = app.add_subcommand(
      "retrain", "Run the retraining loop (episode persistence + report.csv)");
  retrain->add_option("--config", retrain_options.config_path, "Config file")
      ->required();
  CLI::Option* resume_opt =
      retrain
          ->add_option("--resume", retrain_options.resume_run_id,
                       "Resume this run id after its last completed epoch")
          ->expected(0, 1);
  retrain->add_option("--stop-after", retrain_options.stop_after,
                      "Stop (resumably) after this many episodes");

  evaug::MetricsOptions metrics_options;
  CLI::App* metrics =
      app.add_subcommand("metrics", "Corpus quality metrics (pll, diversity)");
  metrics->add_option("--which", metrics_options.which, "pll or diversity")
      ->required();
  metrics
      ->add_option("--generated", metrics_options.generated_path,
                   "Generated corpus (one sentence per line)")
      ->required();
  metrics->add_option("--original", metrics_options.original_path,
                      "Original corpus (one sentence per line)");
  metrics->add_option("--config", metrics_options.config_path,
                      "Config file naming the masked-LM backend");
  metrics->add_option("--out", metrics_options.out_path,
                      "Write the metric report to this file");

  evaug::EvaluateOptions evaluate_options;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Trigger/argument classification P/R/F1 of pred vs gold");
  evaluate->add_option("--pred", evaluate_options.pred_path, "Predictions JSONL")
      ->required();
  evaluate->add_option("--gold", evaluate_options.gold_path, "Gold JSONL")
      ->required();

  evaug::PlotOptions plot_options;
  CLI::App* plot =
      app.add_subcommand("plot", "Render F1/reward/PLL curves for a run");
  plot->add_option("--run", plot_options.run, "Run directory or run id")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (print_defaults) return evaug::cmd_print_defaults();

  if (pretrain->parsed()) return evaug::cmd_pretrain(pretrain_options);
  if (retrain->parsed()) {
    retrain_options.resume = resume_opt->count() > 0;
    return evaug::cmd_retrain(retrain_options);
  }
  if (metrics->parsed()) return evaug::cmd_metrics(metrics_options);
  if (evaluate->parsed()) return evaug::cmd_evaluate(evaluate_options);
  if (plot->parsed()) return evaug::cmd_plot(plot_options);

  std::puts(app.help().c_str());
  return 0;
}
