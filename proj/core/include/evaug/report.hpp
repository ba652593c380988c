#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evaug/orchestrator.hpp"

namespace evaug {

/// One report.csv row; everything here is rebuilt from episode logs, never
/// derived-only state.
struct ReportRow {
  int epoch = 0;
  std::size_t pos = 0;
  std::size_t neg = 0;
  std::size_t diff_new = 0;
  std::size_t diff_old = 0;
  double trig_p = 0.0, trig_r = 0.0, trig_f1 = 0.0;
  double arg_p = 0.0, arg_r = 0.0, arg_f1 = 0.0;
  double reward = 0.0;
  double pll = 0.0;
  double distinct2 = 0.0;
  double distinct3 = 0.0;
  bool ckpt = false;
};

inline constexpr const char* kReportHeader =
    "epoch,pos,neg,diff_new,diff_old,trig_p,trig_r,trig_f1,arg_p,arg_r,"
    "arg_f1,reward,pll,distinct2,distinct3,ckpt";

ReportRow report_row_from_log(const EpochLog& log);

/// CSV for epochs >= 1, one row per epoch, fixed six-decimal formatting.
std::string render_report_csv(const std::vector<EpochLog>& logs);

std::vector<ReportRow> parse_report_csv(const std::string& text,
                                        const std::string& origin = "<report>");

/// Line-chart SVGs (F1 curves, reward, PLL) rendered from report rows.
/// Returns the written file paths.
std::vector<std::string> write_report_plots(const std::vector<ReportRow>& rows,
                                            const std::string& out_dir);

}  // namespace evaug
