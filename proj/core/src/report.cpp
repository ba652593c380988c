#include "evaug/report.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "evaug/dataset_io.hpp"
#include "evaug/error.hpp"

namespace evaug {

namespace fs = std::filesystem;

ReportRow report_row_from_log(const EpochLog& log) {
  ReportRow row;
  row.epoch = log.epoch;
  row.pos = log.retained_ids.size();
  row.neg = log.removed_ids.size();
  row.diff_new = log.diff_new_ids.size();
  row.diff_old = log.diff_old_ids.size();
  row.trig_p = log.trig_p;
  row.trig_r = log.trig_r;
  row.trig_f1 = log.f1_trigger;
  row.arg_p = log.arg_p;
  row.arg_r = log.arg_r;
  row.arg_f1 = log.f1_argument;
  row.reward = log.reward;
  row.pll = log.pll;
  row.distinct2 = log.distinct2;
  row.distinct3 = log.distinct3;
  row.ckpt = log.checkpoint_updated;
  return row;
}

namespace {

std::string format_row(const ReportRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%d,%zu,%zu,%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,"
                "%.6f,%.6f,%d",
                r.epoch, r.pos, r.neg, r.diff_new, r.diff_old, r.trig_p,
                r.trig_r, r.trig_f1, r.arg_p, r.arg_r, r.arg_f1, r.reward,
                r.pll, r.distinct2, r.distinct3, r.ckpt ? 1 : 0);
  return buf;
}

}  // namespace

std::string render_report_csv(const std::vector<EpochLog>& logs) {
  std::string out = kReportHeader;
  out += '\n';
  for (const EpochLog& log : logs) {
    if (log.epoch == 0) continue;  // epoch 0 is the pre-loop state
    out += format_row(report_row_from_log(log));
    out += '\n';
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& text,
                                        const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw Error(origin + ": unexpected report header");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ReportRow r;
    int ckpt = 0;
    const int fields = std::sscanf(
        line.c_str(),
        "%d,%zu,%zu,%zu,%zu,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%d",
        &r.epoch, &r.pos, &r.neg, &r.diff_new, &r.diff_old, &r.trig_p,
        &r.trig_r, &r.trig_f1, &r.arg_p, &r.arg_r, &r.arg_f1, &r.reward,
        &r.pll, &r.distinct2, &r.distinct3, &ckpt);
    if (fields != 16) {
      throw Error(origin + ": line " + std::to_string(line_no) +
                  ": expected 16 fields, parsed " + std::to_string(fields));
    }
    r.ckpt = ckpt != 0;
    rows.push_back(r);
  }
  return rows;
}

namespace {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> values;
};

std::string render_line_chart(const std::string& title,
                              const std::vector<int>& epochs,
                              const std::vector<Series>& series) {
  const int width = 640;
  const int height = 400;
  const int margin = 50;

  double lo = 0.0;
  double hi = 1.0;
  bool first = true;
  for (const Series& s : series) {
    for (double v : s.values) {
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (hi - lo < 1e-9) {
    hi += 1.0;
    lo -= 1.0;
  }

  auto x_at = [&](std::size_t i) {
    const double span = epochs.size() > 1 ? double(epochs.size() - 1) : 1.0;
    return margin + (width - 2 * margin) * (double(i) / span);
  };
  auto y_at = [&](double v) {
    return height - margin - (height - 2 * margin) * ((v - lo) / (hi - lo));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", hi);
  svg << "<text x=\"4\" y=\"" << margin + 4
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof(buf), "%.3f", lo);
  svg << "<text x=\"4\" y=\"" << height - margin
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";

  int legend_y = margin;
  for (const Series& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      svg << x_at(i) << "," << y_at(s.values[i]) << " ";
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << width - margin + 6 << "\" y=\"" << legend_y
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << s.color
        << "\">" << s.label << "</text>\n";
    legend_y += 14;
  }
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    svg << "<text x=\"" << x_at(i) << "\" y=\"" << height - margin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << epochs[i] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<std::string> write_report_plots(const std::vector<ReportRow>& rows,
                                            const std::string& out_dir) {
  if (rows.empty()) throw Error("write_report_plots: no report rows");
  fs::create_directories(out_dir);

  std::vector<int> epochs;
  std::vector<double> trig_f1, arg_f1, rewards, plls;
  for (const ReportRow& r : rows) {
    epochs.push_back(r.epoch);
    trig_f1.push_back(r.trig_f1);
    arg_f1.push_back(r.arg_f1);
    rewards.push_back(r.reward);
    plls.push_back(r.pll);
  }

  std::vector<std::string> written;
  const std::string f1_path = out_dir + "/f1.svg";
  write_text_file(f1_path,
                  render_line_chart("dev F1 by epoch", epochs,
                                    {{"trigger F1", "#1f77b4", trig_f1},
                                     {"argument F1", "#d62728", arg_f1}}));
  written.push_back(f1_path);

  const std::string reward_path = out_dir + "/reward.svg";
  write_text_file(reward_path, render_line_chart("reward by epoch", epochs,
                                                 {{"reward", "#2ca02c", rewards}}));
  written.push_back(reward_path);

  const std::string pll_path = out_dir + "/pll.svg";
  write_text_file(pll_path, render_line_chart("generated-corpus PLL by epoch",
                                              epochs, {{"pll", "#9467bd", plls}}));
  written.push_back(pll_path);
  return written;
}

}  // namespace evaug
