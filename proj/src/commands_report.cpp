// Copyright 2026 The melaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "melaug/pipeline/commands.hpp"
#include "pipeline_internal.hpp"

namespace melaug::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ModeMetrics {
  std::string mode;
  double accuracy = 0.0, uar = 0.0, macro_f1 = 0.0;
  // minority-class metrics
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::map<std::string, std::array<double, 3>> per_class;  // precision, recall, f1
};

struct BarGroup {
  std::string label;
  std::vector<double> values;
};

// Minimal grouped bar chart; values are expected in [0, 1].
void write_bar_svg(const std::string& path, const std::string& title,
                   const std::vector<std::string>& series,
                   const std::vector<BarGroup>& groups) {
  const int width = 160 + static_cast<int>(groups.size()) * 110;
  const int height = 320;
  const int plot_h = 230, base_y = 270, left = 60;
  static const char* kColors[] = {"#4878CF", "#EE854A", "#6ACC65", "#D65F5F", "#956CB4"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\">\n";
  s << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  for (int grid = 0; grid <= 4; ++grid) {
    const double frac = grid / 4.0;
    const int y = base_y - static_cast<int>(frac * plot_h);
    s << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << width - 20
      << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << frac << "</text>\n";
  }
  const int group_w = 100;
  const int bar_w = std::max(8, group_w / std::max<int>(1, static_cast<int>(series.size()) + 1));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int x0 = left + 20 + static_cast<int>(g) * 110;
    for (std::size_t i = 0; i < groups[g].values.size(); ++i) {
      const double v = std::max(0.0, std::min(1.0, groups[g].values[i]));
      const int h = static_cast<int>(v * plot_h);
      s << "<rect x=\"" << x0 + static_cast<int>(i) * bar_w << "\" y=\"" << base_y - h
        << "\" width=\"" << bar_w - 2 << "\" height=\"" << h << "\" fill=\""
        << kColors[i % 5] << "\"/>\n";
      s << "<text x=\"" << x0 + static_cast<int>(i) * bar_w + bar_w / 2 - 1 << "\" y=\""
        << base_y - h - 4
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">"
        << static_cast<int>(std::lround(v * 1000)) / 1000.0 << "</text>\n";
    }
    s << "<text x=\"" << x0 + (static_cast<int>(series.size()) * bar_w) / 2 << "\" y=\""
      << base_y + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << groups[g].label << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const int y = 40 + static_cast<int>(i) * 16;
    s << "<rect x=\"" << width - 130 << "\" y=\"" << y - 10
      << "\" width=\"12\" height=\"12\" fill=\"" << kColors[i % 5] << "\"/>\n";
    s << "<text x=\"" << width - 112 << "\" y=\"" << y
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[i] << "</text>\n";
  }
  s << "</svg>\n";

  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << s.str();
}

}  // namespace

void cmd_report(const ExperimentConfig& cfg, bool force) {
  Workspace ws{cfg.output_dir};
  const data::DatasetManifest manifest = data::load_manifest(ws.manifest_path());
  const std::string minority = minority_class(cfg, manifest);

  std::vector<ModeMetrics> rows;
  for (const char* mode : {"none", "specaugment", "stretch", "pitch", "gan"}) {
    const std::string path = ws.clf_dir(mode) + "/test_metrics.json";
    if (!fs::exists(path)) continue;
    std::ifstream in(path);
    json j;
    in >> j;
    ModeMetrics m;
    m.mode = mode;
    m.accuracy = j.at("accuracy").get<double>();
    m.uar = j.at("uar").get<double>();
    m.macro_f1 = j.at("macro_f1").get<double>();
    for (const auto& [cls, v] : j.at("per_class").items())
      m.per_class[cls] = {v.at("precision").get<double>(), v.at("recall").get<double>(),
                          v.at("f1").get<double>()};
    const auto& mv = m.per_class.at(minority);
    m.precision = mv[0];
    m.recall = mv[1];
    m.f1 = mv[2];
    rows.push_back(std::move(m));
  }
  require(!rows.empty(), ErrorCode::missing_prerequisite,
          "no evaluated classifiers; run evaluate first");

  refuse_overwrite(ws.report_dir(), force);
  fs::create_directories(ws.report_dir());

  const ModeMetrics* baseline = nullptr;
  for (const auto& r : rows)
    if (r.mode == "none") baseline = &r;

  std::ostringstream md;
  md << "# Augmentation comparison report\n\n";
  md << "Minority class: `" << minority << "`\n\n";

  md << "## Accuracy\n\n";
  md << "| method | accuracy (%) | inc. (pts) |\n|---|---|---|\n";
  char buf[128];
  for (const auto& r : rows) {
    if (baseline && r.mode != "none") {
      std::snprintf(buf, sizeof(buf), "| %s | %.1f | %+.1f |\n", r.mode.c_str(),
                    100.0 * r.accuracy, 100.0 * (r.accuracy - baseline->accuracy));
    } else {
      std::snprintf(buf, sizeof(buf), "| %s | %.1f | %s |\n", r.mode.c_str(),
                    100.0 * r.accuracy, baseline ? "-" : "n/a");
    }
    md << buf;
  }

  md << "\n## Minority-class metrics\n\n";
  md << "| method | precision | recall | f1 | f1 inc. (pts) |\n|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    if (baseline && r.mode != "none") {
      std::snprintf(buf, sizeof(buf), "| %s | %.4f | %.4f | %.4f | %+.1f |\n",
                    r.mode.c_str(), r.precision, r.recall, r.f1,
                    100.0 * (r.f1 - baseline->f1));
    } else {
      std::snprintf(buf, sizeof(buf), "| %s | %.4f | %.4f | %.4f | %s |\n",
                    r.mode.c_str(), r.precision, r.recall, r.f1,
                    baseline ? "-" : "n/a");
    }
    md << buf;
  }

  md << "\n## UAR\n\n| method | UAR |\n|---|---|\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "| %s | %.4f |\n", r.mode.c_str(), r.uar);
    md << buf;
  }

  for (const char* name : {"fid_table.tsv", "fid_trend.tsv"}) {
    const std::string path = ws.fid_dir() + "/" + name;
    if (!fs::exists(path)) continue;
    md << "\n## " << name << "\n\n```\n";
    std::ifstream in(path);
    md << in.rdbuf() << "```\n";
  }

  std::ofstream out(ws.report_dir() + "/report.md");
  out << md.str();

  // bar charts: UAR per mode, classwise recall and precision per mode
  std::vector<std::string> modes;
  std::vector<BarGroup> uar_groups;
  for (const auto& r : rows) {
    modes.push_back(r.mode);
    uar_groups.push_back({r.mode, {r.uar}});
  }
  write_bar_svg(ws.report_dir() + "/uar_comparison.svg", "UAR by augmentation method",
                {"UAR"}, uar_groups);

  std::vector<BarGroup> recall_groups, precision_groups;
  for (const auto& cls : manifest.class_names) {
    BarGroup rg{cls, {}}, pg{cls, {}};
    for (const auto& r : rows) {
      rg.values.push_back(r.per_class.at(cls)[1]);
      pg.values.push_back(r.per_class.at(cls)[0]);
    }
    recall_groups.push_back(std::move(rg));
    precision_groups.push_back(std::move(pg));
  }
  write_bar_svg(ws.report_dir() + "/classwise_recall.svg", "Classwise recall", modes,
                recall_groups);
  write_bar_svg(ws.report_dir() + "/classwise_precision.svg", "Classwise precision",
                modes, precision_groups);

  std::printf("report written to %s\n", (ws.report_dir() + "/report.md").c_str());
}

}  // namespace melaug::pipeline
