/* Copyright 2026 The CultureMod Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "culturemod/pipeline/report.hpp"

#include <cstdio>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/eval/heatmap.hpp"
#include "culturemod/eval/study.hpp"
#include "culturemod/version.hpp"

namespace culturemod::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

std::string p_text(double p) { return p < 0.001 ? "p<0.001" : "p=" + fmt("%.3f", p); }

std::string auc_text(const json& r) {
  return "AUC=" + fmt("%.3f", r.at("mean_auroc").get<double>()) + ", 95%CI (" +
         fmt("%.3f", r.at("ci95").at(0).get<double>()) + ", " + fmt("%.3f", r.at("ci95").at(1).get<double>()) + ")";
}

std::string welch_text(const json& w) {
  const auto& t = w.at("t");
  return "t(" + fmt("%.1f", w.at("df").get<double>()) + ")=" +
         (t.is_number() ? fmt("%.2f", t.get<double>()) : t.get<std::string>()) + ", " + p_text(w.at("p").get<double>());
}

void matrix(std::string& out, const std::vector<CultureId>& cols, const std::string& label,
            const std::vector<double>& row) {
  out += pad(label, 10);
  for (std::size_t j = 0; j < cols.size(); ++j) out += pad(fmt("%.3f", row[j]), 9);
  out += "\n";
}

}  // namespace

std::string render_report(const ExperimentManifest& m) {
  const auto eval_dir = m.work() / "evaluate";
  std::vector<fs::path> needed = {eval_dir / "heatmap.json", eval_dir / "auroc.json"};
  for (const auto& c : m.cultures) needed.push_back(eval_dir / ("scores/" + c.code() + ".json"));
  if (m.data.annotations) needed.push_back(m.resolve(*m.data.annotations));
  std::string missing;
  for (const auto& p : needed) {
    if (!fs::exists(p)) missing += (missing.empty() ? "" : ", ") + p.string();
  }
  if (!missing.empty()) throw Error(ErrorKind::not_found, "evaluation artifacts missing: " + missing);

  std::string out;
  out += "Experiment: " + m.experiment_id + "\n";
  out += "Cultures:";
  for (const auto& c : m.cultures) out += " " + c.code();
  out += "\nTool version: " + (m.tool_version.empty() ? std::string(kToolVersion) : m.tool_version) + "\n";

  const auto heat = eval::HeatmapMatrix::from_json(io::read_json(eval_dir / "heatmap.json"));
  out += "\n== Summarization: mean ROUGE-1 F1 (rows model, columns test set) ==\n";
  out += pad("model", 10);
  for (const auto& c : heat.col_cultures) out += pad(c.code(), 9);
  out += "\n";
  matrix(out, heat.col_cultures, "base", heat.base);
  for (std::size_t i = 0; i < heat.row_cultures.size(); ++i) {
    matrix(out, heat.col_cultures, heat.row_cultures[i].code(), heat.raw[i]);
  }
  out += "\nNormalized improvement over base\n";
  for (std::size_t i = 0; i < heat.row_cultures.size(); ++i) {
    matrix(out, heat.col_cultures, heat.row_cultures[i].code(), heat.normalized[i]);
  }
  out += "Diagonal is the column maximum in " + std::to_string(eval::diagonal_argmax_columns(heat)) + " of " +
         std::to_string(heat.col_cultures.size()) + " columns\n";

  const auto au = io::read_json(eval_dir / "auroc.json");
  out += "\n== Violation detection: AUROC over " + std::to_string(m.schedules.head.iterations) + " splits, " +
         fmt("%.0f", m.schedules.head.test_fraction * 100.0) + "% test ==\n";
  for (const auto& t : m.cultures) {
    const auto& row = au.at(t.code());
    out += t.code() + " data (" + std::to_string(row.at("records").get<std::size_t>()) + " records)\n";
    for (const auto& name : std::vector<std::string>{"base"}) {
      out += "  " + pad(name, 8) + auc_text(row.at("models").at(name)) + "\n";
    }
    for (const auto& c : m.cultures) {
      out += "  " + pad(c.code(), 8) + auc_text(row.at("models").at(c.code())) + "\n";
    }
    for (const auto& [other, w] : row.at("welch_vs").items()) {
      out += "  " + t.code() + " vs " + pad(other, 5) + welch_text(w) + "\n";
    }
  }

  out += "\n== Score distributions: median [q1, q3] ==\n";
  for (const auto& c : m.cultures) {
    const auto rep = io::read_json(eval_dir / ("scores/" + c.code() + ".json"));
    out += c.code() + " model\n";
    for (const auto& s : rep.at("strata")) {
      out += "  " + s.at("policy_category").get<std::string>() +
             (s.at("origin_match").get<bool>() ? ", own culture" : ", other culture") +
             (s.at("fyi").get<bool>() ? ", FYI" : "") + ": " + fmt("%.3f", s.at("median").get<double>()) + " [" +
             fmt("%.3f", s.at("q1").get<double>()) + ", " + fmt("%.3f", s.at("q3").get<double>()) +
             "] n=" + std::to_string(s.at("count").get<std::size_t>()) + "\n";
    }
  }

  out += "\n== Human evaluation ==\n";
  if (!m.data.annotations) {
    out += "No annotation sessions configured.\n";
    return out;
  }
  std::vector<eval::AnnotationSession> sessions;
  for (const auto& row : io::read_jsonl(m.resolve(*m.data.annotations))) {
    sessions.push_back(eval::AnnotationSession::from_json(row));
  }
  const auto rep = eval::study_report(sessions, m.evaluation.kendall_bootstrap, m.evaluation.kendall_permutation,
                                      m.seeds.kendall);
  out += "Sessions: " + std::to_string(rep.sessions) + "\nFirst choice:";
  for (const auto& [c, pct] : rep.first_choice) out += " " + c.code() + " " + fmt("%.1f", pct) + "%";
  out += "\n";
  for (const auto& [c, k] : rep.kendall) {
    out += "Kendall W, " + c.code() + " annotators: W=" + fmt("%.3f", k.w) + ", 95%CI (" + fmt("%.3f", k.ci95_low) +
           ", " + fmt("%.3f", k.ci95_high) + "), permutation " + p_text(k.permutation_p) + "\n";
  }
  return out;
}

}  // namespace culturemod::pipeline
