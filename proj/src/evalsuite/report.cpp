// Copyright 2026 The hapticbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hact/evalsuite/report.hpp"

#include <cstdio>
#include <fstream>

#include "hact/datastore/manifest.hpp"
#include "hact/evalsuite/metrics.hpp"
#include "svg.hpp"

namespace hact::eval {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kColors = {"#1f77b4", "#d62728", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<const data::Episode*> pointers(const RunSet& r) {
  std::vector<const data::Episode*> out;
  for (const auto& e : r.episodes) out.push_back(&e);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

nlohmann::json run_json(const RunSet& r, const ForceMetrics& m) {
  int successes = 0;
  std::vector<std::uint64_t> seeds;
  for (const auto& e : r.episodes) {
    successes += e.metadata.success;
    seeds.push_back(e.metadata.seed);
  }
  nlohmann::json fingers = nlohmann::json::object();
  for (int i = 0; i < data::kForceDim; ++i) {
    const auto& b = m.fingers[i];
    fingers[kFingerNames[i]] = {{"count", b.count},  {"mean", b.mean}, {"median", b.median},
                                {"q1", b.q1},        {"q3", b.q3},     {"whisker_low", b.whisker_low},
                                {"whisker_high", b.whisker_high}, {"outliers", b.outliers.size()}};
  }
  return {{"label", r.label},
          {"source", r.source.string()},
          {"files", r.files},
          {"seeds", seeds},
          {"episodes", r.episodes.size()},
          {"successes", successes},
          {"success_rate", r.episodes.empty() ? 0.0 : double(successes) / r.episodes.size()},
          {"grasp_steps", m.grasp_steps},
          {"grasp_mean_force", m.grasp_mean},
          {"thumb_mean_force", m.fingers[0].mean},
          {"fingers", fingers}};
}

nlohmann::json ratio(double num, double den) {
  return den > 0.0 ? nlohmann::json(num / den) : nlohmann::json(nullptr);
}

}  // namespace

RunSet load_run_set(const std::string& label, const fs::path& dir) {
  const auto manifest = data::load_manifest(dir);
  RunSet r{label, dir, manifest.files, data::load_episodes(dir, manifest)};
  if (r.episodes.empty()) throw EmptyDatasetError("empty dataset: " + dir.string());
  return r;
}

nlohmann::json summary_json(const RunSet& a, const RunSet& b, const RunSet& demos) {
  for (const RunSet* r : {&a, &b, &demos}) {
    if (r->episodes.empty()) throw EmptyDatasetError("run '" + r->label + "' has no episodes");
  }
  const auto ma = force_metrics(pointers(a));
  const auto mb = force_metrics(pointers(b));
  const auto md = force_metrics(pointers(demos));
  const auto ja = joint_trace_compare(a.episodes.front(), demos.episodes.front());
  const auto jb = joint_trace_compare(b.episodes.front(), demos.episodes.front());
  nlohmann::json rms = nlohmann::json::object();
  for (int j = 0; j < kHandJoints; ++j) {
    rms[kHandJointNames[j]] = {{"a", ja.rms[j]}, {"b", jb.rms[j]}};
  }
  return {{"schema_version", kSummarySchemaVersion},
          {"grasp_phase", "steps where any fingertip force is greater than zero"},
          {"a", run_json(a, ma)},
          {"b", run_json(b, mb)},
          {"demos", run_json(demos, md)},
          {"force_ratio", ratio(ma.grasp_mean, mb.grasp_mean)},
          {"thumb_force_ratio", ratio(ma.fingers[0].mean, mb.fingers[0].mean)},
          {"hand_joint_rms_vs_first_demo", rms}};
}

ReportFiles compare_report(const RunSet& a, const RunSet& b, const RunSet& demos,
                           const fs::path& out_dir) {
  nlohmann::json summary = summary_json(a, b, demos);
  fs::create_directories(out_dir);
  const std::vector<const RunSet*> runs = {&a, &b, &demos};
  std::vector<ForceMetrics> metrics;
  for (const auto* r : runs) metrics.push_back(force_metrics(pointers(*r)));
  std::vector<std::string> names;
  for (const auto* r : runs) names.push_back(r->label);

  ReportFiles files;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(out_dir / name, text);
    files.artifacts.push_back(out_dir / name);
  };

  // Mean fingertip force over time.
  {
    std::string csv = "step," + a.label + "," + b.label + "," + demos.label + "\n";
    std::size_t longest = 0;
    for (const auto& m : metrics) longest = std::max(longest, m.mean_curve.size());
    for (std::size_t t = 0; t < longest; ++t) {
      csv += std::to_string(t);
      for (const auto& m : metrics) csv += "," + (t < m.mean_curve.size() ? fmt(m.mean_curve[t]) : "");
      csv += "\n";
    }
    emit("force_curve.csv", csv);
    std::vector<svg::Series> series;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      series.push_back({names[i], kColors[i], metrics[i].mean_curve});
    }
    const svg::Frame f{0, 0, 720, 360};
    emit("force_curve.svg",
         svg::document(f.width, f.height,
                       svg::line_panel(f, "Mean fingertip force", "step", "force (N)", series)));
  }

  // Per-finger grasp-phase box statistics.
  {
    std::string csv = "run,finger,count,mean,median,q1,q3,whisker_low,whisker_high,outliers\n";
    std::vector<svg::BoxGroup> groups;
    for (int fi = 0; fi < data::kForceDim; ++fi) {
      svg::BoxGroup g{kFingerNames[fi], {}};
      for (std::size_t ri = 0; ri < runs.size(); ++ri) {
        const auto& bs = metrics[ri].fingers[fi];
        csv += names[ri] + "," + kFingerNames[fi] + "," + std::to_string(bs.count) + "," +
               fmt(bs.mean) + "," + fmt(bs.median) + "," + fmt(bs.q1) + "," + fmt(bs.q3) + "," +
               fmt(bs.whisker_low) + "," + fmt(bs.whisker_high) + "," +
               std::to_string(bs.outliers.size()) + "\n";
        g.boxes.push_back({bs.median, bs.q1, bs.q3, bs.whisker_low, bs.whisker_high});
      }
      groups.push_back(std::move(g));
    }
    emit("force_box.csv", csv);
    const svg::Frame f{0, 0, 720, 360};
    emit("force_box.svg",
         svg::document(f.width, f.height,
                       svg::box_panel(f, "Grasp-phase fingertip force", "force (N)", names,
                                      kColors, groups)));
  }

  // Hand-joint traces of the first rollout of each run against the first demo.
  {
    const auto ja = joint_trace_compare(a.episodes.front(), demos.episodes.front());
    const auto jb = joint_trace_compare(b.episodes.front(), demos.episodes.front());
    std::string csv = "step,joint," + a.label + "," + b.label + "," + demos.label + "\n";
    const std::int64_t len = std::min(ja.length, jb.length);
    for (int j = 0; j < kHandJoints; ++j) {
      for (std::int64_t t = 0; t < len; ++t) {
        csv += std::to_string(t) + "," + kHandJointNames[j] + "," + fmt(ja.policy[j][t]) + "," +
               fmt(jb.policy[j][t]) + "," + fmt(ja.demo[j][t]) + "\n";
      }
    }
    emit("joint_traces.csv", csv);
    std::string body;
    for (int j = 0; j < kHandJoints; ++j) {
      const svg::Frame f{static_cast<double>(j % 2) * 480.0, static_cast<double>(j / 2) * 260.0, 480, 260};
      auto cut = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin(), v.begin() + len);
      };
      body += svg::line_panel(f, kHandJointNames[j], "step", "rad",
                              {{names[0], kColors[0], cut(ja.policy[j])},
                               {names[1], kColors[1], cut(jb.policy[j])},
                               {names[2], kColors[2], cut(ja.demo[j])}});
    }
    emit("joint_traces.svg", svg::document(960, 780, body));
  }

  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& p : files.artifacts) artifacts.push_back(p.filename().string());
  summary["artifacts"] = artifacts;
  files.summary = out_dir / "summary.json";
  write_text(files.summary, summary.dump(2) + "\n");
  return files;
}

}  // namespace hact::eval
