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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hact/datastore/episode.hpp"

namespace hact::eval {

inline constexpr int kSummarySchemaVersion = 1;

// Episodes of one arm of the comparison plus where they were read from.
struct RunSet {
  std::string label;
  std::filesystem::path source;
  std::vector<std::string> files;
  std::vector<data::Episode> episodes;
};

// Reads every episode listed in a dataset directory's manifest.
RunSet load_run_set(const std::string& label, const std::filesystem::path& dir);

struct ReportFiles {
  std::filesystem::path summary;
  std::vector<std::filesystem::path> artifacts;
};

// Writes force-curve, force-box and joint-trace tables (CSV) and charts (SVG)
// plus summary.json into out_dir. The force ratio is a over b.
ReportFiles compare_report(const RunSet& a, const RunSet& b, const RunSet& demos,
                           const std::filesystem::path& out_dir);

// The summary.json document, without touching the filesystem.
nlohmann::json summary_json(const RunSet& a, const RunSet& b, const RunSet& demos);

}  // namespace hact::eval
