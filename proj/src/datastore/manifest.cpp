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

#include "hact/datastore/manifest.hpp"

#include <fstream>

#include <json.hpp>

namespace hact::data {

DatasetManifest write_manifest(const std::filesystem::path& dir,
                               const std::vector<std::string>& files) {
  std::vector<Episode> episodes;
  episodes.reserve(files.size());
  DatasetManifest manifest;
  manifest.files = files;
  for (const auto& f : files) {
    episodes.push_back(read_episode(dir / f));
    manifest.total_steps += episodes.back().length();
  }
  manifest.stats = compute_norm_stats(episodes);

  nlohmann::json j;
  j["format_version"] = manifest.format_version;
  j["files"] = manifest.files;
  j["episodes"] = manifest.files.size();
  j["total_steps"] = manifest.total_steps;
  j["norm_stats"] = to_json(manifest.stats);
  std::ofstream out(dir / "dataset.json");
  if (!out) throw Error("cannot write " + (dir / "dataset.json").string());
  out << j.dump(2) << '\n';
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "dataset.json";
  std::ifstream in(path);
  if (!in) throw EmptyDatasetError("empty dataset: no dataset.json in " + dir.string());
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    m.format_version = j.at("format_version").get<int>();
    m.files = j.at("files").get<std::vector<std::string>>();
    m.total_steps = j.at("total_steps").get<std::int64_t>();
    if (!m.files.empty()) m.stats = norm_stats_from_json(j.at("norm_stats"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (m.format_version != kManifestFormatVersion) {
    throw ValidationError(path.string() + ": unsupported manifest version " +
                          std::to_string(m.format_version));
  }
  std::int64_t steps = 0;
  for (const auto& f : m.files) {
    if (!std::filesystem::exists(dir / f)) {
      throw ValidationError(path.string() + ": listed episode " + f + " does not exist");
    }
    steps += inspect_episode(dir / f).length;
  }
  if (steps != m.total_steps) {
    throw ValidationError(path.string() + ": total_steps " + std::to_string(m.total_steps) +
                          " does not match episodes (" + std::to_string(steps) + ")");
  }
  return m;
}

std::vector<Episode> load_episodes(const std::filesystem::path& dir,
                                   const DatasetManifest& manifest) {
  std::vector<Episode> out;
  out.reserve(manifest.files.size());
  for (const auto& f : manifest.files) out.push_back(read_episode(dir / f));
  return out;
}

std::vector<Episode> load_dataset(const std::filesystem::path& dir) {
  const auto manifest = load_manifest(dir);
  if (manifest.files.empty()) throw EmptyDatasetError("empty dataset: " + dir.string());
  return load_episodes(dir, manifest);
}

}  // namespace hact::data
