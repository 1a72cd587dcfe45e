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

#include "hact/datastore/norm_stats.hpp"

namespace hact::data {

inline constexpr int kManifestFormatVersion = 1;

/// dataset.json: the episode files of a directory and their NormStats.
struct DatasetManifest {
  int format_version = kManifestFormatVersion;
  std::vector<std::string> files;  // relative to the dataset directory
  std::int64_t total_steps = 0;
  NormStats stats;
};

// Computes stats over every listed episode and writes <dir>/dataset.json.
DatasetManifest write_manifest(const std::filesystem::path& dir,
                               const std::vector<std::string>& files);

// Loads dataset.json; every listed file must exist and pass inspection.
DatasetManifest load_manifest(const std::filesystem::path& dir);

std::vector<Episode> load_episodes(const std::filesystem::path& dir,
                                   const DatasetManifest& manifest);

// Episodes of a dataset directory in manifest order. Throws
// EmptyDatasetError if the manifest is missing or lists no files.
std::vector<Episode> load_dataset(const std::filesystem::path& dir);

}  // namespace hact::data
