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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "hact/datastore/episode.hpp"
#include "hact/datastore/manifest.hpp"
#include "hact/datastore/norm_stats.hpp"
#include "hact/datastore/recorder.hpp"
#include "hact/datastore/sampler.hpp"

namespace hact::data {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hact_datastore_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Synthetic episode with values that encode (t, dim) so indexing bugs show up.
Episode synthetic_episode(std::int64_t length, int h = 4, int w = 4, std::uint64_t seed = 0) {
  EpisodeBuilder builder({"front", "wrist"}, h, w);
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> front(h * w * 3), wrist(h * w * 3);
  for (std::int64_t t = 0; t < length; ++t) {
    for (auto& p : front) p = static_cast<std::uint8_t>(rng());
    for (auto& p : wrist) p = static_cast<std::uint8_t>(rng());
    std::array<float, kJointDim> joints{};
    std::array<float, kForceDim> forces{};
    std::array<float, kActionDim> action{};
    for (int i = 0; i < kJointDim; ++i) joints[i] = static_cast<float>(t) + 0.01f * i;
    for (int i = 0; i < kForceDim; ++i) forces[i] = 0.1f * static_cast<float>(t % 7) + i;
    for (int i = 0; i < kActionDim; ++i) action[i] = -static_cast<float>(t) - 0.01f * i;
    const std::array<std::span<const std::uint8_t>, 2> frames = {front, wrist};
    builder.append(frames, joints, forces, action);
  }
  return std::move(builder).finish({50.0, "scripted", seed, true});
}

TEST(EpisodeFile, RoundTripIsBitExact) {
  const fs::path dir = scratch_dir("roundtrip");
  for (std::int64_t length : {std::int64_t{400}, std::int64_t{1}}) {
    const Episode ep = synthetic_episode(length, 64, 64, 11);
    const fs::path path = dir / episode_file_name(0);
    write_episode(ep, path);
    const Episode back = read_episode(path);
    EXPECT_EQ(back, ep) << "length " << length;
    const EpisodeFileInfo info = inspect_episode(path);
    EXPECT_EQ(info.length, length);
    EXPECT_EQ(info.height, 64);
    EXPECT_EQ(info.cameras, (std::vector<std::string>{"front", "wrist"}));
  }
}

TEST(EpisodeFile, TruncatedFileReportsSizeMismatch) {
  const fs::path dir = scratch_dir("truncated");
  const fs::path path = dir / episode_file_name(3);
  write_episode(synthetic_episode(10), path);
  const auto full = fs::file_size(path);
  fs::resize_file(path, full - 5);
  try {
    read_episode(path);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("size mismatch"), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(full)), std::string::npos) << msg;
  }
}

TEST(EpisodeFile, RejectsBadMagic) {
  const fs::path dir = scratch_dir("magic");
  const fs::path path = dir / "junk.hax";
  std::ofstream(path) << "not an episode at all";
  EXPECT_THROW(read_episode(path), ValidationError);
}

TEST(EpisodeFile, FileNamesAreZeroPadded) { EXPECT_EQ(episode_file_name(7), "episode_0007.hax"); }

TEST(EpisodeValidation, CatchesMismatchedArrays) {
  Episode ep = synthetic_episode(5);
  ep.actions.pop_back();
  EXPECT_THROW(ep.validate(), ValidationError);
  ep = synthetic_episode(5);
  ep.forces[3] = std::nanf("");
  EXPECT_THROW(ep.validate(), ValidationError);
}

Episode joints_only(const std::vector<std::array<float, kJointDim>>& rows) {
  EpisodeBuilder builder({}, 1, 1);
  for (const auto& r : rows) {
    const std::array<float, kForceDim> f{};
    builder.append({}, r, f, r);
  }
  return std::move(builder).finish({});
}

TEST(NormStats, MatchesHandComputedMoments) {
  std::vector<std::array<float, kJointDim>> rows(3);
  for (int t = 0; t < 3; ++t) {
    rows[t].fill(4.0f);                         // constant dimensions
    rows[t][0] = static_cast<float>(t + 1);     // 1, 2, 3
  }
  const std::vector<Episode> eps = {joints_only(rows)};
  const NormStats s = compute_norm_stats(eps);
  EXPECT_NEAR(s.joints.mean[0], 2.0, 1e-12);
  EXPECT_NEAR(s.joints.std[0], std::sqrt(2.0 / 3.0), 1e-5);
  EXPECT_NEAR(s.joints.std[0], 0.81650, 1e-5);
  EXPECT_EQ(s.joints.std[1], kStdFloor);
  EXPECT_EQ(s.forces.std[0], kStdFloor);
  EXPECT_NEAR(s.joints.mean[1], 4.0, 1e-12);
}

TEST(NormStats, InvariantToDuplication) {
  std::vector<Episode> eps = {synthetic_episode(17, 2, 2, 1), synthetic_episode(9, 2, 2, 2)};
  const NormStats once = compute_norm_stats(eps);
  std::vector<Episode> doubled = eps;
  doubled.insert(doubled.end(), eps.begin(), eps.end());
  const NormStats twice = compute_norm_stats(doubled);
  for (int i = 0; i < kJointDim; ++i) {
    EXPECT_NEAR(once.joints.mean[i], twice.joints.mean[i], 1e-9);
    EXPECT_NEAR(once.joints.std[i], twice.joints.std[i], 1e-9);
  }
  for (int i = 0; i < kForceDim; ++i) EXPECT_NEAR(once.forces.std[i], twice.forces.std[i], 1e-9);
}

TEST(NormStats, EmptyInputThrows) {
  EXPECT_THROW(compute_norm_stats(std::span<const Episode>{}), EmptyDatasetError);
}

TEST(NormStats, NormalizeRoundTripAndMoments) {
  const std::vector<Episode> eps = {synthetic_episode(40, 2, 2, 5), synthetic_episode(25, 2, 2, 6)};
  const NormStats s = compute_norm_stats(eps);
  const std::vector<double> at_mean = normalize(std::span<const double>(s.joints.mean), s.joints);
  for (double v : at_mean) EXPECT_NEAR(v, 0.0, 1e-12);

  std::vector<double> sum(kForceDim, 0.0), sq(kForceDim, 0.0);
  std::int64_t n = 0;
  for (const Episode& ep : eps) {
    for (std::int64_t t = 0; t < ep.length(); ++t) {
      const auto raw = ep.forces_at(t);
      const std::vector<double> z = normalize(raw, s.forces);
      const std::vector<double> back = denormalize(z, s.forces);
      for (int i = 0; i < kForceDim; ++i) {
        EXPECT_NEAR(back[i], raw[i], 1e-6);
        sum[i] += z[i];
        sq[i] += z[i] * z[i];
      }
      ++n;
    }
  }
  for (int i = 0; i < kForceDim; ++i) {
    const double mean = sum[i] / n;
    EXPECT_NEAR(mean, 0.0, 1e-6);
    EXPECT_NEAR(std::sqrt(sq[i] / n - mean * mean), 1.0, 1e-6);
  }
  const std::vector<double> wrong(3, 0.0);
  EXPECT_THROW(normalize(std::span<const double>(wrong), s.forces), std::invalid_argument);
}

TEST(NormStats, JsonRoundTrip) {
  const std::vector<Episode> eps = {synthetic_episode(12, 2, 2, 8)};
  const NormStats s = compute_norm_stats(eps);
  EXPECT_EQ(norm_stats_from_json(to_json(s)), s);
}

TEST(Sampler, PadsPastEpisodeEnd) {
  const Episode ep = synthetic_episode(30);
  const std::vector<const Episode*> eps = {&ep};
  const std::array<std::pair<int, std::int64_t>, 2> picks = {{{0, 29}, {0, 25}}};
  const Batch b = gather_batch(eps, picks, 8);
  ASSERT_EQ(b.mask.size(), 16u);
  EXPECT_EQ(std::accumulate(b.mask.begin(), b.mask.begin() + 8, 0), 1);
  EXPECT_EQ(std::accumulate(b.mask.begin() + 8, b.mask.end(), 0), 5);
  // Padded rows repeat the final action.
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < kActionDim; ++i)
      EXPECT_EQ(b.actions[(0 * 8 + j) * kActionDim + i], ep.action_at(29)[i]);
  for (int i = 0; i < kActionDim; ++i) {
    EXPECT_EQ(b.actions[(8 + 0) * kActionDim + i], ep.action_at(25)[i]);
    EXPECT_EQ(b.actions[(8 + 4) * kActionDim + i], ep.action_at(29)[i]);
  }
  EXPECT_EQ(b.joints[kJointDim + 0], ep.joints_at(25)[0]);
  const std::size_t frame = 4 * 4 * 3;
  EXPECT_TRUE(std::equal(b.images[1].begin() + frame, b.images[1].begin() + 2 * frame,
                         ep.camera("wrist").frame(25).begin()));
}

TEST(Sampler, SameSeedSameBatches) {
  const std::vector<Episode> eps = {synthetic_episode(20, 2, 2, 1), synthetic_episode(35, 2, 2, 2)};
  const Batch a = sample_batch(eps, 16, 5, 99);
  const Batch b = sample_batch(eps, 16, 5, 99);
  EXPECT_EQ(a.timestep, b.timestep);
  EXPECT_EQ(a.episode_index, b.episode_index);
  EXPECT_EQ(a.actions, b.actions);
  const Batch c = sample_batch(eps, 16, 5, 100);
  EXPECT_NE(a.timestep, c.timestep);
}

TEST(Sampler, EpisodesDrawnUniformly) {
  const std::vector<Episode> eps = {synthetic_episode(10, 1, 1, 1), synthetic_episode(300, 1, 1, 2)};
  const Batch b = sample_batch(eps, 10000, 1, 4);
  const double first = std::count(b.episode_index.begin(), b.episode_index.end(), 0) / 10000.0;
  EXPECT_NEAR(first, 0.5, 0.03);
}

TEST(Sampler, RejectsBadArguments) {
  const std::vector<Episode> eps = {synthetic_episode(10, 1, 1)};
  EXPECT_THROW(sample_batch(eps, 0, 4, 1), std::invalid_argument);
  EXPECT_THROW(sample_batch(eps, 4, 0, 1), std::invalid_argument);
  EXPECT_THROW(sample_batch(std::span<const Episode>{}, 4, 4, 1), EmptyDatasetError);
}

TEST(Manifest, WriteLoadAndValidate) {
  const fs::path dir = scratch_dir("manifest");
  std::vector<std::string> files;
  for (int i = 0; i < 3; ++i) {
    files.push_back(episode_file_name(i));
    write_episode(synthetic_episode(10 + i, 2, 2, i), dir / files.back());
  }
  const DatasetManifest written = write_manifest(dir, files);
  EXPECT_EQ(written.total_steps, 33);
  const DatasetManifest loaded = load_manifest(dir);
  EXPECT_EQ(loaded.files, files);
  EXPECT_EQ(loaded.stats, written.stats);
  EXPECT_EQ(load_dataset(dir).size(), 3u);

  fs::remove(dir / files[1]);
  EXPECT_THROW(load_manifest(dir), ValidationError);
}

TEST(Manifest, MissingDatasetIsEmpty) {
  const fs::path dir = scratch_dir("empty");
  try {
    load_dataset(dir);
    FAIL() << "expected EmptyDatasetError";
  } catch (const EmptyDatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("empty dataset"), std::string::npos);
  }
}

TEST(Recorder, ScriptedEpisodeHasConsistentShapes) {
  const sim::Simulator simulator{sim::SimConfig{}};
  const Episode ep = record_scripted_episode(simulator, 4, 120, true);
  EXPECT_EQ(ep.length(), 120);
  EXPECT_NO_THROW(ep.validate());
  ASSERT_EQ(ep.cameras.size(), 2u);
  EXPECT_EQ(ep.cameras[0].name, "front");
  EXPECT_EQ(ep.metadata.source, "scripted");
  EXPECT_EQ(ep.metadata.seed, 4u);
  for (float f : ep.forces) {
    EXPECT_GE(f, 0.0f);
    EXPECT_LE(f, simulator.config().force_cap);
  }
}

TEST(Recorder, CollectKeepsOnlySuccesses) {
  const sim::Simulator simulator{sim::SimConfig{}};
  const fs::path dir = scratch_dir("collect");
  const CollectSummary summary = collect_scripted(simulator, dir, 2, 0);
  EXPECT_EQ(summary.kept_seeds.size(), 2u);
  const DatasetManifest m = load_manifest(dir);
  ASSERT_EQ(m.files.size(), 2u);
  for (const Episode& ep : load_episodes(dir, m)) EXPECT_TRUE(ep.metadata.success);
}

}  // namespace
}  // namespace hact::data
