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

#include "hact/datastore/norm_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hact::data {

namespace {

// Two-pass mean / population std over every timestep of every episode.
template <typename Getter>
Moments moments_of(std::span<const Episode* const> episodes, int dim, Getter rows) {
  Moments m;
  m.mean.assign(dim, 0.0);
  m.std.assign(dim, 0.0);
  std::int64_t count = 0;
  for (const Episode* ep : episodes) {
    const std::vector<float>& data = rows(*ep);
    const std::size_t n = data.size() / dim;
    for (std::size_t t = 0; t < n; ++t) {
      for (int d = 0; d < dim; ++d) m.mean[d] += data[t * dim + d];
    }
    count += static_cast<std::int64_t>(n);
  }
  if (count == 0) throw EmptyDatasetError("empty dataset: no timesteps to compute statistics");
  for (auto& v : m.mean) v /= static_cast<double>(count);
  for (const Episode* ep : episodes) {
    const std::vector<float>& data = rows(*ep);
    const std::size_t n = data.size() / dim;
    for (std::size_t t = 0; t < n; ++t) {
      for (int d = 0; d < dim; ++d) {
        const double diff = data[t * dim + d] - m.mean[d];
        m.std[d] += diff * diff;
      }
    }
  }
  for (auto& v : m.std) v = std::max(std::sqrt(v / static_cast<double>(count)), kStdFloor);
  return m;
}

void check_dim(std::size_t got, const Moments& m) {
  if (got != m.size()) {
    throw std::invalid_argument("dimension mismatch: vector has " + std::to_string(got) +
                                " entries, statistics have " + std::to_string(m.size()));
  }
}

nlohmann::json moments_json(const Moments& m) { return {{"mean", m.mean}, {"std", m.std}}; }

Moments moments_from_json(const nlohmann::json& j) {
  Moments m{j.at("mean").get<std::vector<double>>(), j.at("std").get<std::vector<double>>()};
  if (m.mean.size() != m.std.size()) throw ValidationError("norm stats mean/std size mismatch");
  for (double s : m.std) {
    if (!(s >= kStdFloor) || !std::isfinite(s)) throw ValidationError("norm stats std below floor");
  }
  return m;
}

}  // namespace

NormStats compute_norm_stats(std::span<const Episode* const> episodes) {
  if (episodes.empty()) throw EmptyDatasetError("empty dataset: no episodes");
  NormStats s;
  s.joints = moments_of(episodes, kJointDim, [](const Episode& e) -> const auto& { return e.joints; });
  s.forces = moments_of(episodes, kForceDim, [](const Episode& e) -> const auto& { return e.forces; });
  s.actions =
      moments_of(episodes, kActionDim, [](const Episode& e) -> const auto& { return e.actions; });
  return s;
}

NormStats compute_norm_stats(std::span<const Episode> episodes) {
  std::vector<const Episode*> ptrs;
  ptrs.reserve(episodes.size());
  for (const auto& e : episodes) ptrs.push_back(&e);
  return compute_norm_stats(std::span<const Episode* const>(ptrs));
}

std::vector<double> normalize(std::span<const double> x, const Moments& m) {
  check_dim(x.size(), m);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m.mean[i]) / m.std[i];
  return out;
}

std::vector<double> normalize(std::span<const float> x, const Moments& m) {
  check_dim(x.size(), m);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m.mean[i]) / m.std[i];
  return out;
}

std::vector<double> denormalize(std::span<const double> x, const Moments& m) {
  check_dim(x.size(), m);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * m.std[i] + m.mean[i];
  return out;
}

nlohmann::json to_json(const NormStats& stats) {
  return {{"joints", moments_json(stats.joints)},
          {"forces", moments_json(stats.forces)},
          {"actions", moments_json(stats.actions)}};
}

NormStats norm_stats_from_json(const nlohmann::json& j) {
  try {
    NormStats s{moments_from_json(j.at("joints")), moments_from_json(j.at("forces")),
                moments_from_json(j.at("actions"))};
    if (s.joints.size() != kJointDim || s.forces.size() != kForceDim ||
        s.actions.size() != kActionDim) {
      throw ValidationError("norm stats have wrong dimensions");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed norm stats: ") + e.what());
  }
}

}  // namespace hact::data
