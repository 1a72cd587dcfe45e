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

#include "hact/evalsuite/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hact::eval {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

BoxStats box_stats(std::vector<double> samples) {
  BoxStats b;
  b.count = samples.size();
  if (samples.empty()) return b;
  std::sort(samples.begin(), samples.end());
  b.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(b.count);
  b.q1 = quantile(samples, 0.25);
  b.median = quantile(samples, 0.5);
  b.q3 = quantile(samples, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo = b.q1 - 1.5 * iqr;
  const double hi = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  for (double v : samples) {
    if (v < lo || v > hi) {
      b.outliers.push_back(v);
    } else {
      b.whisker_low = std::min(b.whisker_low, v);
      b.whisker_high = std::max(b.whisker_high, v);
    }
  }
  return b;
}

ForceMetrics force_metrics(std::span<const data::Episode* const> episodes) {
  if (episodes.empty()) throw EmptyDatasetError("force metrics need at least one episode");
  ForceMetrics m;
  std::int64_t longest = 0;
  for (const auto* ep : episodes) longest = std::max(longest, ep->length());
  std::vector<double> curve_sum(longest, 0.0);
  std::vector<int> curve_n(longest, 0);
  std::array<std::vector<double>, data::kForceDim> samples;
  double grasp_sum = 0.0;
  std::size_t grasp_n = 0;

  for (const auto* ep : episodes) {
    for (std::int64_t t = 0; t < ep->length(); ++t) {
      const auto f = ep->forces_at(t);
      double mean = 0.0;
      bool contact = false;
      for (int i = 0; i < data::kForceDim; ++i) {
        mean += f[i];
        contact = contact || f[i] > 0.0f;
      }
      curve_sum[t] += mean / data::kForceDim;
      ++curve_n[t];
      if (!contact) continue;
      ++m.grasp_steps;
      for (int i = 0; i < data::kForceDim; ++i) {
        samples[i].push_back(f[i]);
        grasp_sum += f[i];
        ++grasp_n;
      }
    }
  }
  m.mean_curve.resize(longest);
  for (std::int64_t t = 0; t < longest; ++t) m.mean_curve[t] = curve_sum[t] / curve_n[t];
  for (int i = 0; i < data::kForceDim; ++i) m.fingers[i] = box_stats(std::move(samples[i]));
  m.grasp_mean = grasp_n ? grasp_sum / static_cast<double>(grasp_n) : 0.0;
  return m;
}

ForceMetrics force_metrics(std::span<const data::Episode> episodes) {
  std::vector<const data::Episode*> ptrs;
  for (const auto& e : episodes) ptrs.push_back(&e);
  return force_metrics(std::span<const data::Episode* const>(ptrs));
}

JointTrace joint_trace_compare(const data::Episode& policy, const data::Episode& demo) {
  JointTrace jt;
  jt.length = std::min(policy.length(), demo.length());
  constexpr int kFirstHand = data::kJointDim - kHandJoints;
  for (int j = 0; j < kHandJoints; ++j) {
    double sq = 0.0;
    for (std::int64_t t = 0; t < jt.length; ++t) {
      const double p = policy.joints_at(t)[kFirstHand + j];
      const double d = demo.joints_at(t)[kFirstHand + j];
      jt.policy[j].push_back(p);
      jt.demo[j].push_back(d);
      sq += (p - d) * (p - d);
    }
    jt.rms[j] = jt.length ? std::sqrt(sq / static_cast<double>(jt.length)) : 0.0;
  }
  return jt;
}

}  // namespace hact::eval
