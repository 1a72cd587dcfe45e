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

#include "hact/haptics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

namespace hact::haptics {
namespace {

std::vector<GaugeSample> exact_samples(const ForceCalibration& truth, int per_finger) {
  std::vector<GaugeSample> out;
  for (Finger f : kAllFingers) {
    for (int i = 0; i < per_finger; ++i) {
      const double v = 2000.0 * i / (per_finger - 1);
      out.push_back({f, v, truth[f](v) > 0 ? truth[f](v) : 0.0});
    }
  }
  return out;
}

// Thumb regression plus scaled copies of it, positive over [0, 2000] so
// noiseless samples need no clamping.
ForceCalibration positive_reference() {
  const auto thumb = ForceCalibration::reference()[Finger::kThumb];
  std::array<CubicCoefficients, kFingerCount> fingers{};
  const std::array<double, kFingerCount> scale = {1.0, 0.5, 0.4, 0.3, 0.2};
  for (int i = 0; i < kFingerCount; ++i) {
    fingers[i] = {thumb.a * scale[i], thumb.b * scale[i], thumb.c * scale[i], thumb.d * scale[i]};
  }
  return ForceCalibration(fingers);
}

TEST(MotorToForce, ThumbAtZeroIsTheConstantTerm) {
  EXPECT_DOUBLE_EQ(motor_to_force(ForceCalibration::reference(), Finger::kThumb, 0.0), 0.323);
}

TEST(MotorToForce, ThumbAtThousandMatchesHandEvaluation) {
  // 2.25e-9*1e9 - 5.28e-6*1e6 + 8.03e-3*1e3 + 0.323
  const double expected = 5.323;
  const double got = motor_to_force(ForceCalibration::reference(), Finger::kThumb, 1000.0);
  EXPECT_NEAR(got, expected, 1e-9 * expected);
}

TEST(MotorToForce, NegativeRegressionClampsToZero) {
  EXPECT_EQ(motor_to_force(ForceCalibration::reference(), Finger::kIndex, 0.0), 0.0);
}

TEST(MotorToForce, RejectsUnknownFingerAndNegativeMotorValue) {
  const auto calib = ForceCalibration::reference();
  EXPECT_THROW(motor_to_force(calib, 5, 10.0), std::invalid_argument);
  EXPECT_THROW(motor_to_force(calib, -1, 10.0), std::invalid_argument);
  EXPECT_THROW(parse_finger("toe"), std::invalid_argument);
  EXPECT_THROW(motor_to_force(calib, Finger::kRing, -1.0), std::invalid_argument);
}

TEST(MotorToForce, NonNegativeForAllFingersProperty) {
  const auto calib = ForceCalibration::reference();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> motor(0.0, 4000.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = motor(rng);
    for (Finger f : kAllFingers) ASSERT_GE(motor_to_force(calib, f, v), 0.0) << v;
  }
}

TEST(ForceCalibration, RejectsNonFiniteCoefficients) {
  auto fingers = ForceCalibration::reference().fingers();
  fingers[2].b = std::nan("");
  EXPECT_THROW(ForceCalibration{fingers}, std::invalid_argument);
}

TEST(FitCalibration, NoiselessSamplesRecoverThumbCoefficients) {
  const auto truth = ForceCalibration::reference();
  const auto fitted = fit_calibration(exact_samples(positive_reference(), 20));
  const auto& want = positive_reference()[Finger::kThumb];
  const auto& got = fitted[Finger::kThumb];
  EXPECT_NEAR(got.a, want.a, 1e-6 * std::abs(want.a));
  EXPECT_NEAR(got.b, want.b, 1e-6 * std::abs(want.b));
  EXPECT_NEAR(got.c, want.c, 1e-6 * std::abs(want.c));
  EXPECT_NEAR(got.d, want.d, 1e-6 * std::abs(want.d));
  EXPECT_EQ(truth[Finger::kThumb], want);
}

TEST(FitCalibration, ExactCubicReproducesPredictions) {
  const auto truth = positive_reference();
  const auto fitted = fit_calibration(exact_samples(truth, 12));
  for (Finger f : kAllFingers) {
    for (double v = 0.0; v <= 2000.0; v += 25.0) {
      ASSERT_NEAR(fitted[f](v), truth[f](v), 1e-9) << finger_name(f) << " v=" << v;
    }
  }
}

TEST(FitCalibration, SingleMotorValueIsUnderdetermined) {
  std::vector<GaugeSample> samples = exact_samples(positive_reference(), 8);
  for (auto& s : samples) {
    if (s.finger == Finger::kMiddle) s.motor_value = 500.0;
  }
  try {
    fit_calibration(samples);
    FAIL() << "expected UnderdeterminedFitError";
  } catch (const UnderdeterminedFitError& e) {
    EXPECT_EQ(e.finger(), Finger::kMiddle);
    EXPECT_NE(std::string(e.what()).find("middle"), std::string::npos);
  }
}

TEST(FitCalibration, ThreeDistinctValuesIsUnderdetermined) {
  std::vector<GaugeSample> samples = exact_samples(positive_reference(), 8);
  std::erase_if(samples, [](const GaugeSample& s) { return s.finger == Finger::kPinky; });
  for (double v : {100.0, 200.0, 300.0, 300.0, 200.0}) samples.push_back({Finger::kPinky, v, 1.0});
  EXPECT_THROW(fit_calibration(samples), UnderdeterminedFitError);
}

TEST(FitCalibration, NoisyThumbFitStaysWithinTenPercent) {
  const auto truth = positive_reference();
  std::vector<GaugeSample> samples = exact_samples(truth, 8);
  std::erase_if(samples, [](const GaugeSample& s) { return s.finger == Finger::kThumb; });

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> motor(0.0, 2000.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  double lo = 2000.0, hi = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double v = motor(rng);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    samples.push_back({Finger::kThumb, v, std::max(0.0, truth[Finger::kThumb](v) + noise(rng))});
  }
  const auto fitted = fit_calibration(samples);
  for (int i = 0; i <= 200; ++i) {
    const double v = lo + (hi - lo) * i / 200.0;
    const double want = truth[Finger::kThumb](v);
    ASSERT_NEAR(fitted[Finger::kThumb](v), want, 0.10 * want) << "v=" << v;
  }
}

TEST(ForceToDuty, Endpoints) {
  const DutyParams p;
  EXPECT_NEAR(force_to_duty(p, 1.72e-3), 0.0, 1e-9);
  EXPECT_NEAR(force_to_duty(p, 2.57172), 1.0, 1e-9);
  // m + 0.25 n
  EXPECT_NEAR(force_to_duty(p, 0.64422), 0.5, 1e-9);
}

TEST(ForceToDuty, ClampsOutsideRange) {
  const DutyParams p;
  EXPECT_EQ(force_to_duty(p, -3.0), 0.0);
  EXPECT_EQ(force_to_duty(p, 0.0), 0.0);
  EXPECT_EQ(force_to_duty(p, 50.0), 1.0);
}

TEST(ForceToDuty, MonotoneAndBoundedProperty) {
  const DutyParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> force(-1.0, 4.0);
  std::vector<double> fs(10000);
  for (auto& f : fs) f = force(rng);
  std::sort(fs.begin(), fs.end());
  double prev = -1.0;
  for (double f : fs) {
    const double d = force_to_duty(p, f);
    ASSERT_GE(d, 0.0);
    ASSERT_LE(d, 1.0);
    ASSERT_GE(d, prev) << f;
    prev = d;
  }
}

TEST(ForceToDuty, InverseRoundTrip) {
  const DutyParams p;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> duty(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double d = duty(rng);
    ASSERT_NEAR(force_to_duty(p, p.m + p.n * d * d), d, 1e-12);
  }
}

TEST(DutyParams, RejectsNonPositiveScale) {
  EXPECT_THROW((DutyParams{0.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((DutyParams{0.0, -1.0}.validate()), std::invalid_argument);
}

TEST(CalibrationFile, ShippedDefaultMatchesReference) {
  const auto config = load_haptics_config(std::filesystem::path(HACT_SOURCE_DIR) / "config/calib.json");
  EXPECT_EQ(config.calibration, ForceCalibration::reference());
  EXPECT_EQ(config.duty, DutyParams{});
}

TEST(CalibrationFile, SaveLoadRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "hact_calib_roundtrip.json";
  HapticsConfig config;
  config.calibration = positive_reference();
  config.duty = {0.01, 3.0};
  save_haptics_config(config, path);
  const auto loaded = load_haptics_config(path);
  EXPECT_EQ(loaded.calibration, config.calibration);
  EXPECT_EQ(loaded.duty, config.duty);
}

TEST(GaugeCsv, ParsesFixtureAndRejectsBadHeader) {
  const auto samples = read_gauge_csv(std::filesystem::path(HACT_FIXTURE_DIR) / "gauge_samples.csv");
  ASSERT_FALSE(samples.empty());
  EXPECT_NO_THROW(fit_calibration(samples));

  const auto bad = std::filesystem::temp_directory_path() / "hact_bad_gauge.csv";
  {
    std::ofstream out(bad);
    out << "finger,value\nthumb,1\n";
  }
  EXPECT_THROW(read_gauge_csv(bad), ValidationError);
}

}  // namespace
}  // namespace hact::haptics
