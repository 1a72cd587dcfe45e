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

// Fingertip force estimation from hand motor readings and the force to
// glove duty-cycle map used for haptic rendering.

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hact/error.hpp"

namespace hact::haptics {

enum class Finger : int { kThumb = 0, kIndex = 1, kMiddle = 2, kRing = 3, kPinky = 4 };

inline constexpr int kFingerCount = 5;
inline constexpr std::array<Finger, kFingerCount> kAllFingers = {
    Finger::kThumb, Finger::kIndex, Finger::kMiddle, Finger::kRing, Finger::kPinky};

std::string_view finger_name(Finger finger);

// Accepts "thumb".."pinky". Throws std::invalid_argument otherwise.
Finger parse_finger(std::string_view name);

// Throws std::invalid_argument unless 0 <= index < kFingerCount.
Finger finger_from_index(int index);

/// Cubic f(v) = a v^3 + b v^2 + c v + d, v in raw motor units, f in newtons.
struct CubicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double operator()(double v) const { return ((a * v + b) * v + c) * v + d; }
  bool operator==(const CubicCoefficients&) const = default;
};

/// One cubic per finger, thumb..pinky. Immutable once built.
class ForceCalibration {
 public:
  ForceCalibration() = default;
  // Throws std::invalid_argument if any coefficient is non-finite.
  explicit ForceCalibration(const std::array<CubicCoefficients, kFingerCount>& fingers);

  // Regression measured on the Inspire hand with a force gauge.
  static ForceCalibration reference();

  const CubicCoefficients& operator[](Finger finger) const {
    return fingers_[static_cast<int>(finger)];
  }
  const std::array<CubicCoefficients, kFingerCount>& fingers() const { return fingers_; }

  bool operator==(const ForceCalibration&) const = default;

 private:
  std::array<CubicCoefficients, kFingerCount> fingers_{};
};

/// Square-root force to duty law, duty = sqrt((f - m) / n).
struct DutyParams {
  double m = 1.72e-3;
  double n = 2.57;

  // Throws std::invalid_argument unless n > 0 and both are finite.
  void validate() const;
  bool operator==(const DutyParams&) const = default;
};

struct GaugeSample {
  Finger finger = Finger::kThumb;
  double motor_value = 0.0;
  double force_n = 0.0;
};

// Raised by fit_calibration when a finger has fewer than four distinct
// motor values.
class UnderdeterminedFitError : public Error {
 public:
  UnderdeterminedFitError(Finger finger, int distinct_values);
  Finger finger() const { return finger_; }

 private:
  Finger finger_;
};

/// Contact force for one finger, clamped at zero. The raw regressions for
/// index, middle and ring go negative near v = 0.
double motor_to_force(const ForceCalibration& calib, Finger finger, double motor_value);
double motor_to_force(const ForceCalibration& calib, int finger_index, double motor_value);

/// Per-finger least-squares cubic through the gauge samples.
ForceCalibration fit_calibration(std::span<const GaugeSample> samples);

/// Duty fraction in [0, 1]; forces outside [m, m + n] saturate.
double force_to_duty(const DutyParams& params, double force_n);

// calib.json: {"fingers": {"thumb": {"a":..,"b":..,"c":..,"d":..}, ...},
//              "duty": {"m":.., "n":..}}
struct HapticsConfig {
  ForceCalibration calibration = ForceCalibration::reference();
  DutyParams duty{};
};

HapticsConfig load_haptics_config(const std::filesystem::path& path);
void save_haptics_config(const HapticsConfig& config, const std::filesystem::path& path);

// CSV with header `finger,motor_value,force_n`.
std::vector<GaugeSample> read_gauge_csv(const std::filesystem::path& path);
void write_gauge_csv(std::span<const GaugeSample> samples, const std::filesystem::path& path);

}  // namespace hact::haptics
