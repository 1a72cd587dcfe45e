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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

namespace hact::haptics {

namespace {

constexpr std::array<std::string_view, kFingerCount> kFingerNames = {"thumb", "index", "middle",
                                                                      "ring", "pinky"};

// Motor values are scaled by this before building the Vandermonde columns so
// the normal matrix stays well conditioned over the 0..2000 motor range.
constexpr double kMotorScale = 1e-3;

bool all_finite(const CubicCoefficients& c) {
  return std::isfinite(c.a) && std::isfinite(c.b) && std::isfinite(c.c) && std::isfinite(c.d);
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

std::string_view finger_name(Finger finger) { return kFingerNames.at(static_cast<int>(finger)); }

Finger parse_finger(std::string_view name) {
  for (int i = 0; i < kFingerCount; ++i) {
    if (kFingerNames[i] == name) return static_cast<Finger>(i);
  }
  throw std::invalid_argument("unknown finger '" + std::string(name) + "'");
}

Finger finger_from_index(int index) {
  if (index < 0 || index >= kFingerCount) {
    throw std::invalid_argument("unknown finger id " + std::to_string(index));
  }
  return static_cast<Finger>(index);
}

ForceCalibration::ForceCalibration(const std::array<CubicCoefficients, kFingerCount>& fingers)
    : fingers_(fingers) {
  for (int i = 0; i < kFingerCount; ++i) {
    if (!all_finite(fingers_[i])) {
      throw std::invalid_argument("non-finite calibration coefficient for finger " +
                                  std::string(kFingerNames[i]));
    }
  }
}

ForceCalibration ForceCalibration::reference() {
  return ForceCalibration({{
      {2.25e-9, -5.28e-6, 8.03e-3, 3.23e-1},     // thumb
      {3.23e-10, -4.18e-7, 2.05e-3, -2.11e-2},   // index
      {5.51e-10, -1.88e-6, 3.45e-4, -3.76e-2},   // middle
      {-4.98e-10, 2.40e-6, 1.71e-3, -1.13e-2},   // ring
      {0.0, 5.73e-7, 1.43e-3, 2.39e-2},          // pinky
  }});
}

void DutyParams::validate() const {
  if (!std::isfinite(m) || !std::isfinite(n) || !(n > 0.0)) {
    throw std::invalid_argument("duty parameters require finite m and n > 0");
  }
}

UnderdeterminedFitError::UnderdeterminedFitError(Finger finger, int distinct_values)
    : Error("under-determined cubic fit for finger '" + std::string(finger_name(finger)) +
            "': " + std::to_string(distinct_values) + " distinct motor values, need 4"),
      finger_(finger) {}

double motor_to_force(const ForceCalibration& calib, Finger finger, double motor_value) {
  const int index = static_cast<int>(finger);
  if (index < 0 || index >= kFingerCount) {
    throw std::invalid_argument("unknown finger id " + std::to_string(index));
  }
  if (!(motor_value >= 0.0)) {
    throw std::invalid_argument("motor value must be >= 0");
  }
  return std::max(0.0, calib[finger](motor_value));
}

double motor_to_force(const ForceCalibration& calib, int finger_index, double motor_value) {
  return motor_to_force(calib, finger_from_index(finger_index), motor_value);
}

ForceCalibration fit_calibration(std::span<const GaugeSample> samples) {
  std::array<CubicCoefficients, kFingerCount> fitted{};
  for (Finger finger : kAllFingers) {
    std::vector<const GaugeSample*> rows;
    std::set<double> distinct;
    for (const auto& s : samples) {
      if (s.finger != finger) continue;
      if (!(s.motor_value >= 0.0) || !(s.force_n >= 0.0)) {
        throw ValidationError("gauge sample for finger '" + std::string(finger_name(finger)) +
                              "' has negative or non-finite value");
      }
      rows.push_back(&s);
      distinct.insert(s.motor_value);
    }
    if (distinct.size() < 4) {
      throw UnderdeterminedFitError(finger, static_cast<int>(distinct.size()));
    }

    Eigen::MatrixXd design(rows.size(), 4);
    Eigen::VectorXd forces(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double s = rows[r]->motor_value * kMotorScale;
      design(r, 0) = s * s * s;
      design(r, 1) = s * s;
      design(r, 2) = s;
      design(r, 3) = 1.0;
      forces(r) = rows[r]->force_n;
    }
    const Eigen::Matrix4d normal = design.transpose() * design;
    const Eigen::Vector4d rhs = design.transpose() * forces;
    const Eigen::Vector4d x = normal.ldlt().solve(rhs);

    fitted[static_cast<int>(finger)] = {x(0) * kMotorScale * kMotorScale * kMotorScale,
                                        x(1) * kMotorScale * kMotorScale, x(2) * kMotorScale,
                                        x(3)};
  }
  return ForceCalibration(fitted);
}

double force_to_duty(const DutyParams& params, double force_n) {
  const double ratio = (force_n - params.m) / params.n;
  if (!(ratio > 0.0)) return 0.0;
  if (ratio >= 1.0) return 1.0;
  return std::sqrt(ratio);
}

HapticsConfig load_haptics_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open calibration file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed calibration file " + path.string() + ": " + e.what());
  }

  HapticsConfig config;
  try {
    std::array<CubicCoefficients, kFingerCount> fingers{};
    const auto& section = doc.at("fingers");
    for (int i = 0; i < kFingerCount; ++i) {
      const auto& f = section.at(std::string(kFingerNames[i]));
      fingers[i] = {f.at("a").get<double>(), f.at("b").get<double>(), f.at("c").get<double>(),
                    f.at("d").get<double>()};
    }
    config.calibration = ForceCalibration(fingers);
    if (doc.contains("duty")) {
      config.duty.m = doc["duty"].at("m").get<double>();
      config.duty.n = doc["duty"].at("n").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("calibration file " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError("calibration file " + path.string() + ": " + e.what());
  }
  try {
    config.duty.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError("calibration file " + path.string() + ": " + e.what());
  }
  return config;
}

void save_haptics_config(const HapticsConfig& config, const std::filesystem::path& path) {
  nlohmann::json doc;
  for (int i = 0; i < kFingerCount; ++i) {
    const auto& c = config.calibration.fingers()[i];
    doc["fingers"][std::string(kFingerNames[i])] = {{"a", c.a}, {"b", c.b}, {"c", c.c}, {"d", c.d}};
  }
  doc["duty"] = {{"m", config.duty.m}, {"n", config.duty.n}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write calibration file " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<GaugeSample> read_gauge_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gauge samples " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "finger,motor_value,force_n") {
    throw ValidationError(path.string() + ": expected header 'finger,motor_value,force_n'");
  }
  std::vector<GaugeSample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string finger, motor, force;
    if (!std::getline(ss, finger, ',') || !std::getline(ss, motor, ',') ||
        !std::getline(ss, force)) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    try {
      GaugeSample s{parse_finger(trim(finger)), std::stod(motor), std::stod(force)};
      if (!(s.motor_value >= 0.0) || !(s.force_n >= 0.0)) {
        throw std::invalid_argument("negative value");
      }
      samples.push_back(s);
    } catch (const std::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

void write_gauge_csv(std::span<const GaugeSample> samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write gauge samples " + path.string());
  out << "finger,motor_value,force_n\n";
  out.precision(17);
  for (const auto& s : samples) {
    out << finger_name(s.finger) << ',' << s.motor_value << ',' << s.force_n << '\n';
  }
}

}  // namespace hact::haptics
