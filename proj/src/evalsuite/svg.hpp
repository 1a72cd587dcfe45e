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

#include <string>
#include <vector>

namespace hact::eval::svg {

struct Series {
  std::string name;
  std::string color;
  std::vector<double> y;  // x is the sample index
};

struct Box {
  double median, q1, q3, whisker_low, whisker_high;
};

struct BoxGroup {
  std::string label;
  std::vector<Box> boxes;  // one per series, same order as the legend
};

struct Frame {
  double x = 0, y = 0, width = 640, height = 360;
};

// <g> fragments placed inside `frame`.
std::string line_panel(const Frame& frame, const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);
std::string box_panel(const Frame& frame, const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& names, const std::vector<std::string>& colors,
                      const std::vector<BoxGroup>& groups);

std::string document(double width, double height, const std::string& body);

}  // namespace hact::eval::svg
