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

#include "hact/simworld/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hact::sim {

namespace {

using Eigen::Vector3d;

struct Color {
  double r, g, b;
};

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vector3d normal = Vector3d::UnitZ();
  Color color{0, 0, 0};
};

struct Box {
  Eigen::Isometry3d frame;  // centre and orientation
  Vector3d half;
  Color color;
  Eigen::Isometry3d inverse = frame.inverse();
};

struct Capsule {
  Vector3d a, b;
  double radius;
  Color color;
};

struct Scene {
  std::vector<Box> boxes;
  std::vector<Capsule> capsules;
};

constexpr Color kSky{28, 30, 42};
constexpr Color kTable{170, 168, 155};
constexpr Color kBasket{140, 92, 44};
constexpr Color kBlock{205, 35, 30};
constexpr Color kArm{205, 205, 215};
constexpr Color kPalm{60, 62, 72};
constexpr Color kFinger{235, 200, 80};
constexpr Color kThumb{80, 190, 230};

Vector3d light_direction() { return Vector3d(0.4, 0.3, 1.0).normalized(); }

void intersect_box(const Box& box, const Vector3d& origin, const Vector3d& dir, Hit& hit) {
  const Eigen::Isometry3d& inv = box.inverse;
  const Vector3d o = inv * origin;
  const Vector3d d = inv.linear() * dir;
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int axis = -1;
  double sign = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d(i)) < 1e-12) {
      if (std::abs(o(i)) > box.half(i)) return;
      continue;
    }
    double t1 = (-box.half(i) - o(i)) / d(i);
    double t2 = (box.half(i) - o(i)) / d(i);
    double s = -1.0;
    if (t1 > t2) {
      std::swap(t1, t2);
      s = 1.0;
    }
    if (t1 > t_near) {
      t_near = t1;
      axis = i;
      sign = s;
    }
    t_far = std::min(t_far, t2);
    if (t_near > t_far) return;
  }
  if (axis < 0 || t_near <= 1e-9 || t_near >= hit.t) return;
  Vector3d n = Vector3d::Zero();
  n(axis) = sign;
  hit.t = t_near;
  hit.normal = box.frame.linear() * n;
  hit.color = box.color;
}

void intersect_capsule(const Capsule& cap, const Vector3d& ro, const Vector3d& rd, Hit& hit) {
  const Vector3d ba = cap.b - cap.a;
  const Vector3d oa = ro - cap.a;
  const double baba = ba.dot(ba);
  const double ra2 = cap.radius * cap.radius;
  double t = -1.0;

  if (baba > 1e-12) {
    const double bard = ba.dot(rd);
    const double baoa = ba.dot(oa);
    const double rdoa = rd.dot(oa);
    const double oaoa = oa.dot(oa);
    const double a = baba - bard * bard;
    const double b = baba * rdoa - baoa * bard;
    const double c = baba * oaoa - baoa * baoa - ra2 * baba;
    if (a > 1e-12) {
      const double h = b * b - a * c;
      if (h >= 0.0) {
        const double tb = (-b - std::sqrt(h)) / a;
        const double y = baoa + tb * bard;
        if (y > 0.0 && y < baba) t = tb;
      }
    }
  }
  if (t <= 0.0) {
    // End caps.
    for (const Vector3d* centre : {&cap.a, &cap.b}) {
      const Vector3d oc = ro - *centre;
      const double b = rd.dot(oc);
      const double c = oc.dot(oc) - ra2;
      const double h = b * b - c;
      if (h > 0.0) {
        const double ts = -b - std::sqrt(h);
        if (ts > 1e-9 && (t <= 0.0 || ts < t)) t = ts;
      }
    }
  }
  if (t <= 1e-9 || t >= hit.t) return;
  const Vector3d p = ro + t * rd;
  const double s = baba > 1e-12 ? std::clamp((p - cap.a).dot(ba) / baba, 0.0, 1.0) : 0.0;
  hit.t = t;
  hit.normal = (p - (cap.a + s * ba)).normalized();
  hit.color = cap.color;
}

Scene build_scene(const Simulator& sim, const SimState& state) {
  const SimConfig& cfg = sim.config();
  Scene scene;

  // Basket: floor plus four walls.
  const Vector3d bc(cfg.basket_center[0], cfg.basket_center[1], cfg.basket_center[2]);
  const double inner = cfg.basket_inner_half;
  const double th = cfg.basket_wall_thickness;
  const double h = cfg.basket_wall_height;
  auto add_box = [&](const Vector3d& centre, const Vector3d& half, Color color) {
    Eigen::Isometry3d f = Eigen::Isometry3d::Identity();
    f.translation() = centre;
    scene.boxes.push_back({f, half, color});
  };
  add_box(bc + Vector3d(0, 0, 0.002), Vector3d(inner + th, inner + th, 0.002), kBasket);
  add_box(bc + Vector3d(inner + th / 2, 0, h / 2), Vector3d(th / 2, inner + th, h / 2), kBasket);
  add_box(bc + Vector3d(-inner - th / 2, 0, h / 2), Vector3d(th / 2, inner + th, h / 2), kBasket);
  add_box(bc + Vector3d(0, inner + th / 2, h / 2), Vector3d(inner, th / 2, h / 2), kBasket);
  add_box(bc + Vector3d(0, -inner - th / 2, h / 2), Vector3d(inner, th / 2, h / 2), kBasket);

  if (state.object_present) {
    scene.boxes.push_back({sim.object_frame(state), Vector3d::Constant(cfg.block_half_extent),
                           kBlock});
  }

  const auto origins = sim.kinematics().joint_origins(state.arm);
  for (std::size_t i = 0; i + 1 < origins.size(); ++i) {
    if ((origins[i + 1] - origins[i]).norm() < 1e-9) continue;
    const double radius = i + 2 >= origins.size() ? 0.025 : 0.035;
    scene.capsules.push_back({origins[i], origins[i + 1], radius, kArm});
  }

  const Eigen::Isometry3d hand = sim.hand_frame(state);
  Eigen::Isometry3d palm = hand;
  palm.translate(Vector3d(0.0, 0.0, cfg.palm_depth * 0.5));
  scene.boxes.push_back({palm,
                         Vector3d(cfg.finger_base_offset + 0.01, 0.035, cfg.palm_depth * 0.5),
                         kPalm});

  const HandGeometry g = sim.hand_geometry(hand, state.hand);
  for (int f = 0; f < kFingerCount; ++f) {
    scene.capsules.push_back({g.roots[f], g.tips[f], cfg.tip_radius, f == 0 ? kThumb : kFinger});
  }
  return scene;
}

struct View {
  Vector3d eye, forward, right, up;
  double tan_half_fov;
};

View look_at(const Vector3d& eye, const Vector3d& target, const Vector3d& up_hint,
             double fov_deg) {
  View v;
  v.eye = eye;
  v.forward = (target - eye).normalized();
  v.right = v.forward.cross(up_hint).normalized();
  v.up = v.right.cross(v.forward);
  v.tan_half_fov = std::tan(fov_deg * M_PI / 360.0);
  return v;
}

View camera_view(const Simulator& sim, const SimState& state, Camera camera) {
  if (camera == Camera::kFront) {
    return look_at(Vector3d(0.95, -0.03, 0.48), Vector3d(0.40, -0.03, 0.06), Vector3d::UnitZ(), 48.0);
  }
  // Wrist camera sits under the palm looking along the approach axis.
  const Eigen::Isometry3d hand = sim.hand_frame(state);
  const Vector3d eye = hand * Vector3d(0.0, 0.0, sim.config().palm_depth + 0.002);
  const Vector3d fwd = hand.linear() * Vector3d::UnitZ();
  const Vector3d up = hand.linear() * Vector3d::UnitX();
  return look_at(eye, eye + fwd, up, 80.0);
}

}  // namespace

std::string_view camera_name(Camera camera) {
  return camera == Camera::kFront ? "front" : "wrist";
}

Camera parse_camera(std::string_view name) {
  if (name == "front") return Camera::kFront;
  if (name == "wrist") return Camera::kWrist;
  throw std::invalid_argument("unknown camera '" + std::string(name) + "'");
}

Image render(const Simulator& sim, const SimState& state, Camera camera) {
  const SimConfig& cfg = sim.config();
  Image img;
  img.height = cfg.image_height;
  img.width = cfg.image_width;
  img.rgb.resize(static_cast<std::size_t>(img.height) * img.width * 3);

  const Scene scene = build_scene(sim, state);
  const View view = camera_view(sim, state, camera);
  const double aspect = static_cast<double>(img.width) / img.height;
  const Vector3d light = light_direction();

  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      const double u = ((col + 0.5) / img.width * 2.0 - 1.0) * view.tan_half_fov * aspect;
      const double v = (1.0 - (row + 0.5) / img.height * 2.0) * view.tan_half_fov;
      const Vector3d dir = (view.forward + u * view.right + v * view.up).normalized();

      Hit hit;
      if (dir.z() < -1e-12) {
        const double t = -view.eye.z() / dir.z();
        if (t > 1e-9) {
          hit.t = t;
          hit.normal = Vector3d::UnitZ();
          hit.color = kTable;
        }
      }
      for (const auto& box : scene.boxes) intersect_box(box, view.eye, dir, hit);
      for (const auto& cap : scene.capsules) intersect_capsule(cap, view.eye, dir, hit);

      Color c = kSky;
      if (std::isfinite(hit.t)) {
        Vector3d n = hit.normal;
        if (n.dot(dir) > 0.0) n = -n;
        const double shade = 0.35 + 0.65 * std::max(0.0, n.dot(light));
        c = {hit.color.r * shade, hit.color.g * shade, hit.color.b * shade};
      }
      const std::size_t idx = (static_cast<std::size_t>(row) * img.width + col) * 3;
      img.rgb[idx + 0] = static_cast<std::uint8_t>(std::clamp(std::lround(c.r), 0L, 255L));
      img.rgb[idx + 1] = static_cast<std::uint8_t>(std::clamp(std::lround(c.g), 0L, 255L));
      img.rgb[idx + 2] = static_cast<std::uint8_t>(std::clamp(std::lround(c.b), 0L, 255L));
    }
  }
  return img;
}

}  // namespace hact::sim
