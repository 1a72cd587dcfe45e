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

#include "hact/datastore/episode.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace hact::data {

static_assert(std::endian::native == std::endian::little,
              "episode files are written in host order and require a little-endian host");

namespace {

constexpr char kMagic[4] = {'H', 'A', 'X', 'E'};
constexpr std::size_t kPreambleBytes = 4 + 1 + 4;

nlohmann::json metadata_json(const EpisodeMetadata& m) {
  return {{"rate_hz", m.rate_hz}, {"source", m.source}, {"seed", m.seed}, {"success", m.success}};
}

EpisodeMetadata metadata_from_json(const nlohmann::json& j) {
  EpisodeMetadata m;
  m.rate_hz = j.at("rate_hz").get<double>();
  m.source = j.at("source").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.success = j.at("success").get<bool>();
  return m;
}

struct ArraySpec {
  std::string name;
  std::string dtype;
  std::vector<std::int64_t> shape;

  std::size_t bytes() const {
    std::size_t n = dtype == "uint8" ? 1 : 4;
    for (auto d : shape) n *= static_cast<std::size_t>(d);
    return n;
  }
};

struct Header {
  std::int64_t length = 0;
  std::vector<std::string> cameras;
  std::vector<ArraySpec> arrays;
  EpisodeMetadata metadata;
};

Header parse_header(const std::string& text, const std::filesystem::path& path) {
  Header h;
  try {
    const auto j = nlohmann::json::parse(text);
    h.length = j.at("length").get<std::int64_t>();
    h.cameras = j.at("cameras").get<std::vector<std::string>>();
    for (const auto& a : j.at("arrays")) {
      h.arrays.push_back({a.at("name").get<std::string>(), a.at("dtype").get<std::string>(),
                          a.at("shape").get<std::vector<std::int64_t>>()});
    }
    h.metadata = metadata_from_json(j.at("metadata"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": malformed episode header: " + e.what());
  }
  if (h.length <= 0) throw ValidationError(path.string() + ": episode length must be > 0");
  const std::size_t expected_arrays = h.cameras.size() + 3;
  if (h.arrays.size() != expected_arrays) {
    throw ValidationError(path.string() + ": expected " + std::to_string(expected_arrays) +
                          " arrays, header declares " + std::to_string(h.arrays.size()));
  }
  for (std::size_t i = 0; i < h.arrays.size(); ++i) {
    const auto& a = h.arrays[i];
    const bool image = i < h.cameras.size();
    const std::string want_dtype = image ? "uint8" : "float32";
    if (a.dtype != want_dtype) {
      throw ValidationError(path.string() + ": array '" + a.name + "' has dtype " + a.dtype +
                            ", expected " + want_dtype);
    }
    if (a.shape.empty() || a.shape[0] != h.length) {
      throw ValidationError(path.string() + ": array '" + a.name +
                            "' leading dimension does not match length");
    }
    if (image && (a.shape.size() != 4 || a.shape[3] != 3 || a.shape[1] <= 0 || a.shape[2] <= 0)) {
      throw ValidationError(path.string() + ": array '" + a.name + "' must be [T,H,W,3]");
    }
  }
  auto check_dim = [&](std::size_t idx, const char* name, std::int64_t dim) {
    const auto& a = h.arrays[idx];
    if (a.name != name || a.shape.size() != 2 || a.shape[1] != dim) {
      throw ValidationError(path.string() + ": array '" + a.name + "' expected " + name + " [T," +
                            std::to_string(dim) + "]");
    }
  };
  const std::size_t c = h.cameras.size();
  check_dim(c, "joints", kJointDim);
  check_dim(c + 1, "forces", kForceDim);
  check_dim(c + 2, "actions", kActionDim);
  return h;
}

struct FileParts {
  Header header;
  std::size_t data_offset = 0;
  std::size_t file_size = 0;
};

FileParts read_preamble(std::ifstream& in, const std::filesystem::path& path) {
  FileParts parts;
  std::error_code ec;
  parts.file_size = std::filesystem::file_size(path, ec);
  if (ec) throw Error("cannot stat " + path.string() + ": " + ec.message());
  if (parts.file_size < kPreambleBytes) {
    throw ValidationError(path.string() + ": truncated preamble, expected at least " +
                          std::to_string(kPreambleBytes) + " bytes, got " +
                          std::to_string(parts.file_size));
  }
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw ValidationError(path.string() + ": bad magic");
  std::uint8_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 1);
  if (version != kEpisodeFormatVersion) {
    throw ValidationError(path.string() + ": unsupported format version " +
                          std::to_string(version));
  }
  std::uint32_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), 4);
  if (kPreambleBytes + header_len > parts.file_size) {
    throw ValidationError(path.string() + ": truncated header, expected " +
                          std::to_string(kPreambleBytes + header_len) + " bytes, got " +
                          std::to_string(parts.file_size));
  }
  std::string text(header_len, '\0');
  in.read(text.data(), header_len);
  parts.header = parse_header(text, path);
  parts.data_offset = kPreambleBytes + header_len;

  std::size_t payload = 0;
  for (const auto& a : parts.header.arrays) payload += a.bytes();
  const std::size_t expected = parts.data_offset + payload;
  if (parts.file_size != expected) {
    throw ValidationError(path.string() + ": size mismatch, expected " + std::to_string(expected) +
                          " bytes, got " + std::to_string(parts.file_size));
  }
  return parts;
}

template <typename T>
void read_array(std::ifstream& in, std::vector<T>& out, std::size_t bytes,
                const std::filesystem::path& path, const std::string& name) {
  out.resize(bytes / sizeof(T));
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw ValidationError(path.string() + ": short read in array '" + name + "'");
  }
}

}  // namespace

const CameraStream& Episode::camera(std::string_view name) const {
  for (const auto& c : cameras) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument("episode has no camera '" + std::string(name) + "'");
}

void Episode::validate() const {
  const auto t = length();
  if (t <= 0) throw ValidationError("episode array 'joints' is empty");
  if (joints.size() != static_cast<std::size_t>(t) * kJointDim) {
    throw ValidationError("episode array 'joints' is not a multiple of 13");
  }
  if (forces.size() != static_cast<std::size_t>(t) * kForceDim) {
    throw ValidationError("episode array 'forces' length does not match T");
  }
  if (actions.size() != static_cast<std::size_t>(t) * kActionDim) {
    throw ValidationError("episode array 'actions' length does not match T");
  }
  for (const auto& c : cameras) {
    if (c.height <= 0 || c.width <= 0 || c.pixels.size() != static_cast<std::size_t>(t) * c.frame_bytes()) {
      throw ValidationError("episode array 'images/" + c.name + "' does not match [T,H,W,3]");
    }
  }
  for (float f : forces) {
    if (!(f >= 0.0f) || !std::isfinite(f)) {
      throw ValidationError("episode array 'forces' contains a negative or non-finite value");
    }
  }
  for (float v : joints) {
    if (!std::isfinite(v)) throw ValidationError("episode array 'joints' is not finite");
  }
  for (float v : actions) {
    if (!std::isfinite(v)) throw ValidationError("episode array 'actions' is not finite");
  }
}

EpisodeBuilder::EpisodeBuilder(std::vector<std::string> camera_names, int height, int width) {
  for (auto& name : camera_names) {
    episode_.cameras.push_back({std::move(name), height, width, {}});
  }
}

void EpisodeBuilder::append(std::span<const std::span<const std::uint8_t>> frames,
                            std::span<const float> joints, std::span<const float> forces,
                            std::span<const float> action) {
  if (frames.size() != episode_.cameras.size()) {
    throw std::invalid_argument("frame count does not match camera list");
  }
  if (joints.size() != kJointDim || forces.size() != kForceDim || action.size() != kActionDim) {
    throw std::invalid_argument("observation or action has wrong dimension");
  }
  for (std::size_t c = 0; c < frames.size(); ++c) {
    auto& cam = episode_.cameras[c];
    if (frames[c].size() != cam.frame_bytes()) {
      throw std::invalid_argument("frame for camera '" + cam.name + "' has wrong size");
    }
    cam.pixels.insert(cam.pixels.end(), frames[c].begin(), frames[c].end());
  }
  episode_.joints.insert(episode_.joints.end(), joints.begin(), joints.end());
  episode_.forces.insert(episode_.forces.end(), forces.begin(), forces.end());
  episode_.actions.insert(episode_.actions.end(), action.begin(), action.end());
}

Episode EpisodeBuilder::finish(EpisodeMetadata metadata) && {
  episode_.metadata = std::move(metadata);
  episode_.validate();
  return std::move(episode_);
}

void write_episode(const Episode& episode, const std::filesystem::path& path) {
  episode.validate();
  const auto t = episode.length();

  nlohmann::json header;
  header["format_version"] = kEpisodeFormatVersion;
  header["length"] = t;
  header["cameras"] = nlohmann::json::array();
  header["arrays"] = nlohmann::json::array();
  for (const auto& c : episode.cameras) {
    header["cameras"].push_back(c.name);
    header["arrays"].push_back(
        {{"name", "images/" + c.name}, {"dtype", "uint8"}, {"shape", {t, c.height, c.width, 3}}});
  }
  header["arrays"].push_back({{"name", "joints"}, {"dtype", "float32"}, {"shape", {t, kJointDim}}});
  header["arrays"].push_back({{"name", "forces"}, {"dtype", "float32"}, {"shape", {t, kForceDim}}});
  header["arrays"].push_back(
      {{"name", "actions"}, {"dtype", "float32"}, {"shape", {t, kActionDim}}});
  header["metadata"] = metadata_json(episode.metadata);
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write episode " + path.string());
  out.write(kMagic, 4);
  out.put(static_cast<char>(kEpisodeFormatVersion));
  const auto len = static_cast<std::uint32_t>(text.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& c : episode.cameras) {
    out.write(reinterpret_cast<const char*>(c.pixels.data()),
              static_cast<std::streamsize>(c.pixels.size()));
  }
  for (const auto* arr : {&episode.joints, &episode.forces, &episode.actions}) {
    out.write(reinterpret_cast<const char*>(arr->data()),
              static_cast<std::streamsize>(arr->size() * sizeof(float)));
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

Episode read_episode(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open episode " + path.string());
  const FileParts parts = read_preamble(in, path);
  const Header& h = parts.header;

  Episode ep;
  ep.metadata = h.metadata;
  for (std::size_t c = 0; c < h.cameras.size(); ++c) {
    const auto& spec = h.arrays[c];
    CameraStream cam{h.cameras[c], static_cast<int>(spec.shape[1]),
                     static_cast<int>(spec.shape[2]), {}};
    read_array(in, cam.pixels, spec.bytes(), path, spec.name);
    ep.cameras.push_back(std::move(cam));
  }
  const std::size_t c = h.cameras.size();
  read_array(in, ep.joints, h.arrays[c].bytes(), path, "joints");
  read_array(in, ep.forces, h.arrays[c + 1].bytes(), path, "forces");
  read_array(in, ep.actions, h.arrays[c + 2].bytes(), path, "actions");
  try {
    ep.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return ep;
}

EpisodeFileInfo inspect_episode(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open episode " + path.string());
  const FileParts parts = read_preamble(in, path);
  EpisodeFileInfo info;
  info.length = parts.header.length;
  info.cameras = parts.header.cameras;
  if (!info.cameras.empty()) {
    info.height = static_cast<int>(parts.header.arrays[0].shape[1]);
    info.width = static_cast<int>(parts.header.arrays[0].shape[2]);
  }
  info.metadata = parts.header.metadata;
  return info;
}

std::string episode_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "episode_%04d.hax", index);
  return buf;
}

}  // namespace hact::data
