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

#include "hact/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

namespace hact::model {

static_assert(std::endian::native == std::endian::little,
              "checkpoints are written in host order and require a little-endian host");

namespace {

constexpr char kMagic[4] = {'H', 'A', 'X', 'C'};
constexpr std::size_t kPreambleBytes = 4 + 1 + 4;

nlohmann::json trainer_json(const TrainerState& s) {
  return {{"step", s.step},
          {"best_validation", s.best_validation},
          {"best_step", s.best_step},
          {"train_config", s.train_config},
          {"train_files", s.train_files},
          {"validation_files", s.validation_files}};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, HapticAct& model,
                     const data::NormStats& stats, const TrainerState* trainer) {
  struct Blob {
    std::string name;
    std::string dtype;
    std::vector<std::int64_t> shape;
    const char* data;
    std::size_t bytes;
  };
  std::vector<torch::Tensor> keep;
  std::vector<Blob> blobs;
  for (const auto& [name, tensor] : named_weights(model)) {
    auto t = tensor.detach().to(torch::kFloat32).contiguous();
    keep.push_back(t);
    blobs.push_back({name, "float32", t.sizes().vec(), static_cast<const char*>(t.data_ptr()),
                     static_cast<std::size_t>(t.numel()) * sizeof(float)});
  }
  if (trainer) {
    blobs.push_back({"trainer.optimizer", "uint8",
                     {static_cast<std::int64_t>(trainer->optimizer.size())},
                     trainer->optimizer.data(), trainer->optimizer.size()});
  }

  nlohmann::json header;
  header["format_version"] = kCheckpointFormatVersion;
  header["config"] = model->config();
  header["norm_stats"] = data::to_json(stats);
  header["arrays"] = nlohmann::json::array();
  for (const auto& b : blobs) {
    header["arrays"].push_back({{"name", b.name}, {"dtype", b.dtype}, {"shape", b.shape}});
  }
  if (trainer) header["trainer"] = trainer_json(*trainer);
  const std::string text = header.dump();

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    const auto len = static_cast<std::uint32_t>(text.size());
    out.write(kMagic, 4);
    out.put(static_cast<char>(kCheckpointFormatVersion));
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& b : blobs) out.write(b.data, static_cast<std::streamsize>(b.bytes));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  const auto file_size = std::filesystem::file_size(path);
  if (file_size < kPreambleBytes) throw ValidationError(path.string() + ": truncated checkpoint");
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw ValidationError(path.string() + ": bad magic");
  const int version = in.get();
  if (version != kCheckpointFormatVersion) {
    throw IncompatibleCheckpointError(path.string() + ": checkpoint format version " +
                                      std::to_string(version) + ", expected " +
                                      std::to_string(kCheckpointFormatVersion));
  }
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  if (kPreambleBytes + len > file_size) throw ValidationError(path.string() + ": truncated header");
  std::string text(len, '\0');
  in.read(text.data(), len);

  Checkpoint ck;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
    ck.config = header.at("config").get<ModelConfig>();
    ck.stats = data::norm_stats_from_json(header.at("norm_stats"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": malformed checkpoint header: " + e.what());
  }
  ck.model = HapticAct(ck.config);

  std::map<std::string, torch::Tensor> targets;
  for (auto& [name, tensor] : named_weights(ck.model)) targets.emplace(name, tensor);

  std::size_t payload = 0;
  for (const auto& a : header.at("arrays")) {
    std::size_t n = a.at("dtype") == "uint8" ? 1 : 4;
    for (auto d : a.at("shape")) n *= d.get<std::size_t>();
    payload += n;
  }
  if (kPreambleBytes + len + payload != file_size) {
    throw ValidationError(path.string() + ": size mismatch, expected " +
                          std::to_string(kPreambleBytes + len + payload) + " bytes, got " +
                          std::to_string(file_size));
  }

  std::string optimizer;
  torch::NoGradGuard no_grad;
  for (const auto& a : header.at("arrays")) {
    const auto name = a.at("name").get<std::string>();
    const auto shape = a.at("shape").get<std::vector<std::int64_t>>();
    if (a.at("dtype") == "uint8") {
      optimizer.resize(static_cast<std::size_t>(shape.at(0)));
      in.read(optimizer.data(), static_cast<std::streamsize>(optimizer.size()));
      continue;
    }
    auto it = targets.find(name);
    if (it == targets.end()) throw ValidationError(path.string() + ": unknown weight '" + name + "'");
    if (it->second.sizes().vec() != shape) {
      throw ValidationError(path.string() + ": weight '" + name + "' has the wrong shape");
    }
    auto buf = torch::empty(shape, torch::kFloat32);
    in.read(static_cast<char*>(buf.data_ptr()), buf.numel() * static_cast<std::streamsize>(sizeof(float)));
    it->second.copy_(buf);
    targets.erase(it);
  }
  if (!in) throw ValidationError(path.string() + ": short read");
  if (!targets.empty()) {
    throw ValidationError(path.string() + ": missing weight '" + targets.begin()->first + "'");
  }

  if (header.contains("trainer")) {
    const auto& t = header["trainer"];
    TrainerState s;
    s.step = t.at("step").get<std::int64_t>();
    s.best_validation = t.at("best_validation").get<double>();
    s.best_step = t.at("best_step").get<std::int64_t>();
    s.train_config = t.at("train_config");
    s.train_files = t.value("train_files", std::vector<std::string>{});
    s.validation_files = t.value("validation_files", std::vector<std::string>{});
    s.optimizer = std::move(optimizer);
    ck.trainer = std::move(s);
  }
  ck.model->eval();
  return ck;
}

}  // namespace hact::model
