// vreen/io.hpp

// Copyright 2026  The vreen authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// On-disk formats: mel matrices, standardizer stats, speaker stats and the
// checkpoint archive.  All binary payloads are little-endian.

#ifndef VREEN_IO_HPP_
#define VREEN_IO_HPP_

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vreen/common.hpp"
#include "vreen/types.hpp"

namespace vreen::io {

using json = nlohmann::json;

// ---- generic helpers ----

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open for reading: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot open for writing: " + path);
  out << content;
  require(out.good(), Errc::io, "write failed: " + path);
}

inline json read_json_file(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  require(!j.is_discarded(), Errc::io, "malformed JSON: " + path);
  return j;
}

inline void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// ---- mel matrix file ----
//
// Layout: 8-byte magic "VREENMEL", u32 rows, u32 cols, then rows*cols
// float32 values in row-major order.

inline constexpr char kMelMagic[8] = {'V', 'R', 'E', 'E', 'N', 'M', 'E', 'L'};

inline void save_mel(const std::string& path, const MelSpectrogram& mel) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot open for writing: " + path);
  out.write(kMelMagic, 8);
  const uint32_t rows = static_cast<uint32_t>(mel.values.rows());
  const uint32_t cols = static_cast<uint32_t>(mel.values.cols());
  const uint32_t flags = mel.standardized ? 1u : 0u;
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(&flags), 4);
  std::vector<float> buf(static_cast<size_t>(rows) * cols);
  for (uint32_t i = 0; i < rows; ++i)
    for (uint32_t j = 0; j < cols; ++j)
      buf[static_cast<size_t>(i) * cols + j] =
          static_cast<float>(mel.values(i, j));
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  require(out.good(), Errc::io, "write failed: " + path);
}

inline MelSpectrogram load_mel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open for reading: " + path);
  char magic[8];
  in.read(magic, 8);
  require(in.good() && std::memcmp(magic, kMelMagic, 8) == 0, Errc::io,
          "not a mel matrix file: " + path);
  uint32_t rows = 0, cols = 0, flags = 0;
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  in.read(reinterpret_cast<char*>(&flags), 4);
  require(in.good() && rows > 0 && cols > 0, Errc::io,
          "corrupt mel header: " + path);
  std::vector<float> buf(static_cast<size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  require(in.good(), Errc::io, "truncated mel file: " + path);
  MelSpectrogram mel;
  mel.standardized = (flags & 1u) != 0;
  mel.values.resize(rows, cols);
  for (uint32_t i = 0; i < rows; ++i)
    for (uint32_t j = 0; j < cols; ++j)
      mel.values(i, j) = buf[static_cast<size_t>(i) * cols + j];
  return mel;
}

// ---- F0 track file (JSON) ----

inline void save_f0(const std::string& path, const F0Track& f0) {
  json j;
  j["frame_rate"] = 80.0;
  j["values"] = std::vector<double>(f0.values.data(),
                                    f0.values.data() + f0.values.size());
  write_json_file(path, j);
}

inline F0Track load_f0(const std::string& path) {
  json j = read_json_file(path);
  require(j.contains("values") && j["values"].is_array(), Errc::io,
          "malformed f0 file: " + path);
  std::vector<double> vals = j["values"].get<std::vector<double>>();
  F0Track f0;
  f0.values = Eigen::Map<const Vec>(vals.data(),
                                    static_cast<long>(vals.size()));
  return f0;
}

// ---- standardizer stats ----

inline void save_standardizer(const std::string& path, const Standardizer& s) {
  json j;
  j["mean"] =
      std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
  j["std"] = std::vector<double>(s.std.data(), s.std.data() + s.std.size());
  j["provenance"] = s.provenance;
  write_json_file(path, j);
}

inline Standardizer load_standardizer(const std::string& path) {
  json j = read_json_file(path);
  require(j.contains("mean") && j.contains("std"), Errc::io,
          "malformed standardizer file: " + path);
  std::vector<double> mean = j["mean"].get<std::vector<double>>();
  std::vector<double> std_ = j["std"].get<std::vector<double>>();
  require(mean.size() == std_.size() && !mean.empty(), Errc::io,
          "inconsistent standardizer stats: " + path);
  Standardizer s;
  s.mean = Eigen::Map<const Vec>(mean.data(), static_cast<long>(mean.size()));
  s.std = Eigen::Map<const Vec>(std_.data(), static_cast<long>(std_.size()));
  s.provenance = j.value("provenance", std::string());
  return s;
}

// ---- speaker F0 stats ----

inline void save_speaker_profiles(const std::string& path,
                                  const std::vector<SpeakerProfile>& profiles) {
  json j = json::array();
  for (const auto& p : profiles) {
    json e;
    e["speaker_id"] = p.speaker_id;
    e["log_f0_mean"] = p.log_f0_mean;
    e["log_f0_std"] = p.log_f0_std;
    e["reference_utterances"] = p.reference_utterances;
    j.push_back(e);
  }
  write_json_file(path, j);
}

inline std::vector<SpeakerProfile> load_speaker_profiles(
    const std::string& path) {
  json j = read_json_file(path);
  require(j.is_array(), Errc::io, "malformed speaker stats file: " + path);
  std::vector<SpeakerProfile> out;
  for (const auto& e : j) {
    SpeakerProfile p;
    p.speaker_id = e.at("speaker_id").get<std::string>();
    p.log_f0_mean = e.at("log_f0_mean").get<double>();
    p.log_f0_std = e.at("log_f0_std").get<double>();
    if (e.contains("reference_utterances"))
      p.reference_utterances =
          e["reference_utterances"].get<std::vector<std::string>>();
    out.push_back(std::move(p));
  }
  return out;
}

// ---- checkpoint archive ----
//
// Layout: 8-byte magic "VREENCK1", u64 metadata length, UTF-8 JSON metadata,
// then the concatenated float64 tensor payloads.  The metadata carries a
// tensor directory with byte offsets relative to the payload start.

inline constexpr char kCheckpointMagic[8] = {'V', 'R', 'E', 'E',
                                             'N', 'C', 'K', '1'};

struct CheckpointTensor {
  std::string name;
  long rows = 0;
  long cols = 0;
  bool frozen = false;
  Mat value;
};

struct Checkpoint {
  json metadata;  // format, seed, step, config_hash, rng_state, speakers, dims
  std::vector<CheckpointTensor> tensors;

  const CheckpointTensor* find(const std::string& name) const {
    for (const auto& t : tensors)
      if (t.name == name) return &t;
    return nullptr;
  }
};

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  json meta = ck.metadata;
  meta["format"] = 1;
  json dir = json::array();
  uint64_t offset = 0;
  for (const auto& t : ck.tensors) {
    json e;
    e["name"] = t.name;
    e["rows"] = t.value.rows();
    e["cols"] = t.value.cols();
    e["frozen"] = t.frozen;
    e["offset"] = offset;
    dir.push_back(e);
    offset += static_cast<uint64_t>(t.value.size()) * sizeof(double);
  }
  meta["tensors"] = dir;
  const std::string meta_str = meta.dump();

  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot open for writing: " + path);
  out.write(kCheckpointMagic, 8);
  const uint64_t meta_len = meta_str.size();
  out.write(reinterpret_cast<const char*>(&meta_len), 8);
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  for (const auto& t : ck.tensors) {
    // Row-major serialization keeps the directory independent of Eigen's
    // default storage order.
    std::vector<double> buf(static_cast<size_t>(t.value.size()));
    for (long i = 0; i < t.value.rows(); ++i)
      for (long j = 0; j < t.value.cols(); ++j)
        buf[static_cast<size_t>(i) * t.value.cols() + j] = t.value(i, j);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
  }
  require(out.good(), Errc::io, "write failed: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open for reading: " + path);
  char magic[8];
  in.read(magic, 8);
  require(in.good() && std::memcmp(magic, kCheckpointMagic, 8) == 0, Errc::io,
          "not a checkpoint file: " + path);
  uint64_t meta_len = 0;
  in.read(reinterpret_cast<char*>(&meta_len), 8);
  require(in.good() && meta_len > 0 && meta_len < (1ull << 32), Errc::io,
          "corrupt checkpoint header: " + path);
  std::string meta_str(meta_len, '\0');
  in.read(meta_str.data(), static_cast<std::streamsize>(meta_len));
  require(in.good(), Errc::io, "truncated checkpoint metadata: " + path);
  json meta = json::parse(meta_str, nullptr, false);
  require(!meta.is_discarded(), Errc::io,
          "malformed checkpoint metadata: " + path);
  require(meta.value("format", 0) == 1, Errc::io,
          "unsupported checkpoint format: " + path);

  Checkpoint ck;
  ck.metadata = meta;
  const std::streampos payload_start = in.tellg();
  for (const auto& e : meta.at("tensors")) {
    CheckpointTensor t;
    t.name = e.at("name").get<std::string>();
    t.rows = e.at("rows").get<long>();
    t.cols = e.at("cols").get<long>();
    t.frozen = e.value("frozen", false);
    const uint64_t offset = e.at("offset").get<uint64_t>();
    in.seekg(payload_start + static_cast<std::streamoff>(offset));
    std::vector<double> buf(static_cast<size_t>(t.rows) * t.cols);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    require(in.good(), Errc::io,
            "truncated checkpoint tensor " + t.name + ": " + path);
    t.value.resize(t.rows, t.cols);
    for (long i = 0; i < t.rows; ++i)
      for (long j = 0; j < t.cols; ++j)
        t.value(i, j) = buf[static_cast<size_t>(i) * t.cols + j];
    ck.tensors.push_back(std::move(t));
  }
  return ck;
}

}  // namespace vreen::io

#endif  // VREEN_IO_HPP_
