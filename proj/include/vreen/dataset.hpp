// vreen/dataset.hpp

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

// Manifest handling and the in-memory training store.  Dataset layout is
// VCTK-style: one directory per speaker, utterance WAV files with sibling
// .align text files.

#ifndef VREEN_DATASET_HPP_
#define VREEN_DATASET_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "vreen/common.hpp"
#include "vreen/features.hpp"
#include "vreen/io.hpp"
#include "vreen/types.hpp"

namespace vreen::data {

struct Utterance {
  std::string utterance_id;
  std::string speaker_id;
  std::string wav_path;
  std::string align_path;  // empty when absent
  std::string mel_path;
  std::string f0_path;
  long frames = 0;
  std::string split = "train";  // "train" | "val"
};

struct Manifest {
  std::vector<Utterance> rows;

  std::vector<std::string> speakers() const {
    std::vector<std::string> out;
    for (const auto& r : rows)
      if (std::find(out.begin(), out.end(), r.speaker_id) == out.end())
        out.push_back(r.speaker_id);
    std::sort(out.begin(), out.end());
    return out;
  }

  long count(const std::string& split) const {
    long n = 0;
    for (const auto& r : rows)
      if (r.split == split) ++n;
    return n;
  }
};

inline void save_manifest(const std::string& path, const Manifest& m) {
  std::string out;
  for (const auto& r : m.rows) {
    io::json j;
    j["utterance_id"] = r.utterance_id;
    j["speaker_id"] = r.speaker_id;
    j["wav"] = r.wav_path;
    j["align"] = r.align_path;
    j["mel"] = r.mel_path;
    j["f0"] = r.f0_path;
    j["frames"] = r.frames;
    j["split"] = r.split;
    out += j.dump() + "\n";
  }
  io::write_text_file(path, out);
}

inline Manifest load_manifest(const std::string& path) {
  const std::string text = io::read_text_file(path);
  Manifest m;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    io::json j = io::json::parse(line, nullptr, false);
    require(!j.is_discarded(), Errc::io, "malformed manifest line in " + path);
    Utterance u;
    u.utterance_id = j.at("utterance_id").get<std::string>();
    u.speaker_id = j.at("speaker_id").get<std::string>();
    u.wav_path = j.value("wav", std::string());
    u.align_path = j.value("align", std::string());
    u.mel_path = j.value("mel", std::string());
    u.f0_path = j.value("f0", std::string());
    u.frames = j.value("frames", 0L);
    u.split = j.value("split", std::string("train"));
    m.rows.push_back(std::move(u));
  }
  require(!m.rows.empty(), Errc::config, "empty manifest: " + path);
  return m;
}

// Per-speaker 90/10 split over utterances sorted by id.  The validation
// share rounds to the nearest count, with at least one utterance on each
// side when the speaker has two or more.
inline void assign_splits(Manifest& m) {
  std::map<std::string, std::vector<Utterance*>> by_speaker;
  for (auto& r : m.rows) by_speaker[r.speaker_id].push_back(&r);
  for (auto& [speaker, rows] : by_speaker) {
    std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
      return a->utterance_id < b->utterance_id;
    });
    const long n = static_cast<long>(rows.size());
    long n_val = std::lround(static_cast<double>(n) * 0.1);
    n_val = std::clamp(n_val, n >= 2 ? 1L : 0L, n - 1);
    for (long i = 0; i < n; ++i)
      rows[i]->split = (i >= n - n_val) ? "val" : "train";
  }
}

// One fully materialized training example.
struct TrainItem {
  std::string utterance_id;
  std::string speaker_id;
  int speaker_index = -1;
  MelSpectrogram mel;  // standardized
  F0Track f0;
  std::vector<int> phoneme_ids;  // frame-level, empty when no alignment
};

struct DataStore {
  Manifest manifest;
  Standardizer standardizer;
  std::vector<SpeakerProfile> profiles;
  std::vector<std::string> speakers;  // sorted; position = classifier index
  std::vector<TrainItem> train_items;
  std::vector<TrainItem> val_items;

  int speaker_index(const std::string& id) const {
    auto it = std::find(speakers.begin(), speakers.end(), id);
    require(it != speakers.end(), Errc::config, "unknown speaker: " + id);
    return static_cast<int>(it - speakers.begin());
  }

  const SpeakerProfile& profile(const std::string& id) const {
    for (const auto& p : profiles)
      if (p.speaker_id == id) return p;
    raise(Errc::config, "no F0 statistics for speaker: " + id);
  }
};

inline TrainItem load_item(const Utterance& u, const Standardizer& std_,
                           const PhonemeInventory& inventory,
                           int speaker_index) {
  TrainItem item;
  item.utterance_id = u.utterance_id;
  item.speaker_id = u.speaker_id;
  item.speaker_index = speaker_index;
  MelSpectrogram mel = io::load_mel(u.mel_path);
  item.mel = apply_standardizer(mel, std_, StdDirection::forward);
  item.f0 = io::load_f0(u.f0_path);
  require(item.f0.length() == item.mel.frames(), Errc::invalid_input,
          "feature length mismatch for " + u.utterance_id);
  if (!u.align_path.empty()) {
    PhonemeAlignment a = load_alignment(
        u.align_path, static_cast<int>(item.mel.frames()), inventory);
    item.phoneme_ids = a.ids;
  }
  return item;
}

inline DataStore load_store(const std::string& manifest_path,
                            const std::string& standardizer_path,
                            const std::string& speakers_path,
                            const PhonemeInventory& inventory) {
  DataStore store;
  store.manifest = load_manifest(manifest_path);
  store.standardizer = io::load_standardizer(standardizer_path);
  store.profiles = io::load_speaker_profiles(speakers_path);
  store.speakers = store.manifest.speakers();
  for (const auto& u : store.manifest.rows) {
    TrainItem item =
        load_item(u, store.standardizer, inventory,
                  store.speaker_index(u.speaker_id));
    (u.split == "val" ? store.val_items : store.train_items)
        .push_back(std::move(item));
  }
  require(!store.train_items.empty(), Errc::config,
          "manifest has no training rows");
  return store;
}

}  // namespace vreen::data

#endif  // VREEN_DATASET_HPP_
