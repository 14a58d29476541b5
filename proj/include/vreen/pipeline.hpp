// vreen/pipeline.hpp

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

// Stage orchestration: prepare, train-f0, pretrain, finetune, convert,
// evaluate, plus the synthetic data generator.  Each stage reads the
// artifacts of its predecessors from out_dir and fails with a dependency
// error naming the missing file.

#ifndef VREEN_PIPELINE_HPP_
#define VREEN_PIPELINE_HPP_

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "vreen/config.hpp"
#include "vreen/conversion.hpp"
#include "vreen/dataset.hpp"
#include "vreen/eval.hpp"
#include "vreen/features.hpp"
#include "vreen/io.hpp"
#include "vreen/model.hpp"
#include "vreen/synth.hpp"
#include "vreen/training.hpp"
#include "vreen/wav.hpp"

namespace vreen::pipeline {

struct OutPaths {
  std::string out_dir;

  std::string manifest() const { return out_dir + "/manifest.jsonl"; }
  std::string manifest_meta() const { return out_dir + "/manifest.meta.json"; }
  std::string standardizer() const { return out_dir + "/standardizer.json"; }
  std::string speakers() const { return out_dir + "/speakers.json"; }
  std::string speakers_meta() const { return out_dir + "/speakers.meta.json"; }
  std::string features_dir() const { return out_dir + "/features"; }
  std::string converted_dir() const { return out_dir + "/converted"; }
  std::string eval_report() const { return out_dir + "/eval_report.json"; }
  std::string eval_table() const { return out_dir + "/eval_table.txt"; }
  std::string convert_request() const {
    return out_dir + "/convert_request.json";
  }
};

inline void require_artifact(const std::string& path,
                             const std::string& hint) {
  require(std::filesystem::exists(path), Errc::dependency,
          "missing required file " + path + " (" + hint + ")");
}

// Highest-step checkpoint named ckpt_<stage>_<N>.bin under out_dir, or "".
inline std::string find_latest_checkpoint(const std::string& out_dir,
                                          const std::string& stage) {
  namespace fs = std::filesystem;
  const std::string prefix = "ckpt_" + stage + "_";
  const std::string suffix = ".bin";
  std::string best;
  long best_step = -1;
  if (!fs::is_directory(out_dir)) return best;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() <= prefix.size() + suffix.size()) continue;
    if (name.compare(0, prefix.size(), prefix) != 0) continue;
    if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
      continue;
    const std::string digits =
        name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos)
      continue;
    const long step = std::stol(digits);
    if (step > best_step) {
      best_step = step;
      best = entry.path().string();
    }
  }
  return best;
}

inline train::StageIO make_stage_io(const config::RunConfig& cfg,
                                    const std::string& stage,
                                    const std::vector<std::string>& speakers) {
  train::StageIO io_cfg;
  io_cfg.out_dir = cfg.out_dir;
  io_cfg.stage = stage;
  io_cfg.log_path = cfg.out_dir + "/" + stage + "_log.jsonl";
  io_cfg.run_meta = config::run_meta(cfg);
  io_cfg.speakers = speakers;
  io_cfg.progress_every = cfg.progress_every;
  return io_cfg;
}

// Fresh optimizers and RNG, model tensors from the checkpoint.  Used at
// stage boundaries; in-stage resume goes through load_train_checkpoint.
inline train::TrainState warm_start(const std::string& ckpt_path,
                                    const train::TrainConfig& tcfg) {
  const io::Checkpoint ck = io::load_checkpoint(ckpt_path);
  require(ck.metadata.contains("dims"), Errc::io,
          "checkpoint lacks model dimensions: " + ckpt_path);
  const model::ModelDims dims = model::dims_from_json(ck.metadata.at("dims"));
  train::TrainState state = train::make_state(dims, tcfg);
  model::load_model_tensors(ck, state.model);
  return state;
}

inline model::Model load_model(const std::string& ckpt_path,
                               io::json* meta_out = nullptr) {
  const io::Checkpoint ck = io::load_checkpoint(ckpt_path);
  require(ck.metadata.contains("dims"), Errc::io,
          "checkpoint lacks model dimensions: " + ckpt_path);
  model::Model m;
  m.init(model::dims_from_json(ck.metadata.at("dims")), 1);
  model::load_model_tensors(ck, m);
  if (meta_out) *meta_out = ck.metadata;
  return m;
}

namespace detail {

struct PreparedUtterance {
  MelSpectrogram mel;  // raw, not standardized
  F0Track f0;
};

inline Vec audio_at_16k(const WavData& w) {
  const Vec trimmed = trim_silence(w.samples);
  if (w.sample_rate == 16000.0) return trimmed;
  return resample(trimmed, w.sample_rate, 16000.0);
}

}  // namespace detail

inline void run_prepare(const config::RunConfig& cfg) {
  namespace fs = std::filesystem;
  require(!cfg.dataset_root.empty(), Errc::config, "dataset_root is not set");
  require_artifact(cfg.dataset_root, "dataset root directory");
  const OutPaths paths{cfg.out_dir};
  fs::create_directories(paths.features_dir());

  MelConfig mel_cfg;
  mel_cfg.n_mels = cfg.dims.n_mels;
  const PhonemeInventory inventory =
      PhonemeInventory::general_american();

  std::vector<std::string> speaker_dirs;
  for (const auto& entry : fs::directory_iterator(cfg.dataset_root))
    if (entry.is_directory())
      speaker_dirs.push_back(entry.path().filename().string());
  std::sort(speaker_dirs.begin(), speaker_dirs.end());

  data::Manifest manifest;
  std::vector<detail::PreparedUtterance> prepared;
  for (const auto& spk : speaker_dirs) {
    const fs::path spk_dir = fs::path(cfg.dataset_root) / spk;
    std::vector<fs::path> wavs;
    for (const auto& entry : fs::directory_iterator(spk_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".wav")
        wavs.push_back(entry.path());
    std::sort(wavs.begin(), wavs.end());
    for (const auto& wav_path : wavs) {
      fs::path align_path = wav_path;
      align_path.replace_extension(".align");
      if (!fs::exists(align_path)) {
        warn("no alignment beside " + wav_path.string() + "; skipping");
        continue;
      }
      const WavData w = read_wav(wav_path.string());
      const Vec audio = detail::audio_at_16k(w);
      if (audio.size() < 800) {
        warn("audio too short after trimming: " + wav_path.string() +
             "; skipping");
        continue;
      }
      const MelSpectrogram mel = compute_mel(audio, 16000.0, mel_cfg);
      const F0Track f0 = extract_f0_oracle(audio);
      require(f0.length() == mel.frames(), Errc::state,
              "frame count mismatch between Mel and F0 for " +
                  wav_path.string());
      // Fails loudly here rather than mid-training.
      load_alignment(align_path.string(), mel.frames(), inventory);

      data::Utterance u;
      u.utterance_id = wav_path.stem().string();
      u.speaker_id = spk;
      u.wav_path = wav_path.string();
      u.align_path = align_path.string();
      const std::string feat_dir = paths.features_dir() + "/" + spk;
      fs::create_directories(feat_dir);
      u.mel_path = feat_dir + "/" + u.utterance_id + ".mel";
      u.f0_path = feat_dir + "/" + u.utterance_id + ".f0.json";
      u.frames = mel.frames();
      io::save_mel(u.mel_path, mel);
      io::save_f0(u.f0_path, f0);
      manifest.rows.push_back(u);
      prepared.push_back({mel, f0});
    }
  }
  require(!manifest.rows.empty(), Errc::config,
          "no usable utterances under " + cfg.dataset_root);
  data::assign_splits(manifest);

  std::vector<MelSpectrogram> train_mels;
  for (size_t i = 0; i < manifest.rows.size(); ++i)
    if (manifest.rows[i].split == "train")
      train_mels.push_back(prepared[i].mel);
  const std::string hash = config::config_hash(cfg);
  const Standardizer standardizer = fit_standardizer(
      train_mels, "train split of " + cfg.dataset_root + "; config " + hash +
                      " seed " + std::to_string(cfg.seed) + " version " +
                      version());

  std::vector<SpeakerProfile> profiles;
  for (const auto& spk : manifest.speakers()) {
    std::vector<F0Track> tracks;
    std::vector<std::string> refs;
    for (size_t i = 0; i < manifest.rows.size(); ++i) {
      if (manifest.rows[i].speaker_id != spk ||
          manifest.rows[i].split != "train")
        continue;
      tracks.push_back(prepared[i].f0);
      refs.push_back(manifest.rows[i].utterance_id);
    }
    const auto [mu, sigma] = compute_speaker_f0_stats(tracks);
    SpeakerProfile p;
    p.speaker_id = spk;
    p.log_f0_mean = mu;
    p.log_f0_std = sigma;
    p.reference_utterances = refs;
    profiles.push_back(p);
  }

  data::save_manifest(paths.manifest(), manifest);
  io::save_standardizer(paths.standardizer(), standardizer);
  io::save_speaker_profiles(paths.speakers(), profiles);
  io::json meta = config::run_meta(cfg);
  meta["speakers"] = manifest.speakers();
  meta["train_count"] = manifest.count("train");
  meta["val_count"] = manifest.count("val");
  io::write_json_file(paths.manifest_meta(), meta);
  io::write_json_file(paths.speakers_meta(), config::run_meta(cfg));
  std::cout << "prepare done: " << manifest.rows.size() << " utterances, "
            << manifest.speakers().size() << " speakers, "
            << manifest.count("train") << " train / " << manifest.count("val")
            << " val\n";
}

inline data::DataStore load_prepared_store(const config::RunConfig& cfg) {
  const OutPaths paths{cfg.out_dir};
  require_artifact(paths.manifest(), "run prepare first");
  require_artifact(paths.standardizer(), "run prepare first");
  require_artifact(paths.speakers(), "run prepare first");
  return data::load_store(paths.manifest(), paths.standardizer(),
                          paths.speakers(),
                          PhonemeInventory::general_american());
}

inline void run_train_f0(const config::RunConfig& cfg) {
  const data::DataStore store = load_prepared_store(cfg);
  model::ModelDims dims = cfg.dims;
  dims.n_speakers = static_cast<int>(store.speakers.size());
  dims.phoneme_vocab = PhonemeInventory::general_american().size();
  const train::TrainConfig tcfg = config::make_train_config(cfg, "f0");
  train::TrainState state = train::make_state(dims, tcfg);
  const train::StageIO io_cfg = make_stage_io(cfg, "f0", store.speakers);
  train::pretrain_f0_encoder(state, store.train_items, tcfg, io_cfg);
  std::cout << "train-f0 done: " << io_cfg.checkpoint_path(state.step) << "\n";
}

inline void check_checkpoint_speakers(const std::string& ckpt_path,
                                      const data::DataStore& store) {
  const auto ck_speakers = train::checkpoint_speakers(ckpt_path);
  require(ck_speakers == store.speakers, Errc::config,
          "speaker set in " + ckpt_path + " differs from the dataset");
}

inline void run_pretrain(const config::RunConfig& cfg) {
  const data::DataStore store = load_prepared_store(cfg);
  std::string from = cfg.checkpoint;
  if (from.empty()) from = find_latest_checkpoint(cfg.out_dir, "f0");
  require(!from.empty(), Errc::dependency,
          "missing required file " + cfg.out_dir + "/ckpt_f0_" +
              std::to_string(cfg.f0_steps) + ".bin (run train-f0 first)");
  require_artifact(from, "F0 encoder checkpoint");
  check_checkpoint_speakers(from, store);
  const train::TrainConfig tcfg = config::make_train_config(cfg, "pretrain");
  train::TrainState state = warm_start(from, tcfg);
  state.model.set_f0_frozen(true);
  const train::StageIO io_cfg = make_stage_io(cfg, "pretrain", store.speakers);
  train::pretrain_multispeaker(state, store, tcfg, io_cfg);
  std::cout << "pretrain done: " << io_cfg.checkpoint_path(state.step) << "\n";
}

inline void run_finetune(const config::RunConfig& cfg) {
  require(!cfg.src_speaker.empty() && !cfg.tgt_speaker.empty(), Errc::config,
          "finetune needs src_speaker and tgt_speaker");
  const data::DataStore store = load_prepared_store(cfg);
  std::string from = cfg.checkpoint;
  if (from.empty()) from = find_latest_checkpoint(cfg.out_dir, "pretrain");
  require(!from.empty(), Errc::dependency,
          "missing required file " + cfg.out_dir + "/ckpt_pretrain_" +
              std::to_string(cfg.pretrain_steps) + ".bin (run pretrain first)");
  require_artifact(from, "pre-trained model checkpoint");
  check_checkpoint_speakers(from, store);
  const train::TrainConfig tcfg = config::make_train_config(cfg, "finetune");
  train::TrainState state = warm_start(from, tcfg);
  state.model.set_f0_frozen(true);
  const train::StageIO io_cfg = make_stage_io(cfg, "finetune", store.speakers);
  train::finetune_pair(state, store, cfg.src_speaker, cfg.tgt_speaker, tcfg,
                       io_cfg);
  std::cout << "finetune done: " << io_cfg.checkpoint_path(state.step) << "\n";
}

inline std::string resolve_model_checkpoint(const config::RunConfig& cfg) {
  if (!cfg.checkpoint.empty()) {
    require_artifact(cfg.checkpoint, "model checkpoint");
    return cfg.checkpoint;
  }
  std::string path = find_latest_checkpoint(cfg.out_dir, "finetune");
  if (path.empty()) path = find_latest_checkpoint(cfg.out_dir, "pretrain");
  require(!path.empty(), Errc::dependency,
          "missing required file " + cfg.out_dir + "/ckpt_finetune_" +
              std::to_string(cfg.finetune_steps) +
              ".bin (run finetune or pretrain first)");
  return path;
}

// Picks one validation utterance of the source speaker and one training
// utterance of the target speaker out of the manifest.
inline io::json default_request(const config::RunConfig& cfg,
                                const OutPaths& paths) {
  require_artifact(paths.manifest(), "run prepare first");
  const data::Manifest man = data::load_manifest(paths.manifest());
  const auto speakers = man.speakers();
  require(speakers.size() >= 2, Errc::config,
          "a default conversion request needs at least two speakers");
  const std::string src =
      cfg.src_speaker.empty() ? speakers.front() : cfg.src_speaker;
  std::string tgt = cfg.tgt_speaker;
  if (tgt.empty())
    for (const auto& s : speakers)
      if (s != src) {
        tgt = s;
        break;
      }
  require(!tgt.empty() && tgt != src, Errc::config,
          "cannot pick a target speaker distinct from " + src);
  const data::Utterance* src_row = nullptr;
  for (const auto& row : man.rows)
    if (row.speaker_id == src && row.split == "val") {
      src_row = &row;
      break;
    }
  if (!src_row)
    for (const auto& row : man.rows)
      if (row.speaker_id == src) {
        src_row = &row;
        break;
      }
  require(src_row != nullptr, Errc::config,
          "no utterances for source speaker " + src);
  const data::Utterance* tgt_row = nullptr;
  for (const auto& row : man.rows)
    if (row.speaker_id == tgt && row.split == "train") {
      tgt_row = &row;
      break;
    }
  require(tgt_row != nullptr, Errc::config,
          "no training utterances for target speaker " + tgt);
  return io::json{{"source_wav", src_row->wav_path},
                  {"source_speaker_id", src},
                  {"target_speaker_id", tgt},
                  {"target_reference_wav", tgt_row->wav_path},
                  {"f0_mode", cfg.f0_mode}};
}

inline void run_convert(const config::RunConfig& cfg) {
  namespace fs = std::filesystem;
  const OutPaths paths{cfg.out_dir};
  const std::string ckpt_path = resolve_model_checkpoint(cfg);
  require_artifact(paths.standardizer(), "run prepare first");
  require_artifact(paths.speakers(), "run prepare first");
  const model::Model m = load_model(ckpt_path);
  const Standardizer standardizer =
      io::load_standardizer(paths.standardizer());
  const auto profiles = io::load_speaker_profiles(paths.speakers());

  io::json req_json;
  std::string req_path = cfg.convert_request;
  if (!req_path.empty()) {
    require_artifact(req_path, "conversion request");
    req_json = io::read_json_file(req_path);
  } else {
    req_json = default_request(cfg, paths);
    req_path = paths.convert_request();
    io::write_json_file(req_path, req_json);
  }
  require(req_json.contains("source_wav") &&
              req_json.contains("target_speaker_id") &&
              req_json.contains("target_reference_wav"),
          Errc::config,
          "conversion request needs source_wav, target_speaker_id and "
          "target_reference_wav");
  const std::string source_wav = req_json["source_wav"].get<std::string>();
  const std::string target_id =
      req_json["target_speaker_id"].get<std::string>();
  const std::string target_ref =
      req_json["target_reference_wav"].get<std::string>();
  require_artifact(source_wav, "conversion source audio");
  require_artifact(target_ref, "target reference audio");

  MelConfig mel_cfg;
  mel_cfg.n_mels = m.dims.n_mels;
  auto load_standardized = [&](const std::string& path, F0Track* f0_out) {
    const WavData w = read_wav(path);
    const Vec audio = detail::audio_at_16k(w);
    require(audio.size() >= 800, Errc::invalid_input,
            "audio too short after trimming: " + path);
    const MelSpectrogram mel = compute_mel(audio, 16000.0, mel_cfg);
    if (f0_out) *f0_out = extract_f0_oracle(audio);
    return apply_standardizer(mel, standardizer,
                                        StdDirection::forward);
  };

  conv::ConversionRequest req;
  req.f0_mode = conv::parse_f0_mode(
      req_json.value("f0_mode", cfg.f0_mode));
  req.source_mel = load_standardized(source_wav, &req.source_f0);
  req.target_reference = load_standardized(target_ref, nullptr);
  bool target_found = false;
  for (const auto& p : profiles)
    if (p.speaker_id == target_id) {
      req.target_profile = p;
      target_found = true;
    }
  require(target_found, Errc::config, "unknown target speaker: " + target_id);
  if (req_json.contains("source_speaker_id")) {
    const std::string sid = req_json["source_speaker_id"].get<std::string>();
    for (const auto& p : profiles)
      if (p.speaker_id == sid) {
        req.source_profile = p;
        req.have_source_profile = true;
      }
    if (!req.have_source_profile)
      warn("source speaker " + sid +
           " has no stored profile; using track statistics");
  }
  if (req.f0_mode == conv::F0Mode::explicit_track) {
    require(req_json.contains("explicit_f0"), Errc::config,
            "explicit F0 mode needs an explicit_f0 path in the request");
    req.explicit_track =
        io::load_f0(req_json["explicit_f0"].get<std::string>());
  }

  const conv::ConversionResult res = conv::convert(req, m);
  fs::create_directories(paths.converted_dir());
  const std::string stem =
      fs::path(source_wav).stem().string() + "_to_" + target_id;
  const std::string mel_path = paths.converted_dir() + "/" + stem + ".mel";
  io::save_mel(mel_path, res.mel);
  std::string wav_path;
  if (cfg.render_wav) {
    const Vec audio = conv::render_waveform(res.mel, standardizer, mel_cfg);
    wav_path = paths.converted_dir() + "/" + stem + ".wav";
    write_wav(wav_path, audio, 16000);
  }
  io::json meta = config::run_meta(cfg);
  meta["checkpoint"] = ckpt_path;
  meta["request"] = req_path;
  meta["f0_mode"] = conv::f0_mode_name(req.f0_mode);
  meta["frames"] = res.mel.frames();
  meta["mel"] = mel_path;
  if (!wav_path.empty()) meta["wav"] = wav_path;
  io::write_json_file(paths.converted_dir() + "/" + stem + ".meta.json", meta);
  std::cout << "convert done: " << mel_path
            << (wav_path.empty() ? "" : " and " + wav_path) << "\n";
}

inline eval::PairResult evaluate_direction(const model::Model& m,
                                           const data::DataStore& store,
                                           const std::string& src,
                                           const std::string& tgt,
                                           conv::F0Mode mode) {
  eval::PairResult pr;
  pr.source_speaker = src;
  pr.target_speaker = tgt;
  pr.f0_mode = conv::f0_mode_name(mode);
  const data::TrainItem* ref = nullptr;
  for (const auto& item : store.train_items)
    if (item.speaker_id == tgt) {
      ref = &item;
      break;
    }
  require(ref != nullptr, Errc::insufficient_data,
          "no training utterances for target speaker " + tgt);
  std::vector<MelSpectrogram> converted;
  for (const auto& item : store.val_items) {
    if (item.speaker_id != src) continue;
    conv::ConversionRequest req;
    req.source_mel = item.mel;
    req.source_f0 = item.f0;
    req.target_reference = ref->mel;
    req.target_profile = store.profile(tgt);
    req.f0_mode = mode;
    req.have_source_profile = true;
    req.source_profile = store.profile(src);
    const conv::ConversionResult res = conv::convert(req, m);
    const F0Track measured = m.encode_f0(res.mel);
    pr.utterances += 1;
    pr.f0_rmse_covoiced += eval::f0_rmse(res.conditioning, measured);
    pr.f0_rmse_inclusive += eval::f0_rmse_inclusive(res.conditioning, measured);
    if (eval::check_time_sync(item.mel, res.mel))
      pr.sync_pass += 1;
    else
      pr.sync_fail += 1;
    converted.push_back(res.mel);
  }
  if (pr.utterances == 0) {
    warn("no validation utterances for source speaker " + src);
  } else {
    pr.f0_rmse_covoiced /= static_cast<double>(pr.utterances);
    pr.f0_rmse_inclusive /= static_cast<double>(pr.utterances);
  }
  pr.speaker_proxy =
      eval::speaker_similarity_proxy(converted, store.speaker_index(tgt), m);
  return pr;
}

inline void run_evaluate(const config::RunConfig& cfg) {
  const OutPaths paths{cfg.out_dir};
  const std::string ckpt_path = resolve_model_checkpoint(cfg);
  const data::DataStore store = load_prepared_store(cfg);
  const model::Model m = load_model(ckpt_path);
  require(static_cast<int>(store.speakers.size()) == m.dims.n_speakers,
          Errc::config, "checkpoint speaker count differs from the dataset");
  std::string src = cfg.src_speaker, tgt = cfg.tgt_speaker;
  if (src.empty()) src = store.speakers.front();
  if (tgt.empty())
    for (const auto& s : store.speakers)
      if (s != src) {
        tgt = s;
        break;
      }
  store.speaker_index(src);
  store.speaker_index(tgt);
  require(src != tgt, Errc::config,
          "evaluation pair must name two distinct speakers");
  const conv::F0Mode mode = conv::parse_f0_mode(cfg.f0_mode);

  eval::EvalReport report;
  report.config_hash = config::config_hash(cfg);
  report.seed = cfg.seed;
  report.version = version();
  report.checkpoint = ckpt_path;
  report.pairs.push_back(evaluate_direction(m, store, src, tgt, mode));
  report.pairs.push_back(evaluate_direction(m, store, tgt, src, mode));
  io::write_json_file(paths.eval_report(), report.to_json());
  io::write_text_file(paths.eval_table(), report.text_table());
  std::cout << report.text_table();
  std::cout << "evaluate done: " << paths.eval_report() << "\n";
}

inline void run_synth_data(const config::RunConfig& cfg) {
  require(!cfg.dataset_root.empty(), Errc::config, "dataset_root is not set");
  synth::SynthSpec spec;
  spec.kind = cfg.synth_kind;
  spec.n_speakers = cfg.synth_speakers;
  spec.utterances_per_speaker = cfg.synth_utterances;
  spec.seed = cfg.seed;
  synth::generate_dataset(cfg.dataset_root, spec);
  std::cout << "synth-data done: " << cfg.dataset_root << "\n";
}

inline void run_stage(const config::RunConfig& cfg, const std::string& stage) {
  if (stage == "prepare") run_prepare(cfg);
  else if (stage == "train-f0") run_train_f0(cfg);
  else if (stage == "pretrain") run_pretrain(cfg);
  else if (stage == "finetune") run_finetune(cfg);
  else if (stage == "convert") run_convert(cfg);
  else if (stage == "evaluate") run_evaluate(cfg);
  else if (stage == "synth-data") run_synth_data(cfg);
  else raise(Errc::config, "unknown stage: " + stage);
}

}  // namespace vreen::pipeline

#endif  // VREEN_PIPELINE_HPP_
