// vreen/config.hpp

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

// Run configuration: flat key=value text file, CLI overrides on top, an
// environment override for the dataset root, and a stable content hash that
// every output artifact embeds.

#ifndef VREEN_CONFIG_HPP_
#define VREEN_CONFIG_HPP_

#include <cstdlib>
#include <map>
#include <sstream>
#include <string>

#include "vreen/common.hpp"
#include "vreen/io.hpp"
#include "vreen/model.hpp"
#include "vreen/training.hpp"

namespace vreen::config {

struct RunConfig {
  std::string dataset_root;
  std::string out_dir = "runs/default";
  uint64_t seed = 1234;

  model::ModelDims dims;

  long f0_steps = 400;
  long pretrain_steps = 400;
  long finetune_steps = 200;

  int batch_size = 4;
  double learning_rate = 1e-4;
  double lambda_adv = 1.0;
  double lambda_ctr = 1.0;
  double lambda_se = 1.0;
  double lambda_f0_start = 1e-6;
  double lambda_f0_end = 1e-2;
  double ramp_fraction = 0.8;
  double contrastive_tau = 0.1;
  std::string regime = "diff_id";
  long checkpoint_every = 0;
  bool adv_on_reconstruction = false;
  bool disc_sees_reconstruction = false;
  long progress_every = 0;

  std::string src_speaker;
  std::string tgt_speaker;
  std::string f0_mode = "transfer_normalized";
  std::string convert_request;
  std::string checkpoint;
  bool render_wav = true;

  std::string synth_kind = "formant";
  int synth_speakers = 2;
  int synth_utterances = 10;
};

inline std::map<std::string, std::string> parse_kv_text(
    const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const size_t eq = line.find('=');
    require(eq != std::string::npos, Errc::config,
            origin + ":" + std::to_string(lineno) + ": expected key=value");
    auto strip = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    require(!key.empty(), Errc::config,
            origin + ":" + std::to_string(lineno) + ": empty key");
    out[key] = strip(line.substr(eq + 1));
  }
  return out;
}

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  raise(Errc::config, "config key " + key + " expects a boolean, got " + v);
}

template <typename T>
T parse_num(const std::string& v, const std::string& key) {
  std::istringstream in(v);
  T out{};
  in >> out;
  require(!in.fail() && in.eof(), Errc::config,
          "config key " + key + " has malformed value " + v);
  return out;
}

}  // namespace detail

inline void apply_kv(RunConfig& cfg,
                     const std::map<std::string, std::string>& kv) {
  using detail::parse_bool;
  using detail::parse_num;
  for (const auto& [key, value] : kv) {
    if (key == "dataset_root") cfg.dataset_root = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "seed") cfg.seed = parse_num<uint64_t>(value, key);
    else if (key == "n_mels") cfg.dims.n_mels = parse_num<int>(value, key);
    else if (key == "content_dim") cfg.dims.content_dim = parse_num<int>(value, key);
    else if (key == "speaker_dim") cfg.dims.speaker_dim = parse_num<int>(value, key);
    else if (key == "content_hidden") cfg.dims.content_hidden = parse_num<int>(value, key);
    else if (key == "speaker_hidden") cfg.dims.speaker_hidden = parse_num<int>(value, key);
    else if (key == "f0_hidden") cfg.dims.f0_hidden = parse_num<int>(value, key);
    else if (key == "decoder_hidden") cfg.dims.decoder_hidden = parse_num<int>(value, key);
    else if (key == "disc_channels") cfg.dims.disc_channels = parse_num<int>(value, key);
    else if (key == "f0_steps") cfg.f0_steps = parse_num<long>(value, key);
    else if (key == "pretrain_steps") cfg.pretrain_steps = parse_num<long>(value, key);
    else if (key == "finetune_steps") cfg.finetune_steps = parse_num<long>(value, key);
    else if (key == "batch_size") cfg.batch_size = parse_num<int>(value, key);
    else if (key == "learning_rate") cfg.learning_rate = parse_num<double>(value, key);
    else if (key == "lambda_adv") cfg.lambda_adv = parse_num<double>(value, key);
    else if (key == "lambda_ctr") cfg.lambda_ctr = parse_num<double>(value, key);
    else if (key == "lambda_se") cfg.lambda_se = parse_num<double>(value, key);
    else if (key == "lambda_f0_start") cfg.lambda_f0_start = parse_num<double>(value, key);
    else if (key == "lambda_f0_end") cfg.lambda_f0_end = parse_num<double>(value, key);
    else if (key == "ramp_fraction") cfg.ramp_fraction = parse_num<double>(value, key);
    else if (key == "contrastive_tau") cfg.contrastive_tau = parse_num<double>(value, key);
    else if (key == "regime") cfg.regime = value;
    else if (key == "checkpoint_every") cfg.checkpoint_every = parse_num<long>(value, key);
    else if (key == "adv_on_reconstruction") cfg.adv_on_reconstruction = parse_bool(value, key);
    else if (key == "disc_sees_reconstruction") cfg.disc_sees_reconstruction = parse_bool(value, key);
    else if (key == "progress_every") cfg.progress_every = parse_num<long>(value, key);
    else if (key == "src_speaker") cfg.src_speaker = value;
    else if (key == "tgt_speaker") cfg.tgt_speaker = value;
    else if (key == "f0_mode") cfg.f0_mode = value;
    else if (key == "convert_request") cfg.convert_request = value;
    else if (key == "checkpoint") cfg.checkpoint = value;
    else if (key == "render_wav") cfg.render_wav = parse_bool(value, key);
    else if (key == "synth_kind") cfg.synth_kind = value;
    else if (key == "synth_speakers") cfg.synth_speakers = parse_num<int>(value, key);
    else if (key == "synth_utterances") cfg.synth_utterances = parse_num<int>(value, key);
    else raise(Errc::config, "unknown config key: " + key);
  }
}

inline RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  apply_kv(cfg, parse_kv_text(io::read_text_file(path), path));
  return cfg;
}

inline void apply_env(RunConfig& cfg) {
  if (const char* root = std::getenv("VREEN_DATASET_ROOT"))
    if (*root) cfg.dataset_root = root;
}

// Canonical form: every field as a sorted key=value line.  The hash of this
// text identifies the run configuration in all artifacts.
inline std::string canonical_text(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  auto put_num = [&kv](const std::string& k, auto v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    kv[k] = s.str();
  };
  kv["dataset_root"] = c.dataset_root;
  kv["out_dir"] = c.out_dir;
  put_num("seed", c.seed);
  put_num("n_mels", c.dims.n_mels);
  put_num("content_dim", c.dims.content_dim);
  put_num("speaker_dim", c.dims.speaker_dim);
  put_num("content_hidden", c.dims.content_hidden);
  put_num("speaker_hidden", c.dims.speaker_hidden);
  put_num("f0_hidden", c.dims.f0_hidden);
  put_num("decoder_hidden", c.dims.decoder_hidden);
  put_num("disc_channels", c.dims.disc_channels);
  put_num("f0_steps", c.f0_steps);
  put_num("pretrain_steps", c.pretrain_steps);
  put_num("finetune_steps", c.finetune_steps);
  put_num("batch_size", c.batch_size);
  put_num("learning_rate", c.learning_rate);
  put_num("lambda_adv", c.lambda_adv);
  put_num("lambda_ctr", c.lambda_ctr);
  put_num("lambda_se", c.lambda_se);
  put_num("lambda_f0_start", c.lambda_f0_start);
  put_num("lambda_f0_end", c.lambda_f0_end);
  put_num("ramp_fraction", c.ramp_fraction);
  put_num("contrastive_tau", c.contrastive_tau);
  kv["regime"] = c.regime;
  put_num("checkpoint_every", c.checkpoint_every);
  kv["adv_on_reconstruction"] = c.adv_on_reconstruction ? "true" : "false";
  kv["disc_sees_reconstruction"] =
      c.disc_sees_reconstruction ? "true" : "false";
  kv["src_speaker"] = c.src_speaker;
  kv["tgt_speaker"] = c.tgt_speaker;
  kv["f0_mode"] = c.f0_mode;
  kv["convert_request"] = c.convert_request;
  kv["checkpoint"] = c.checkpoint;
  kv["render_wav"] = c.render_wav ? "true" : "false";
  kv["synth_kind"] = c.synth_kind;
  put_num("synth_speakers", c.synth_speakers);
  put_num("synth_utterances", c.synth_utterances);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

inline std::string config_hash(const RunConfig& c) {
  return hex64(fnv1a64(canonical_text(c)));
}

inline io::json run_meta(const RunConfig& c) {
  return io::json{{"config_hash", config_hash(c)},
                  {"seed", c.seed},
                  {"version", version()}};
}

inline train::TrainConfig make_train_config(const RunConfig& c,
                                            const std::string& stage) {
  train::TrainConfig t;
  if (stage == "f0") t.total_steps = c.f0_steps;
  else if (stage == "pretrain") t.total_steps = c.pretrain_steps;
  else if (stage == "finetune") t.total_steps = c.finetune_steps;
  else raise(Errc::config, "unknown training stage: " + stage);
  t.batch_size = c.batch_size;
  t.learning_rate = c.learning_rate;
  t.lambda_adv = c.lambda_adv;
  t.lambda_ctr = c.lambda_ctr;
  t.lambda_se = c.lambda_se;
  t.lambda_f0_start = c.lambda_f0_start;
  t.lambda_f0_end = c.lambda_f0_end;
  t.ramp_fraction = c.ramp_fraction;
  t.contrastive_tau = c.contrastive_tau;
  t.regime = train::parse_regime(c.regime);
  t.checkpoint_every = c.checkpoint_every;
  t.adv_on_reconstruction = c.adv_on_reconstruction;
  t.disc_sees_reconstruction = c.disc_sees_reconstruction;
  // Distinct deterministic stream per stage.
  t.seed = c.seed + fnv1a64(stage) % 1000003;
  return t;
}

}  // namespace vreen::config

#endif  // VREEN_CONFIG_HPP_
