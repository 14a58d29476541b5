// vreen/training.hpp

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

// Training stages: F0-encoder pre-training, multi-speaker dual-mode
// pre-training and pair fine-tuning.  One sequential loop owns all
// parameter mutation; the discriminator always steps before the generator.

#ifndef VREEN_TRAINING_HPP_
#define VREEN_TRAINING_HPP_

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vreen/autodiff.hpp"
#include "vreen/common.hpp"
#include "vreen/dataset.hpp"
#include "vreen/eval.hpp"
#include "vreen/io.hpp"
#include "vreen/losses.hpp"
#include "vreen/model.hpp"
#include "vreen/optimizer.hpp"

namespace vreen::train {

using ad::Graph;
using ad::Node;
using ad::Tensor;
using nn::Binder;

enum class Regime { same_id, diff_id };

inline Regime parse_regime(const std::string& s) {
  if (s == "same_id") return Regime::same_id;
  if (s == "diff_id") return Regime::diff_id;
  raise(Errc::config, "unknown regime: " + s);
}

inline std::string regime_name(Regime r) {
  return r == Regime::same_id ? "same_id" : "diff_id";
}

struct TrainConfig {
  long total_steps = 1000;
  int batch_size = 4;
  double learning_rate = 1e-4;
  double lambda_adv = 1.0;
  double lambda_ctr = 1.0;
  double lambda_se = 1.0;
  double lambda_f0_start = 1e-6;
  double lambda_f0_end = 1e-2;
  double ramp_fraction = 0.8;
  double contrastive_tau = 0.1;
  uint64_t seed = 1234;
  Regime regime = Regime::diff_id;
  long checkpoint_every = 0;  // 0: only the final checkpoint
  // Unstated in the source material, kept off by default: whether the
  // generator's adversarial term and the discriminator's fake pool also
  // cover reconstruction-pass outputs.
  bool adv_on_reconstruction = false;
  bool disc_sees_reconstruction = false;

  void validate() const {
    require(total_steps >= 1 && batch_size >= 1, Errc::config,
            "total_steps and batch_size must be positive");
    require(lambda_f0_start <= lambda_f0_end, Errc::config,
            "lambda_f0_start must not exceed lambda_f0_end");
    require(ramp_fraction > 0.0 && ramp_fraction <= 1.0, Errc::config,
            "ramp_fraction must lie in (0, 1]");
    require(lambda_adv >= 0 && lambda_ctr >= 0 && lambda_se >= 0,
            Errc::config, "loss weights must be non-negative");
  }
};

// Linear ramp over the first ramp_fraction of training, flat afterwards.
inline double lambda_f0_schedule(long step, const TrainConfig& cfg) {
  require(step >= 0 && step <= cfg.total_steps, Errc::invalid_input,
          "schedule step outside [0, total_steps]");
  const double ramp_steps = cfg.ramp_fraction * cfg.total_steps;
  if (static_cast<double>(step) >= ramp_steps) return cfg.lambda_f0_end;
  const double frac = static_cast<double>(step) / ramp_steps;
  return cfg.lambda_f0_start +
         (cfg.lambda_f0_end - cfg.lambda_f0_start) * frac;
}

struct StepLosses {
  long step = 0;
  double l_rc = 0, l_f0 = 0, l_ctr = 0, l_se = 0;
  double l_adv_g = 0, l_adv_d = 0;
  double lambda_f0 = 0;

  io::json to_json() const {
    return io::json{{"step", step},       {"l_rc", l_rc},
                    {"l_f0", l_f0},       {"l_ctr", l_ctr},
                    {"l_se", l_se},       {"l_adv_g", l_adv_g},
                    {"l_adv_d", l_adv_d}, {"lambda_f0", lambda_f0}};
  }
};

struct TrainState {
  long step = 0;
  model::Model model;
  opt::Adam opt_g, opt_d, opt_f0;
  Rng rng{0};
};

inline TrainState make_state(const model::ModelDims& dims,
                             const TrainConfig& cfg) {
  TrainState state;
  state.model.init(dims, cfg.seed);
  opt::AdamConfig oc;
  oc.lr = cfg.learning_rate;
  state.opt_g = opt::Adam(oc);
  state.opt_d = opt::Adam(oc);
  state.opt_f0 = opt::Adam(oc);
  state.rng = Rng(cfg.seed + 0x9E3779B9u);
  return state;
}

inline std::vector<Tensor*> generator_ptrs(model::Model& m) {
  std::vector<Tensor*> out;
  m.generator_tensors([&out](Tensor& t) { out.push_back(&t); });
  return out;
}

inline std::vector<Tensor*> discriminator_ptrs(model::Model& m) {
  std::vector<Tensor*> out;
  m.discriminator_tensors([&out](Tensor& t) { out.push_back(&t); });
  return out;
}

inline std::vector<Tensor*> f0_ptrs(model::Model& m) {
  std::vector<Tensor*> out;
  m.f0_tensors([&out](Tensor& t) { out.push_back(&t); });
  return out;
}

// ---- batch construction ----

inline std::vector<const data::TrainItem*> sample_batch(
    const std::vector<data::TrainItem>& pool, int batch_size, Rng& rng,
    Regime regime) {
  require(!pool.empty(), Errc::config, "empty training pool");
  auto draw = [&]() {
    return &pool[static_cast<size_t>(
        rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
  };
  std::vector<const data::TrainItem*> batch;
  for (int attempt = 0; attempt < 16; ++attempt) {
    batch.clear();
    for (int i = 0; i < batch_size; ++i) batch.push_back(draw());
    if (regime == Regime::same_id || batch_size == 1) return batch;
    bool mixed = false;
    for (const auto* item : batch)
      mixed = mixed || item->speaker_index != batch[0]->speaker_index;
    if (mixed) return batch;
  }
  // Force a second speaker into the last slot.
  std::vector<const data::TrainItem*> others;
  for (const auto& item : pool)
    if (item.speaker_index != batch[0]->speaker_index)
      others.push_back(&item);
  require(!others.empty(), Errc::regime,
          "diff_id regime requires at least two speakers");
  batch.back() =
      others[static_cast<size_t>(
          rng.uniform_int(0, static_cast<int>(others.size()) - 1))];
  return batch;
}

// Conversion-pass partner: an utterance of the source's own speaker under
// same_id (another one when available), a uniformly random different
// speaker's utterance under diff_id.
inline std::vector<int> pick_partners(
    const std::vector<const data::TrainItem*>& batch, Rng& rng,
    Regime regime) {
  const int n = static_cast<int>(batch.size());
  std::vector<int> partners(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> candidates;
    if (regime == Regime::same_id) {
      for (int j = 0; j < n; ++j)
        if (j != i && batch[j]->speaker_index == batch[i]->speaker_index)
          candidates.push_back(j);
      if (candidates.empty()) candidates.push_back(i);
      partners[i] = candidates[static_cast<size_t>(rng.uniform_int(
          0, static_cast<int>(candidates.size()) - 1))];
    } else {
      std::vector<int> speakers;
      for (int j = 0; j < n; ++j)
        if (batch[j]->speaker_index != batch[i]->speaker_index &&
            std::find(speakers.begin(), speakers.end(),
                      batch[j]->speaker_index) == speakers.end())
          speakers.push_back(batch[j]->speaker_index);
      require(!speakers.empty(), Errc::regime,
              "diff_id regime with a single-speaker batch");
      std::sort(speakers.begin(), speakers.end());
      const int spk = speakers[static_cast<size_t>(rng.uniform_int(
          0, static_cast<int>(speakers.size()) - 1))];
      for (int j = 0; j < n; ++j)
        if (batch[j]->speaker_index == spk) candidates.push_back(j);
      partners[i] = candidates[static_cast<size_t>(rng.uniform_int(
          0, static_cast<int>(candidates.size()) - 1))];
    }
  }
  return partners;
}

// ---- the dual-mode step ----

inline StepLosses dual_mode_step(TrainState& state,
                                 const std::vector<const data::TrainItem*>&
                                     batch,
                                 const TrainConfig& cfg) {
  require(!batch.empty(), Errc::invalid_input, "empty batch");
  require(state.model.f0_frozen(), Errc::state,
          "dual_mode_step requires a frozen F0 encoder");
  model::Model& m = state.model;
  const int n = static_cast<int>(batch.size());
  const double lam_f0 = lambda_f0_schedule(state.step, cfg);
  // lambda_adv == 0 switches the adversarial game off entirely; the step
  // degenerates to auto-encoder training and consumes no partner draws.
  const bool adversarial = cfg.lambda_adv > 0.0;

  StepLosses losses;
  losses.step = state.step + 1;
  losses.lambda_f0 = lam_f0;

  std::vector<int> partners;
  std::vector<Mat> converted;  // detached conversion outputs for the D pass
  std::vector<Mat> reconstructed;
  if (adversarial) {
    if (cfg.regime == Regime::diff_id) {
      bool mixed = false;
      for (const auto* item : batch)
        mixed = mixed || item->speaker_index != batch[0]->speaker_index;
      require(mixed, Errc::regime, "diff_id regime with a single-speaker batch");
    }
    partners = pick_partners(batch, state.rng, cfg.regime);

    Graph gi(false);
    Binder bi(gi, false);
    for (int i = 0; i < n; ++i) {
      require(batch[i]->mel.frames() >= 16, Errc::input_too_short,
              "adversarial training requires at least 16 frames");
      Node hc = m.encode_content_audio_g(gi, bi, gi.input(batch[i]->mel.values));
      Node hs = m.encode_speaker_g(gi, bi,
                                   gi.input(batch[partners[i]]->mel.values));
      Node out = m.decode_g(gi, bi, hc, hs, batch[i]->f0.values);
      converted.push_back(gi.value(out));
      if (cfg.disc_sees_reconstruction || cfg.adv_on_reconstruction) {
        Node hs_own =
            m.encode_speaker_g(gi, bi, gi.input(batch[i]->mel.values));
        Node rec = m.decode_g(gi, bi, hc, hs_own, batch[i]->f0.values);
        reconstructed.push_back(gi.value(rec));
      }
    }

    // (c) discriminator update, stepped before the generator.
    Graph gd;
    Binder bd(gd, true);
    Node l_d{-1};
    for (int i = 0; i < n; ++i) {
      Node logit_real = m.discriminate_g(gd, bd, gd.input(batch[i]->mel.values));
      Node logit_fake = m.discriminate_g(gd, bd, gd.input(converted[i]));
      Node term = losses::adversarial_d_loss_g(gd, logit_real, logit_fake);
      if (cfg.disc_sees_reconstruction) {
        Node logit_rec = m.discriminate_g(gd, bd, gd.input(reconstructed[i]));
        term = gd.scale(
            gd.add(term, losses::adversarial_d_loss_g(gd, logit_real,
                                                      logit_rec)),
            0.5);
      }
      l_d = l_d.valid() ? gd.add(l_d, term) : term;
    }
    l_d = gd.scale(l_d, 1.0 / n);
    losses.l_adv_d = gd.scalar(l_d);
    gd.backward(l_d);
    state.opt_d.step(discriminator_ptrs(m));
  }

  // (a)+(b)+(d) generator pass against the just-updated discriminator.
  Graph gg;
  Binder bg(gg, true);    // generator parameters (frozen E^F0 binds constant)
  Binder bdc(gg, false);  // discriminator held constant here
  Node sum_rc{-1}, sum_f0{-1}, sum_ctr{-1}, sum_se{-1}, sum_adv{-1};
  int ctr_items = 0;
  auto acc = [&gg](Node& sum, Node term) {
    sum = sum.valid() ? gg.add(sum, term) : term;
  };

  for (int i = 0; i < n; ++i) {
    const data::TrainItem& item = *batch[i];
    Node mel_in = gg.input(item.mel.values);
    Node hc = m.encode_content_audio_g(gg, bg, mel_in);
    Node hs = m.encode_speaker_g(gg, bg, mel_in);
    Node recon = m.decode_g(gg, bg, hc, hs, item.f0.values);
    acc(sum_rc, losses::reconstruction_loss_g(gg, mel_in, recon));
    acc(sum_f0, losses::f0_loss_g(gg, item.f0.values,
                                  m.f0_track_g(gg, bg, recon)));
    if (item.phoneme_ids.size() ==
        static_cast<size_t>(item.mel.frames())) {
      Node ht = m.encode_content_text_g(gg, bg, item.phoneme_ids);
      acc(sum_ctr,
          losses::contrastive_loss_g(gg, hc, ht, cfg.contrastive_tau));
      ++ctr_items;
    }
    acc(sum_se, losses::speaker_class_loss_g(
                    gg, m.classify_logits_g(gg, bg, hs), item.speaker_index));
    if (adversarial) {
      Node hs_p = m.encode_speaker_g(
          gg, bg, gg.input(batch[partners[i]]->mel.values));
      Node convd = m.decode_g(gg, bg, hc, hs_p, item.f0.values);
      Node adv_term = losses::adversarial_g_loss_g(
          gg, m.discriminate_g(gg, bdc, convd));
      if (cfg.adv_on_reconstruction) {
        adv_term = gg.scale(
            gg.add(adv_term, losses::adversarial_g_loss_g(
                                 gg, m.discriminate_g(gg, bdc, recon))),
            0.5);
      }
      acc(sum_adv, adv_term);
    }
  }

  Node l_rc = gg.scale(sum_rc, 1.0 / n);
  Node l_f0 = gg.scale(sum_f0, 1.0 / n);
  Node l_se = gg.scale(sum_se, 1.0 / n);
  Node total = gg.add(l_rc, gg.scale(l_f0, lam_f0));
  total = gg.add(total, gg.scale(l_se, cfg.lambda_se));
  if (ctr_items > 0) {
    Node l_ctr = gg.scale(sum_ctr, 1.0 / ctr_items);
    total = gg.add(total, gg.scale(l_ctr, cfg.lambda_ctr));
    losses.l_ctr = gg.scalar(l_ctr);
  }
  if (adversarial) {
    Node l_adv = gg.scale(sum_adv, 1.0 / n);
    total = gg.add(total, gg.scale(l_adv, cfg.lambda_adv));
    losses.l_adv_g = gg.scalar(l_adv);
  }
  losses.l_rc = gg.scalar(l_rc);
  losses.l_f0 = gg.scalar(l_f0);
  losses.l_se = gg.scalar(l_se);
  gg.backward(total);
  state.opt_g.step(generator_ptrs(m));

  state.step += 1;
  return losses;
}

// ---- F0 encoder pre-training ----

struct F0StepLosses {
  long step = 0;
  double l_value = 0;    // Hz^2, voiced frames only
  double l_voicing = 0;  // binary cross-entropy

  io::json to_json() const {
    return io::json{
        {"step", step}, {"l_value", l_value}, {"l_voicing", l_voicing}};
  }
};

// Squared error on voiced frames plus voicing cross-entropy.  The value
// term is scaled down so both heads pull the shared trunk at commensurate
// magnitudes (Hz^2 values start in the 1e4 range).
inline constexpr double kF0ValueWeight = 1e-3;

inline F0StepLosses f0_pretrain_step(
    TrainState& state, const std::vector<const data::TrainItem*>& batch,
    const TrainConfig& cfg) {
  require(!batch.empty(), Errc::invalid_input, "empty batch");
  model::Model& m = state.model;
  require(!m.f0_frozen(), Errc::state,
          "F0 encoder is already frozen; cannot pre-train");
  Graph g;
  Binder b(g, true);
  Node sum{-1};
  double value_acc = 0, voicing_acc = 0;
  for (const auto* item : batch) {
    model::Model::F0Heads heads =
        m.f0_heads_g(g, b, g.input(item->mel.values));
    const long T = item->mel.frames();
    Mat target(1, T), mask(1, T);
    long voiced = 0;
    for (long t = 0; t < T; ++t) {
      target(0, t) = item->f0.values[t];
      mask(0, t) = item->f0.voiced(t) ? 1.0 : 0.0;
      voiced += item->f0.voiced(t) ? 1 : 0;
    }
    Node item_loss{-1};
    if (voiced > 0) {
      Node diff = g.sub(heads.value, g.input(target));
      Node masked = g.cmul_const(g.square(diff), mask);
      Node value_mse =
          g.scale(g.sum_all(masked), 1.0 / static_cast<double>(voiced));
      value_acc += g.scalar(value_mse);
      item_loss = g.scale(value_mse, kF0ValueWeight);
    }
    // softplus(q) - m*q == -[m log sig(q) + (1-m) log(1-sig(q))]
    Node bce = g.mean_all(g.sub(g.softplus(heads.voicing_logit),
                                g.cmul_const(heads.voicing_logit, mask)));
    voicing_acc += g.scalar(bce);
    item_loss = item_loss.valid() ? g.add(item_loss, bce) : bce;
    sum = sum.valid() ? g.add(sum, item_loss) : item_loss;
  }
  Node total = g.scale(sum, 1.0 / static_cast<double>(batch.size()));
  g.backward(total);
  state.opt_f0.step(f0_ptrs(m));
  state.step += 1;
  return F0StepLosses{state.step, value_acc / batch.size(),
                      voicing_acc / batch.size()};
}

// ---- stage plumbing ----

struct StageIO {
  std::string out_dir;
  std::string stage;
  std::string log_path;
  io::json run_meta;  // config_hash, seed, version
  std::vector<std::string> speakers;
  long progress_every = 0;  // stderr heartbeat; 0 silences it

  std::string checkpoint_path(long step) const {
    return out_dir + "/ckpt_" + stage + "_" + std::to_string(step) + ".bin";
  }
};

inline void save_train_checkpoint(TrainState& state, const std::string& path,
                                  const StageIO& io_cfg,
                                  const io::json& extra = {}) {
  io::Checkpoint ck;
  ck.metadata = io_cfg.run_meta;
  ck.metadata["stage"] = io_cfg.stage;
  ck.metadata["step"] = state.step;
  ck.metadata["rng_state"] = state.rng.serialize();
  ck.metadata["speakers"] = io_cfg.speakers;
  ck.metadata["dims"] = model::dims_to_json(state.model.dims);
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it)
      ck.metadata[it.key()] = it.value();
  model::append_model_tensors(ck, state.model);
  state.opt_g.append_to(ck, "optim_g");
  state.opt_d.append_to(ck, "optim_d");
  state.opt_f0.append_to(ck, "optim_f0");
  io::save_checkpoint(path, ck);
  io::json side = ck.metadata;
  side.erase("tensors");
  io::write_json_file(path + ".meta.json", side);
}

inline TrainState load_train_checkpoint(const std::string& path,
                                        const TrainConfig& cfg) {
  io::Checkpoint ck = io::load_checkpoint(path);
  TrainState state = make_state(model::dims_from_json(ck.metadata.at("dims")),
                                cfg);
  model::load_model_tensors(ck, state.model);
  state.opt_g.load_from(ck, "optim_g");
  state.opt_d.load_from(ck, "optim_d");
  state.opt_f0.load_from(ck, "optim_f0");
  state.step = ck.metadata.value("step", 0L);
  if (ck.metadata.contains("rng_state"))
    state.rng.deserialize(ck.metadata["rng_state"].get<std::string>());
  return state;
}

inline std::vector<std::string> checkpoint_speakers(const std::string& path) {
  io::Checkpoint ck = io::load_checkpoint(path);
  std::vector<std::string> out;
  if (ck.metadata.contains("speakers"))
    out = ck.metadata["speakers"].get<std::vector<std::string>>();
  return out;
}

// ---- validation ----

inline MelSpectrogram reconstruct(const model::Model& m,
                                  const data::TrainItem& item) {
  CodeBundle codes{m.encode_content(item.mel), m.encode_speaker(item.mel),
                   item.f0};
  return m.decode(codes);
}

struct ValMetrics {
  double l_rc = 0;
  double f0_rmse = 0;
};

inline ValMetrics compute_validation(const model::Model& m,
                                     const std::vector<data::TrainItem>&
                                         items) {
  ValMetrics out;
  if (items.empty()) return out;
  for (const auto& item : items) {
    MelSpectrogram recon = reconstruct(m, item);
    out.l_rc += losses::reconstruction_loss(item.mel, recon);
    out.f0_rmse += eval::f0_rmse(item.f0, m.encode_f0(recon));
  }
  out.l_rc /= static_cast<double>(items.size());
  out.f0_rmse /= static_cast<double>(items.size());
  return out;
}

// ---- stage drivers ----

inline void pretrain_f0_encoder(TrainState& state,
                                const std::vector<data::TrainItem>& items,
                                const TrainConfig& cfg,
                                const StageIO& io_cfg) {
  cfg.validate();
  require(!items.empty(), Errc::config,
          "F0 pre-training needs a non-empty dataset");
  std::ofstream log(io_cfg.log_path, std::ios::trunc);
  require(log.good(), Errc::io, "cannot open log: " + io_cfg.log_path);
  log << io::json{{"meta", io_cfg.run_meta}}.dump() << "\n";
  while (state.step < cfg.total_steps) {
    auto batch =
        sample_batch(items, cfg.batch_size, state.rng, Regime::same_id);
    F0StepLosses losses = f0_pretrain_step(state, batch, cfg);
    log << losses.to_json().dump() << "\n";
    if (io_cfg.progress_every > 0 &&
        losses.step % io_cfg.progress_every == 0)
      std::fprintf(stderr, "[train-f0] step %ld l_value %.3f\n", losses.step,
                   losses.l_value);
  }
  state.model.set_f0_frozen(true);
  save_train_checkpoint(state, io_cfg.checkpoint_path(state.step), io_cfg);
}

inline void run_dual_mode(TrainState& state,
                          const std::vector<data::TrainItem>& pool,
                          const std::vector<data::TrainItem>& val_items,
                          const TrainConfig& cfg, const StageIO& io_cfg) {
  cfg.validate();
  require(!pool.empty(), Errc::config, "empty training pool");
  std::ofstream log(io_cfg.log_path, std::ios::trunc);
  require(log.good(), Errc::io, "cannot open log: " + io_cfg.log_path);
  log << io::json{{"meta", io_cfg.run_meta}}.dump() << "\n";
  auto checkpoint = [&](long step) {
    ValMetrics val = compute_validation(state.model, val_items);
    save_train_checkpoint(
        state, io_cfg.checkpoint_path(step), io_cfg,
        io::json{{"val_l_rc", val.l_rc}, {"val_f0_rmse", val.f0_rmse}});
  };
  while (state.step < cfg.total_steps) {
    auto batch = sample_batch(pool, cfg.batch_size, state.rng, cfg.regime);
    StepLosses losses = dual_mode_step(state, batch, cfg);
    log << losses.to_json().dump() << "\n";
    if (io_cfg.progress_every > 0 &&
        losses.step % io_cfg.progress_every == 0)
      std::fprintf(stderr, "[%s] step %ld l_rc %.4f\n", io_cfg.stage.c_str(),
                   losses.step, losses.l_rc);
    if (cfg.checkpoint_every > 0 && state.step % cfg.checkpoint_every == 0 &&
        state.step < cfg.total_steps)
      checkpoint(state.step);
  }
  checkpoint(state.step);
}

inline void pretrain_multispeaker(TrainState& state,
                                  const data::DataStore& store,
                                  const TrainConfig& cfg,
                                  const StageIO& io_cfg) {
  require(store.speakers.size() >= 2, Errc::config,
          "multi-speaker pre-training needs at least two speakers");
  run_dual_mode(state, store.train_items, store.val_items, cfg, io_cfg);
}

inline void finetune_pair(TrainState& state, const data::DataStore& store,
                          const std::string& src_speaker,
                          const std::string& tgt_speaker,
                          const TrainConfig& cfg, const StageIO& io_cfg) {
  store.speaker_index(src_speaker);  // raises config error when unknown
  store.speaker_index(tgt_speaker);
  require(src_speaker != tgt_speaker, Errc::config,
          "fine-tune pair must name two distinct speakers");
  auto filter = [&](const std::vector<data::TrainItem>& items) {
    std::vector<data::TrainItem> out;
    for (const auto& item : items)
      if (item.speaker_id == src_speaker || item.speaker_id == tgt_speaker)
        out.push_back(item);
    return out;
  };
  const std::vector<data::TrainItem> pool = filter(store.train_items);
  const std::vector<data::TrainItem> val = filter(store.val_items);
  require(!pool.empty(), Errc::config,
          "no training utterances for the fine-tune pair");
  run_dual_mode(state, pool, val, cfg, io_cfg);
}

}  // namespace vreen::train

#endif  // VREEN_TRAINING_HPP_
