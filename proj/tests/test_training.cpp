// tests/test_training.cpp

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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "vreen/training.hpp"

using namespace vreen;
using namespace vreen::train;

namespace {

model::ModelDims tiny_dims() {
  model::ModelDims d;
  d.n_mels = 6;
  d.phoneme_vocab = 8;
  d.n_speakers = 2;
  d.content_dim = 4;
  d.speaker_dim = 4;
  d.content_hidden = 3;
  d.speaker_hidden = 3;
  d.f0_hidden = 3;
  d.decoder_hidden = 3;
  d.disc_channels = 3;
  return d;
}

data::TrainItem make_item(const std::string& utt, const std::string& spk,
                          int spk_index, int T, Rng& rng) {
  data::TrainItem item;
  item.utterance_id = utt;
  item.speaker_id = spk;
  item.speaker_index = spk_index;
  item.mel.values = Mat(6, T);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < T; ++c) item.mel.values(r, c) = rng.normal();
  item.mel.standardized = true;
  item.f0.values = Vec(T);
  for (int t = 0; t < T; ++t)
    item.f0.values[t] = 140.0 + 30.0 * rng.uniform() + 20.0 * spk_index;
  item.phoneme_ids.assign(static_cast<size_t>(T), 1 + (spk_index + T) % 6);
  return item;
}

std::vector<data::TrainItem> make_pool(int per_speaker, int T, Rng& rng) {
  std::vector<data::TrainItem> pool;
  for (int s = 0; s < 2; ++s)
    for (int u = 0; u < per_speaker; ++u)
      pool.push_back(make_item("u" + std::to_string(u),
                               "p00" + std::to_string(s + 1), s, T, rng));
  return pool;
}

std::vector<Mat> snapshot(const std::vector<ad::Tensor*>& ptrs) {
  std::vector<Mat> out;
  for (const auto* t : ptrs) out.push_back(t->value);
  return out;
}

bool identical(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!(a[i].array() == b[i].array()).all()) return false;
  return true;
}

TrainConfig tiny_cfg() {
  TrainConfig cfg;
  cfg.total_steps = 6;
  cfg.batch_size = 2;
  cfg.learning_rate = 1e-3;
  cfg.seed = 11;
  return cfg;
}

std::filesystem::path work_dir() {
  const auto dir =
      std::filesystem::temp_directory_path() / "vreen_training_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("lambda_f0 ramps linearly then holds") {
  TrainConfig cfg;
  cfg.total_steps = 1000;
  cfg.lambda_f0_start = 1e-6;
  cfg.lambda_f0_end = 1e-2;
  cfg.ramp_fraction = 0.8;
  CHECK(lambda_f0_schedule(0, cfg) == Catch::Approx(1e-6).epsilon(1e-12));
  CHECK(lambda_f0_schedule(1000, cfg) == Catch::Approx(1e-2).epsilon(1e-12));
  CHECK(lambda_f0_schedule(800, cfg) == Catch::Approx(1e-2).epsilon(1e-12));
  // Halfway through the ramp.
  CHECK(lambda_f0_schedule(400, cfg) ==
        Catch::Approx(1e-6 + (1e-2 - 1e-6) * 0.5).epsilon(1e-12));
  CHECK(lambda_f0_schedule(400, cfg) == Catch::Approx(5.0005e-3));
  double prev = -1.0;
  for (long s = 0; s <= 1000; s += 25) {
    const double lam = lambda_f0_schedule(s, cfg);
    CHECK(lam >= prev);
    prev = lam;
  }
  CHECK_THROWS_AS(lambda_f0_schedule(-1, cfg), Error);
  CHECK_THROWS_AS(lambda_f0_schedule(1001, cfg), Error);
}

TEST_CASE("train config validation rejects bad ranges") {
  TrainConfig cfg;
  cfg.validate();
  TrainConfig bad = cfg;
  bad.ramp_fraction = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.ramp_fraction = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.lambda_f0_start = 1.0;
  bad.lambda_f0_end = 0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.lambda_adv = -0.1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.total_steps = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("split assignment holds out one in ten per speaker") {
  data::Manifest m;
  for (int u = 0; u < 10; ++u) {
    data::Utterance row;
    row.utterance_id = "p001/u" + std::to_string(u);
    row.speaker_id = "p001";
    m.rows.push_back(row);
  }
  data::assign_splits(m);
  int train = 0, val = 0;
  for (const auto& r : m.rows) (r.split == "val" ? val : train)++;
  CHECK(train == 9);
  CHECK(val == 1);
  CHECK(m.rows.back().split == "val");

  data::Manifest two;
  for (int s = 0; s < 2; ++s)
    for (int u = 0; u < 10; ++u) {
      data::Utterance row;
      row.utterance_id =
          "p00" + std::to_string(s + 1) + "/u" + std::to_string(u);
      row.speaker_id = "p00" + std::to_string(s + 1);
      two.rows.push_back(row);
    }
  data::assign_splits(two);
  train = val = 0;
  for (const auto& r : two.rows) (r.split == "val" ? val : train)++;
  CHECK(train == 18);
  CHECK(val == 2);

  data::Manifest one;
  data::Utterance only;
  only.utterance_id = "p001/u0";
  only.speaker_id = "p001";
  one.rows.push_back(only);
  data::assign_splits(one);
  CHECK(one.rows[0].split == "train");
}

TEST_CASE("diff_id batches always mix speakers") {
  Rng data_rng(1);
  const auto pool = make_pool(5, 18, data_rng);
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto batch = sample_batch(pool, 3, rng, Regime::diff_id);
    REQUIRE(batch.size() == 3);
    bool mixed = false;
    for (const auto* item : batch)
      mixed = mixed || item->speaker_index != batch[0]->speaker_index;
    CHECK(mixed);
  }
}

TEST_CASE("diff_id sampling fails loudly on a single-speaker pool") {
  Rng data_rng(3);
  std::vector<data::TrainItem> pool;
  for (int u = 0; u < 4; ++u)
    pool.push_back(make_item("u" + std::to_string(u), "p001", 0, 18, data_rng));
  Rng rng(4);
  try {
    sample_batch(pool, 2, rng, Regime::diff_id);
    FAIL("expected regime error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::regime);
  }
  // same_id has no mixing requirement.
  const auto batch = sample_batch(pool, 2, rng, Regime::same_id);
  CHECK(batch.size() == 2);
}

TEST_CASE("partners stay within or leave the speaker by regime") {
  Rng data_rng(5);
  const auto pool = make_pool(4, 18, data_rng);
  Rng rng(6);
  std::vector<const data::TrainItem*> batch;
  for (const auto& item : pool) batch.push_back(&item);
  const auto same = pick_partners(batch, rng, Regime::same_id);
  for (size_t i = 0; i < batch.size(); ++i)
    CHECK(batch[same[i]]->speaker_index == batch[i]->speaker_index);
  const auto diff = pick_partners(batch, rng, Regime::diff_id);
  for (size_t i = 0; i < batch.size(); ++i)
    CHECK(batch[diff[i]]->speaker_index != batch[i]->speaker_index);
}

TEST_CASE("dual_mode_step requires a frozen F0 encoder") {
  Rng data_rng(7);
  const auto pool = make_pool(2, 18, data_rng);
  TrainState state = make_state(tiny_dims(), tiny_cfg());
  std::vector<const data::TrainItem*> batch{&pool[0], &pool[2]};
  try {
    dual_mode_step(state, batch, tiny_cfg());
    FAIL("expected state error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::state);
  }
}

TEST_CASE("one dual-mode step moves G and D but never the frozen F0 encoder") {
  Rng data_rng(8);
  const auto pool = make_pool(2, 18, data_rng);
  const TrainConfig cfg = tiny_cfg();
  TrainState state = make_state(tiny_dims(), cfg);
  state.model.set_f0_frozen(true);
  const auto g_before = snapshot(generator_ptrs(state.model));
  const auto d_before = snapshot(discriminator_ptrs(state.model));
  const auto f0_before = snapshot(f0_ptrs(state.model));
  std::vector<const data::TrainItem*> batch{&pool[0], &pool[2]};
  const StepLosses losses = dual_mode_step(state, batch, cfg);
  CHECK(losses.step == 1);
  CHECK(std::isfinite(losses.l_rc));
  CHECK(losses.l_rc > 0.0);
  CHECK(losses.l_f0 >= 0.0);
  CHECK(losses.l_ctr >= 0.0);
  CHECK(losses.l_se > 0.0);
  CHECK_FALSE(identical(g_before, snapshot(generator_ptrs(state.model))));
  CHECK_FALSE(identical(d_before, snapshot(discriminator_ptrs(state.model))));
  CHECK(identical(f0_before, snapshot(f0_ptrs(state.model))));
  CHECK(state.model.all_finite());
}

TEST_CASE("lambda_adv zero degenerates to an auto-encoder step") {
  Rng data_rng(9);
  const auto pool = make_pool(2, 18, data_rng);
  TrainConfig cfg = tiny_cfg();
  cfg.lambda_adv = 0.0;
  TrainState state = make_state(tiny_dims(), cfg);
  state.model.set_f0_frozen(true);
  const auto d_before = snapshot(discriminator_ptrs(state.model));
  const std::string rng_before = state.rng.serialize();
  std::vector<const data::TrainItem*> batch{&pool[0], &pool[2]};
  const StepLosses losses = dual_mode_step(state, batch, cfg);
  // No adversarial game: no partner draws, no D update, zero adv losses.
  CHECK(losses.l_adv_g == 0.0);
  CHECK(losses.l_adv_d == 0.0);
  CHECK(state.rng.serialize() == rng_before);
  CHECK(identical(d_before, snapshot(discriminator_ptrs(state.model))));

  // The adversarial path does consume randomness and does move D.
  TrainConfig cfg2 = tiny_cfg();
  TrainState state2 = make_state(tiny_dims(), cfg2);
  state2.model.set_f0_frozen(true);
  const std::string rng2_before = state2.rng.serialize();
  const auto d2_before = snapshot(discriminator_ptrs(state2.model));
  dual_mode_step(state2, batch, cfg2);
  CHECK(state2.rng.serialize() != rng2_before);
  CHECK_FALSE(identical(d2_before, snapshot(discriminator_ptrs(state2.model))));
}

TEST_CASE("diff_id step rejects a single-speaker batch") {
  Rng data_rng(10);
  const auto pool = make_pool(2, 18, data_rng);
  TrainState state = make_state(tiny_dims(), tiny_cfg());
  state.model.set_f0_frozen(true);
  std::vector<const data::TrainItem*> batch{&pool[0], &pool[1]};
  try {
    dual_mode_step(state, batch, tiny_cfg());
    FAIL("expected regime error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::regime);
  }
}

TEST_CASE("f0 pretraining updates only the F0 encoder") {
  Rng data_rng(11);
  const auto pool = make_pool(2, 18, data_rng);
  const TrainConfig cfg = tiny_cfg();
  TrainState state = make_state(tiny_dims(), cfg);
  // Zeroed voicing head makes the first BCE exactly log 2.
  state.model.f0_voicing.W.value.setZero();
  state.model.f0_voicing.b.value.setZero();
  const auto g_before = snapshot(generator_ptrs(state.model));
  const auto d_before = snapshot(discriminator_ptrs(state.model));
  const auto f0_before = snapshot(f0_ptrs(state.model));
  std::vector<const data::TrainItem*> batch{&pool[0], &pool[2]};
  const F0StepLosses losses = f0_pretrain_step(state, batch, cfg);
  CHECK(losses.step == 1);
  CHECK(losses.l_voicing == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(losses.l_value > 0.0);
  CHECK(identical(g_before, snapshot(generator_ptrs(state.model))));
  CHECK(identical(d_before, snapshot(discriminator_ptrs(state.model))));
  CHECK_FALSE(identical(f0_before, snapshot(f0_ptrs(state.model))));

  state.model.set_f0_frozen(true);
  try {
    f0_pretrain_step(state, batch, cfg);
    FAIL("expected state error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::state);
  }
}

TEST_CASE("make_state is reproducible per seed") {
  const TrainConfig cfg = tiny_cfg();
  TrainState a = make_state(tiny_dims(), cfg);
  TrainState b = make_state(tiny_dims(), cfg);
  CHECK(identical(snapshot(generator_ptrs(a.model)),
                  snapshot(generator_ptrs(b.model))));
  CHECK(a.rng.serialize() == b.rng.serialize());
  CHECK(a.step == 0);
}

TEST_CASE("resuming from a checkpoint reproduces the loss sequence") {
  Rng data_rng(12);
  auto pool = make_pool(3, 18, data_rng);
  std::vector<data::TrainItem> val{pool.back()};
  pool.pop_back();

  TrainConfig cfg = tiny_cfg();
  cfg.total_steps = 6;
  cfg.checkpoint_every = 3;

  const auto dir = work_dir();
  StageIO io_cfg;
  io_cfg.out_dir = dir.string();
  io_cfg.stage = "pretrain";
  io_cfg.log_path = (dir / "full_log.jsonl").string();
  io_cfg.run_meta = {{"config_hash", "cafe"}, {"seed", 11}, {"version", "t"}};
  io_cfg.speakers = {"p001", "p002"};

  TrainState state = make_state(tiny_dims(), cfg);
  state.model.set_f0_frozen(true);
  run_dual_mode(state, pool, val, cfg, io_cfg);
  const auto full = read_lines(io_cfg.log_path);
  REQUIRE(full.size() == 7);  // meta line + six steps

  const std::string ck3 = io_cfg.checkpoint_path(3);
  REQUIRE(std::filesystem::exists(ck3));
  REQUIRE(std::filesystem::exists(ck3 + ".meta.json"));
  TrainState resumed = load_train_checkpoint(ck3, cfg);
  CHECK(resumed.step == 3);
  CHECK(resumed.model.f0_frozen());

  StageIO io2 = io_cfg;
  io2.log_path = (dir / "resume_log.jsonl").string();
  run_dual_mode(resumed, pool, val, cfg, io2);
  const auto tail = read_lines(io2.log_path);
  REQUIRE(tail.size() == 4);  // meta line + steps 4..6
  CHECK(tail[1] == full[4]);
  CHECK(tail[2] == full[5]);
  CHECK(tail[3] == full[6]);

  // Checkpoint metadata carries provenance and validation metrics.
  const io::json meta = io::read_json_file(ck3 + ".meta.json");
  CHECK(meta["config_hash"] == "cafe");
  CHECK(meta["stage"] == "pretrain");
  CHECK(meta["step"] == 3);
  CHECK(meta.contains("val_l_rc"));
  CHECK(meta.contains("val_f0_rmse"));
  CHECK(meta["speakers"].size() == 2);
}

TEST_CASE("regime names parse both ways") {
  CHECK(parse_regime("diff_id") == Regime::diff_id);
  CHECK(parse_regime("same_id") == Regime::same_id);
  CHECK(regime_name(Regime::diff_id) == "diff_id");
  CHECK(regime_name(Regime::same_id) == "same_id");
  CHECK_THROWS_AS(parse_regime("other"), Error);
}
