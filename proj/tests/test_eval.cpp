// tests/test_eval.cpp

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
#include <string>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "vreen/eval.hpp"

using namespace vreen;
using namespace vreen::eval;

namespace {

F0Track track(std::initializer_list<double> vals) {
  F0Track f0;
  f0.values = Vec(static_cast<long>(vals.size()));
  long i = 0;
  for (double v : vals) f0.values[i++] = v;
  return f0;
}

std::vector<std::string> captured;

void capture_warnings() {
  captured.clear();
  set_warning_sink([](const std::string& msg) { captured.push_back(msg); });
}

void release_warnings() { set_warning_sink(nullptr); }

}  // namespace

TEST_CASE("co-voiced RMSE ignores frames either side left unvoiced") {
  const F0Track a = track({100.0, 0.0, 200.0, 150.0});
  const F0Track b = track({105.0, 90.0, 0.0, 145.0});
  // Co-voiced frames: 0 and 3, both off by 5.
  CHECK(f0_rmse(a, b) == Catch::Approx(5.0).epsilon(1e-12));
  CHECK(f0_rmse(a, a) == 0.0);
  CHECK(f0_rmse(a, b) == f0_rmse(b, a));
  CHECK_THROWS_AS(f0_rmse(a, track({1.0})), Error);
}

TEST_CASE("constant offset shows up as itself") {
  F0Track a, b;
  a.values = Vec::Constant(30, 150.0);
  b.values = Vec::Constant(30, 155.0);
  CHECK(f0_rmse(a, b) == Catch::Approx(5.0).epsilon(1e-12));
  CHECK(f0_rmse_inclusive(a, b) == Catch::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("no co-voiced frames warns and reports zero") {
  const F0Track a = track({100.0, 0.0});
  const F0Track b = track({0.0, 100.0});
  capture_warnings();
  const double rmse = f0_rmse(a, b);
  release_warnings();
  CHECK(rmse == 0.0);
  REQUIRE(!captured.empty());
  CHECK(captured[0].find("no co-voiced") != std::string::npos);
  // The inclusive variant still sees the disagreement.
  CHECK(f0_rmse_inclusive(a, b) == Catch::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("inclusive RMSE counts voicing mistakes") {
  const F0Track ref = track({100.0, 0.0, 100.0, 0.0});
  const F0Track hyp = track({100.0, 100.0, 100.0, 0.0});
  // One frame wrongly voiced at 100 Hz over four frames.
  CHECK(f0_rmse_inclusive(ref, hyp) == Catch::Approx(50.0).epsilon(1e-12));
  CHECK_THROWS_AS(f0_rmse_inclusive(track({}), track({})), Error);
}

TEST_CASE("time sync check compares frame counts only") {
  MelSpectrogram a, b;
  a.values = Mat::Zero(80, 81);
  b.values = Mat::Zero(80, 81);
  CHECK(check_time_sync(a, b));
  b.values = Mat::Zero(80, 80);
  CHECK_FALSE(check_time_sync(a, b));
}

TEST_CASE("speaker proxy counts classifier agreement") {
  model::ModelDims d;
  d.n_mels = 6;
  d.n_speakers = 2;
  d.content_dim = 4;
  d.speaker_dim = 4;
  d.content_hidden = 3;
  d.speaker_hidden = 3;
  d.f0_hidden = 3;
  d.decoder_hidden = 3;
  d.disc_channels = 3;
  model::Model m;
  m.init(d, 5);

  Rng rng(1);
  std::vector<MelSpectrogram> mels;
  for (int i = 0; i < 4; ++i) {
    MelSpectrogram mel;
    mel.values = Mat(6, 20);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 20; ++c) mel.values(r, c) = rng.normal();
    mel.standardized = true;
    mels.push_back(mel);
  }
  const double p0 = speaker_similarity_proxy(mels, 0, m);
  const double p1 = speaker_similarity_proxy(mels, 1, m);
  CHECK(p0 >= 0.0);
  CHECK(p0 <= 1.0);
  // Argmax lands on exactly one speaker per utterance.
  CHECK(p0 + p1 == Catch::Approx(1.0).epsilon(1e-12));

  capture_warnings();
  const double empty = speaker_similarity_proxy({}, 0, m);
  release_warnings();
  CHECK(empty == 0.0);
  CHECK(!captured.empty());

  try {
    speaker_similarity_proxy(mels, 2, m);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
  }
}

TEST_CASE("evaluation report round trips through JSON") {
  EvalReport r;
  r.config_hash = "feedc0de";
  r.seed = 77;
  r.version = "0.1.0";
  r.checkpoint = "/runs/a/ckpt_finetune_200.bin";
  PairResult p;
  p.source_speaker = "p001";
  p.target_speaker = "p002";
  p.f0_mode = "transfer_normalized";
  p.utterances = 2;
  p.f0_rmse_covoiced = 3.25;
  p.f0_rmse_inclusive = 11.5;
  p.sync_pass = 2;
  p.sync_fail = 0;
  p.speaker_proxy = 0.5;
  r.pairs.push_back(p);
  PairResult q = p;
  q.source_speaker = "p002";
  q.target_speaker = "p001";
  r.pairs.push_back(q);

  const EvalReport back = EvalReport::from_json(r.to_json());
  CHECK(back.config_hash == r.config_hash);
  CHECK(back.seed == r.seed);
  CHECK(back.version == r.version);
  CHECK(back.checkpoint == r.checkpoint);
  REQUIRE(back.pairs.size() == 2);
  CHECK(back.pairs[0].source_speaker == "p001");
  CHECK(back.pairs[0].f0_rmse_covoiced == 3.25);
  CHECK(back.pairs[0].f0_rmse_inclusive == 11.5);
  CHECK(back.pairs[0].sync_pass == 2);
  CHECK(back.pairs[0].speaker_proxy == 0.5);
  CHECK(back.pairs[1].target_speaker == "p001");
}

TEST_CASE("text table lists one row per pair") {
  EvalReport r;
  PairResult p;
  p.source_speaker = "p001";
  p.target_speaker = "p002";
  p.utterances = 1;
  p.sync_pass = 1;
  r.pairs.push_back(p);
  p.source_speaker = "p002";
  p.target_speaker = "p001";
  r.pairs.push_back(p);
  const std::string table = r.text_table();
  CHECK(table.find("p001->p002") != std::string::npos);
  CHECK(table.find("p002->p001") != std::string::npos);
  CHECK(table.find("rmse_cov") != std::string::npos);
  CHECK(table.find("proxy") != std::string::npos);
}
