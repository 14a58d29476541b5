// tests/test_model.cpp

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
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "vreen/features.hpp"
#include "vreen/model.hpp"

using namespace vreen;
using model::Model;
using model::ModelDims;

namespace {

ModelDims tiny_dims() {
  ModelDims d;
  d.n_mels = 8;
  d.phoneme_vocab = 72;
  d.n_speakers = 3;
  d.content_dim = 6;
  d.speaker_dim = 5;
  d.content_hidden = 4;
  d.speaker_hidden = 4;
  d.f0_hidden = 4;
  d.decoder_hidden = 4;
  d.disc_channels = 4;
  return d;
}

MelSpectrogram random_mel(int bins, int frames, Rng& rng) {
  MelSpectrogram mel;
  mel.values = Mat(bins, frames);
  for (int r = 0; r < bins; ++r)
    for (int c = 0; c < frames; ++c) mel.values(r, c) = rng.normal();
  mel.standardized = true;
  return mel;
}

}  // namespace

TEST_CASE("content encoding preserves frame count for any length") {
  Model m;
  m.init(tiny_dims(), 7);
  Rng rng(1);
  for (int T : {1, 7, 81}) {
    const MelSpectrogram mel = random_mel(8, T, rng);
    const ContentEmbedding c = m.encode_content(mel);
    CHECK(c.values.rows() == 6);
    CHECK(c.frames() == T);
  }
}

TEST_CASE("phoneme content encoding matches the alignment length") {
  Model m;
  m.init(tiny_dims(), 7);
  PhonemeAlignment a;
  a.inventory_size = 72;
  a.ids.assign(50, 3);
  const ContentEmbedding c = m.encode_content(a);
  CHECK(c.values.rows() == 6);
  CHECK(c.frames() == 50);

  PhonemeAlignment bad = a;
  bad.inventory_size = 10;
  try {
    m.encode_content(bad);
    FAIL("expected vocabulary error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::vocabulary);
  }
}

TEST_CASE("speaker embedding width is independent of utterance length") {
  Model m;
  m.init(tiny_dims(), 7);
  Rng rng(2);
  const SpeakerEmbedding a = m.encode_speaker(random_mel(8, 40, rng));
  const SpeakerEmbedding b = m.encode_speaker(random_mel(8, 200, rng));
  CHECK(a.values.size() == 5);
  CHECK(b.values.size() == 5);
}

TEST_CASE("decode emits a standardized Mel with the conditioning length") {
  Model m;
  m.init(tiny_dims(), 7);
  Rng rng(3);
  for (int T : {1, 64, 500}) {
    CodeBundle codes;
    codes.content.values = Mat::Zero(6, T);
    codes.speaker.values = Vec::Zero(5);
    codes.f0.values = Vec::Constant(T, 120.0);
    const MelSpectrogram out = m.decode(codes);
    CHECK(out.bins() == 8);
    CHECK(out.frames() == T);
    CHECK(out.standardized);
  }
}

TEST_CASE("decode rejects mismatched conditioning lengths") {
  Model m;
  m.init(tiny_dims(), 7);
  CodeBundle codes;
  codes.content.values = Mat::Zero(6, 10);
  codes.speaker.values = Vec::Zero(5);
  codes.f0.values = Vec::Zero(9);
  try {
    m.decode(codes);
    FAIL("expected invalid_input");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_input);
  }
}

TEST_CASE("model rejects non-standardized input") {
  Model m;
  m.init(tiny_dims(), 7);
  MelSpectrogram raw;
  raw.values = Mat::Zero(8, 20);
  for (auto op : {0, 1, 2, 3}) {
    try {
      switch (op) {
        case 0: m.encode_content(raw); break;
        case 1: m.encode_speaker(raw); break;
        case 2: m.encode_f0(raw); break;
        default: m.discriminate(raw); break;
      }
      FAIL("expected state error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::state);
    }
  }
}

TEST_CASE("classifier outputs a probability simplex") {
  Model m;
  m.init(tiny_dims(), 7);
  Rng rng(4);
  SpeakerEmbedding e;
  e.values = Vec(5);
  for (int i = 0; i < 5; ++i) e.values[i] = rng.normal();
  const Vec p = m.classify_speaker(e);
  REQUIRE(p.size() == 3);
  CHECK(p.minCoeff() > 0.0);
  CHECK(std::abs(p.sum() - 1.0) < 1e-6);
}

TEST_CASE("zeroed classifier is uniform over speakers") {
  Model m;
  m.init(tiny_dims(), 7);
  m.sp_classifier.W.value.setZero();
  m.sp_classifier.b.value.setZero();
  SpeakerEmbedding e;
  e.values = Vec::Zero(5);
  const Vec p = m.classify_speaker(e);
  for (int k = 0; k < 3; ++k)
    CHECK(p[k] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("classifier probabilities are shift invariant in the logits") {
  Model m;
  m.init(tiny_dims(), 7);
  Rng rng(5);
  SpeakerEmbedding e;
  e.values = Vec(5);
  for (int i = 0; i < 5; ++i) e.values[i] = rng.normal();
  const Vec p1 = m.classify_speaker(e);
  m.sp_classifier.b.value.array() += 37.5;
  const Vec p2 = m.classify_speaker(e);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("F0 head emits nonnegative values with hard unvoiced zeros") {
  Model m;
  m.init(tiny_dims(), 7);
  Rng rng(6);
  const MelSpectrogram mel = random_mel(8, 60, rng);
  const F0Track f0 = m.encode_f0(mel);
  REQUIRE(f0.length() == 60);
  int voiced = 0, zero = 0;
  for (int t = 0; t < 60; ++t) {
    CHECK(f0.values[t] >= 0.0);
    if (f0.values[t] > 0.0)
      ++voiced;
    else
      ++zero;
    // A frame is either exactly zero or a positive pitch value.
    if (f0.values[t] != 0.0) CHECK(f0.values[t] > 0.0);
  }
  CHECK(voiced + zero == 60);
}

TEST_CASE("discriminator contracts input 80x64 to a scalar and rejects short input") {
  ModelDims d = tiny_dims();
  d.n_mels = 80;
  Model m;
  m.init(d, 7);
  Rng rng(7);
  const double logit = m.discriminate(random_mel(80, 64, rng));
  CHECK(std::isfinite(logit));
  try {
    m.discriminate(random_mel(80, 15, rng));
    FAIL("expected input_too_short");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::input_too_short);
  }
}

TEST_CASE("initialization and inference are deterministic") {
  Model a, b;
  a.init(tiny_dims(), 42);
  b.init(tiny_dims(), 42);
  bool equal = true;
  std::vector<Mat> av, bv;
  a.visit([&](ad::Tensor& t) { av.push_back(t.value); });
  b.visit([&](ad::Tensor& t) { bv.push_back(t.value); });
  REQUIRE(av.size() == bv.size());
  for (size_t i = 0; i < av.size(); ++i)
    if (!(av[i].array() == bv[i].array()).all()) equal = false;
  CHECK(equal);

  Model c;
  c.init(tiny_dims(), 43);
  bool any_diff = false;
  std::vector<Mat> cv;
  c.visit([&](ad::Tensor& t) { cv.push_back(t.value); });
  for (size_t i = 0; i < av.size(); ++i)
    if (!(av[i].array() == cv[i].array()).all()) any_diff = true;
  CHECK(any_diff);

  Rng rng(8);
  const MelSpectrogram mel = random_mel(8, 30, rng);
  const ContentEmbedding e1 = a.encode_content(mel);
  const ContentEmbedding e2 = a.encode_content(mel);
  CHECK((e1.values.array() == e2.values.array()).all());
}

TEST_CASE("set_f0_frozen flips exactly the F0 encoder tensors") {
  Model m;
  m.init(tiny_dims(), 7);
  CHECK_FALSE(m.f0_frozen());
  m.set_f0_frozen(true);
  CHECK(m.f0_frozen());
  int frozen = 0, open = 0;
  m.visit([&](ad::Tensor& t) {
    if (t.frozen)
      ++frozen;
    else
      ++open;
  });
  CHECK(frozen > 0);
  CHECK(open > 0);
  m.set_f0_frozen(false);
  CHECK_FALSE(m.f0_frozen());
  int still = 0;
  m.visit([&](ad::Tensor& t) { still += t.frozen ? 1 : 0; });
  CHECK(still == 0);
}

TEST_CASE("checkpoint round trip preserves behaviour bit for bit") {
  const auto dir =
      std::filesystem::temp_directory_path() / "vreen_model_tests";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model_ck.bin").string();

  Model m;
  m.init(tiny_dims(), 11);
  m.set_f0_frozen(true);
  io::Checkpoint ck;
  ck.metadata["dims"] = model::dims_to_json(m.dims);
  model::append_model_tensors(ck, m);
  io::save_checkpoint(path, ck);

  const io::Checkpoint loaded = io::load_checkpoint(path);
  Model n;
  n.init(model::dims_from_json(loaded.metadata["dims"]), 999);
  model::load_model_tensors(loaded, n);

  Rng rng(12);
  const MelSpectrogram mel = random_mel(8, 25, rng);
  const ContentEmbedding ea = m.encode_content(mel);
  const ContentEmbedding eb = n.encode_content(mel);
  CHECK((ea.values.array() == eb.values.array()).all());
  const F0Track fa = m.encode_f0(mel);
  const F0Track fb = n.encode_f0(mel);
  CHECK((fa.values.array() == fb.values.array()).all());
  CHECK(n.f0_frozen());
  CHECK(m.parameter_count() == n.parameter_count());
  CHECK(m.all_finite());
}

TEST_CASE("parameter count grows with width") {
  Model small, big;
  ModelDims ds = tiny_dims();
  ModelDims db = tiny_dims();
  db.content_hidden = 8;
  db.decoder_hidden = 8;
  small.init(ds, 1);
  big.init(db, 1);
  CHECK(big.parameter_count() > small.parameter_count());
  CHECK(small.parameter_count() > 0);
}
