// tests/test_losses.cpp

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

#include "catch2/catch_amalgamated.hpp"
#include "vreen/losses.hpp"

using namespace vreen;
using namespace vreen::losses;
using ad::Graph;
using ad::Node;

namespace {

F0Track track(std::initializer_list<double> vals) {
  F0Track f0;
  f0.values = Vec(static_cast<long>(vals.size()));
  long i = 0;
  for (double v : vals) f0.values[i++] = v;
  return f0;
}

MelSpectrogram std_mel(const Mat& m) {
  MelSpectrogram mel;
  mel.values = m;
  mel.standardized = true;
  return mel;
}

Mat random_mat(long rows, long cols, Rng& rng) {
  Mat m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("f0 loss is the per-frame mean squared error in Hz^2") {
  const F0Track a = track({100.0, 100.0});
  const F0Track b = track({110.0, 90.0});
  CHECK(f0_loss(a, b) == Catch::Approx(100.0).epsilon(1e-12));
  CHECK(f0_loss(a, a) == 0.0);
  CHECK(f0_loss(a, b) == f0_loss(b, a));
  // Unvoiced zeros participate; no mask.
  const F0Track c = track({0.0, 100.0});
  const F0Track d = track({10.0, 100.0});
  CHECK(f0_loss(c, d) == Catch::Approx(50.0));
  CHECK_THROWS_AS(f0_loss(a, track({1.0, 2.0, 3.0})), Error);
  CHECK_THROWS_AS(f0_loss(track({}), track({})), Error);
}

TEST_CASE("reconstruction loss is mean absolute error in the standardized domain") {
  Rng rng(1);
  const MelSpectrogram a = std_mel(random_mat(80, 12, rng));
  CHECK(reconstruction_loss(a, a) == 0.0);
  MelSpectrogram b = a;
  b.values.array() += 0.5;
  CHECK(reconstruction_loss(a, b) == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(reconstruction_loss(a, b) == reconstruction_loss(b, a));

  MelSpectrogram raw = a;
  raw.standardized = false;
  try {
    reconstruction_loss(raw, b);
    FAIL("expected state error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::state);
  }
  MelSpectrogram wide = std_mel(random_mat(80, 13, rng));
  CHECK_THROWS_AS(reconstruction_loss(a, wide), Error);
}

TEST_CASE("contrastive loss on identical orthonormal frames") {
  // Two orthonormal columns, both views identical, temperature 1: each
  // direction contributes -log(e / (e + 1)).
  ContentEmbedding h;
  h.values = Mat::Identity(2, 2);
  const double expected = -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0));
  CHECK(contrastive_loss(h, h, 1.0) ==
        Catch::Approx(expected).epsilon(1e-12));
  CHECK(expected == Catch::Approx(0.31326168751822286).epsilon(1e-12));
}

TEST_CASE("contrastive loss needs at least two frames") {
  ContentEmbedding h;
  h.values = Mat::Ones(4, 1);
  try {
    contrastive_loss(h, h);
    FAIL("expected insufficient_negatives");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_negatives);
  }
  CHECK_THROWS_AS(contrastive_loss(h, h, 0.0), Error);
  CHECK_THROWS_AS(contrastive_loss(h, h, -1.0), Error);
}

TEST_CASE("contrastive loss is nonnegative and prefers aligned views") {
  Rng rng(2);
  ContentEmbedding a, b;
  a.values = random_mat(6, 8, rng);
  b.values = random_mat(6, 8, rng);
  const double mismatched = contrastive_loss(a, b);
  const double aligned = contrastive_loss(a, a);
  CHECK(mismatched >= 0.0);
  CHECK(aligned >= 0.0);
  CHECK(aligned < mismatched);
  // Scale invariance of each view (columns are L2 normalized).
  ContentEmbedding a2 = a;
  a2.values *= 3.7;
  CHECK(contrastive_loss(a2, b) == Catch::Approx(mismatched).epsilon(1e-12));
}

TEST_CASE("speaker classification loss on uniform and degenerate inputs") {
  Vec uniform = Vec::Constant(4, 0.25);
  CHECK(speaker_class_loss(uniform, 0) ==
        Catch::Approx(std::log(4.0)).epsilon(1e-12));
  Vec sure = Vec::Zero(3);
  sure[1] = 1.0;
  CHECK(speaker_class_loss(sure, 1) == 0.0);
  // Zero probability floors at 1e-12 instead of diverging.
  CHECK(speaker_class_loss(sure, 0) ==
        Catch::Approx(-std::log(1e-12)).epsilon(1e-12));
  CHECK_THROWS_AS(speaker_class_loss(uniform, 4), Error);
  CHECK_THROWS_AS(speaker_class_loss(uniform, -1), Error);
}

TEST_CASE("least-squares adversarial losses match their closed forms") {
  CHECK(adversarial_d_loss(1.0, 0.0) == 0.0);
  CHECK(adversarial_d_loss(0.0, 1.0) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(adversarial_d_loss(0.5, 0.5) == Catch::Approx(0.25).epsilon(1e-12));
  CHECK(adversarial_g_loss(1.0) == 0.0);
  CHECK(adversarial_g_loss(0.0) == Catch::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(adversarial_d_loss(std::nan(""), 0.0), Error);
  CHECK_THROWS_AS(adversarial_g_loss(std::nan("")), Error);
}

TEST_CASE("generator total combines the weighted terms") {
  LossWeights w;
  w.lambda_adv = 1.0;
  w.lambda_f0 = 0.0;
  w.lambda_ctr = 0.0;
  w.lambda_se = 0.0;
  CHECK(generator_total_loss(1.0, 2.0, 123.0, 456.0, 789.0, w) ==
        Catch::Approx(3.0).epsilon(1e-12));
  w.lambda_f0 = 1e-2;
  CHECK(generator_total_loss(0.0, 0.0, 100.0, 0.0, 0.0, w) ==
        Catch::Approx(1.0).epsilon(1e-12));

  // Linearity in each weight.
  Rng rng(3);
  const double rc = 0.7, adv = 1.3, f0 = 42.0, ctr = 0.9, se = 1.1;
  LossWeights w0;
  w0.lambda_adv = 0.0;
  w0.lambda_f0 = 0.0;
  w0.lambda_ctr = 0.0;
  w0.lambda_se = 0.0;
  const double base = generator_total_loss(rc, adv, f0, ctr, se, w0);
  CHECK(base == Catch::Approx(rc));
  LossWeights w1 = w0;
  w1.lambda_adv = 2.0;
  CHECK(generator_total_loss(rc, adv, f0, ctr, se, w1) - base ==
        Catch::Approx(2.0 * adv));
  LossWeights w2 = w0;
  w2.lambda_se = 3.0;
  CHECK(generator_total_loss(rc, adv, f0, ctr, se, w2) - base ==
        Catch::Approx(3.0 * se));
}

TEST_CASE("graph losses agree with the plain forms on random inputs") {
  Rng rng(4);
  Graph g(false);

  // f0
  F0Track tgt;
  tgt.values = Vec(9);
  for (int i = 0; i < 9; ++i) tgt.values[i] = 80.0 + 40.0 * rng.uniform();
  F0Track pred = tgt;
  for (int i = 0; i < 9; ++i) pred.values[i] += rng.normal() * 5.0;
  const Node pred_row = g.input(Mat(pred.values.transpose()));
  CHECK(g.scalar(f0_loss_g(g, tgt.values, pred_row)) ==
        Catch::Approx(f0_loss(tgt, pred)).epsilon(1e-12));

  // reconstruction
  const Mat a = random_mat(10, 7, rng);
  const Mat b = random_mat(10, 7, rng);
  CHECK(g.scalar(reconstruction_loss_g(g, g.input(a), g.input(b))) ==
        Catch::Approx(reconstruction_loss(std_mel(a), std_mel(b)))
            .epsilon(1e-12));

  // contrastive
  ContentEmbedding ha, hb;
  ha.values = random_mat(5, 6, rng);
  hb.values = random_mat(5, 6, rng);
  CHECK(g.scalar(contrastive_loss_g(g, g.input(ha.values),
                                    g.input(hb.values), 0.1)) ==
        Catch::Approx(contrastive_loss(ha, hb, 0.1)).epsilon(1e-9));

  // speaker classification: the graph form takes logits, the plain form
  // takes probabilities.
  Mat logits(4, 1);
  for (int i = 0; i < 4; ++i) logits(i, 0) = rng.normal();
  Vec probs = (logits.col(0).array() - logits.maxCoeff()).exp();
  probs /= probs.sum();
  CHECK(g.scalar(speaker_class_loss_g(g, g.input(logits), 2)) ==
        Catch::Approx(speaker_class_loss(probs, 2)).epsilon(1e-9));

  // adversarial
  const double lr = rng.normal(), lf = rng.normal();
  CHECK(g.scalar(adversarial_d_loss_g(g, g.input(Mat::Constant(1, 1, lr)),
                                      g.input(Mat::Constant(1, 1, lf)))) ==
        Catch::Approx(adversarial_d_loss(lr, lf)).epsilon(1e-12));
  CHECK(g.scalar(adversarial_g_loss_g(g, g.input(Mat::Constant(1, 1, lf)))) ==
        Catch::Approx(adversarial_g_loss(lf)).epsilon(1e-12));
}

TEST_CASE("graph contrastive loss rejects a single frame") {
  Graph g(false);
  const Node one = g.input(Mat::Ones(4, 1));
  try {
    contrastive_loss_g(g, one, one);
    FAIL("expected insufficient_negatives");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_negatives);
  }
}
