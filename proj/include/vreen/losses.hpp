// vreen/losses.hpp

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

// Training objectives.  Each loss has a plain form for evaluation and a
// graph form used inside the training tape; the two agree by construction
// and the tests assert it numerically.

#ifndef VREEN_LOSSES_HPP_
#define VREEN_LOSSES_HPP_

#include <algorithm>
#include <cmath>

#include "vreen/autodiff.hpp"
#include "vreen/common.hpp"
#include "vreen/types.hpp"

namespace vreen::losses {

using ad::Graph;
using ad::Node;

struct LossWeights {
  double lambda_f0 = 0.0;  // schedule-driven
  double lambda_adv = 1.0;
  double lambda_ctr = 1.0;
  double lambda_se = 1.0;
};

// ---- plain forms ----

// Mean squared error over the full tracks, in Hz^2.  Unvoiced frames carry
// the value 0 and participate; there is no voicing mask here.
inline double f0_loss(const F0Track& target, const F0Track& predicted) {
  require(target.length() == predicted.length(), Errc::invalid_input,
          "f0_loss: track lengths differ");
  require(target.length() >= 1, Errc::invalid_input, "f0_loss: empty tracks");
  return (target.values - predicted.values).squaredNorm() /
         static_cast<double>(target.length());
}

inline double reconstruction_loss(const MelSpectrogram& a,
                                  const MelSpectrogram& a_hat) {
  require(a.values.rows() == a_hat.values.rows() &&
              a.values.cols() == a_hat.values.cols(),
          Errc::invalid_input, "reconstruction_loss: shape mismatch");
  require(a.standardized && a_hat.standardized, Errc::state,
          "reconstruction_loss operates in the standardized domain");
  return (a.values - a_hat.values).cwiseAbs().mean();
}

// Frame-wise symmetric InfoNCE over L2-normalized columns; negatives are the
// other frames of the same utterance.
inline double contrastive_loss(const ContentEmbedding& h_audio,
                               const ContentEmbedding& h_text,
                               double temperature = 0.1) {
  const Mat& A = h_audio.values;
  const Mat& B = h_text.values;
  require(A.cols() == B.cols() && A.rows() == B.rows(), Errc::invalid_input,
          "contrastive_loss: shape mismatch");
  require(temperature > 0, Errc::invalid_input,
          "contrastive_loss: temperature must be positive");
  const long T = A.cols();
  require(T >= 2, Errc::insufficient_negatives,
          "contrastive_loss needs at least 2 frames");

  auto normalized = [](const Mat& m) {
    Mat n = m;
    for (long j = 0; j < m.cols(); ++j) {
      const double norm = std::max(1e-12, m.col(j).norm());
      n.col(j) /= norm;
    }
    return n;
  };
  const Mat S = (normalized(A).transpose() * normalized(B)) / temperature;

  double total = 0.0;
  for (long t = 0; t < T; ++t) {
    const double mr = S.row(t).maxCoeff();
    const double lse_r = mr + std::log((S.row(t).array() - mr).exp().sum());
    const double mc = S.col(t).maxCoeff();
    const double lse_c = mc + std::log((S.col(t).array() - mc).exp().sum());
    total += (lse_r - S(t, t)) + (lse_c - S(t, t));
  }
  return total / (2.0 * static_cast<double>(T));
}

inline double speaker_class_loss(const Vec& probs, int true_id) {
  require(true_id >= 0 && true_id < probs.size(), Errc::invalid_input,
          "speaker_class_loss: index out of range");
  return -std::log(std::max(1e-12, probs[true_id]));
}

inline double adversarial_d_loss(double logit_real, double logit_fake) {
  require(std::isfinite(logit_real) && std::isfinite(logit_fake),
          Errc::invalid_input, "adversarial_d_loss: non-finite logit");
  return 0.5 * ((logit_real - 1.0) * (logit_real - 1.0) +
                logit_fake * logit_fake);
}

inline double adversarial_g_loss(double logit_fake) {
  require(std::isfinite(logit_fake), Errc::invalid_input,
          "adversarial_g_loss: non-finite logit");
  return 0.5 * (logit_fake - 1.0) * (logit_fake - 1.0);
}

inline double generator_total_loss(double l_rc, double l_adv_g, double l_f0,
                                   double l_ctr, double l_se,
                                   const LossWeights& w) {
  return l_rc + w.lambda_adv * l_adv_g + w.lambda_f0 * l_f0 +
         w.lambda_ctr * l_ctr + w.lambda_se * l_se;
}

// ---- graph forms ----

inline Node f0_loss_g(Graph& g, const Vec& target, Node predicted_row) {
  const long T = target.size();
  require(g.value(predicted_row).cols() == T &&
              g.value(predicted_row).rows() == 1,
          Errc::invalid_input, "f0_loss_g: track lengths differ");
  Node diff = g.sub(predicted_row, g.input(Mat(target.transpose())));
  return g.mean_all(g.square(diff));
}

inline Node reconstruction_loss_g(Graph& g, Node target, Node output) {
  return g.mean_all(g.abs_(g.sub(target, output)));
}

inline Node contrastive_loss_g(Graph& g, Node h_audio, Node h_text,
                               double temperature = 0.1) {
  const long T = g.value(h_audio).cols();
  require(T >= 2, Errc::insufficient_negatives,
          "contrastive_loss needs at least 2 frames");
  require(temperature > 0, Errc::invalid_input,
          "contrastive_loss: temperature must be positive");
  Node S = g.scale(g.matmul(g.transpose(g.normalize_cols(h_audio)),
                            g.normalize_cols(h_text)),
                   1.0 / temperature);
  Node diag = g.diagonal(S);
  Node rows = g.sub(g.logsumexp_rows(S), diag);
  Node cols = g.sub(g.logsumexp_rows(g.transpose(S)), diag);
  return g.scale(g.add(g.mean_all(rows), g.mean_all(cols)), 0.5);
}

inline Node speaker_class_loss_g(Graph& g, Node logits, int true_id) {
  require(true_id >= 0 && true_id < g.value(logits).rows(),
          Errc::invalid_input, "speaker_class_loss: index out of range");
  return g.scale(g.pick(g.log_softmax_col(logits), true_id, 0), -1.0);
}

inline Node adversarial_d_loss_g(Graph& g, Node logit_real, Node logit_fake) {
  Node real_term = g.square(g.add_scalar(logit_real, -1.0));
  Node fake_term = g.square(logit_fake);
  return g.scale(g.add(real_term, fake_term), 0.5);
}

inline Node adversarial_g_loss_g(Graph& g, Node logit_fake) {
  return g.scale(g.square(g.add_scalar(logit_fake, -1.0)), 0.5);
}

}  // namespace vreen::losses

#endif  // VREEN_LOSSES_HPP_
