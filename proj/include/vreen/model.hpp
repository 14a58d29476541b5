// vreen/model.hpp

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

// Network definition: content encoder (audio and phoneme paths), speaker
// encoder with classification head, F0 encoder, time-synchronous decoder and
// the spectrogram discriminator.  Every operation preserves the time
// dimension end to end; nothing here resamples T.

#ifndef VREEN_MODEL_HPP_
#define VREEN_MODEL_HPP_

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vreen/autodiff.hpp"
#include "vreen/common.hpp"
#include "vreen/io.hpp"
#include "vreen/nn.hpp"
#include "vreen/types.hpp"

namespace vreen::model {

using ad::Graph;
using ad::Node;
using ad::Tensor;
using nn::Binder;
using nn::TensorVisitor;

struct ModelDims {
  int n_mels = 80;
  int phoneme_vocab = 72;
  int n_speakers = 2;
  int content_dim = 128;     // content embedding width
  int speaker_dim = 128;     // speaker embedding width
  int content_hidden = 128;  // recurrent width in both content paths
  int speaker_hidden = 128;
  int f0_hidden = 128;
  int decoder_hidden = 128;
  int disc_channels = 128;

  int decoder_input() const { return content_dim + speaker_dim + 1; }
};

inline nlohmann::json dims_to_json(const ModelDims& d) {
  return nlohmann::json{{"n_mels", d.n_mels},
                        {"phoneme_vocab", d.phoneme_vocab},
                        {"n_speakers", d.n_speakers},
                        {"content_dim", d.content_dim},
                        {"speaker_dim", d.speaker_dim},
                        {"content_hidden", d.content_hidden},
                        {"speaker_hidden", d.speaker_hidden},
                        {"f0_hidden", d.f0_hidden},
                        {"decoder_hidden", d.decoder_hidden},
                        {"disc_channels", d.disc_channels}};
}

inline ModelDims dims_from_json(const nlohmann::json& j) {
  ModelDims d;
  d.n_mels = j.value("n_mels", d.n_mels);
  d.phoneme_vocab = j.value("phoneme_vocab", d.phoneme_vocab);
  d.n_speakers = j.value("n_speakers", d.n_speakers);
  d.content_dim = j.value("content_dim", d.content_dim);
  d.speaker_dim = j.value("speaker_dim", d.speaker_dim);
  d.content_hidden = j.value("content_hidden", d.content_hidden);
  d.speaker_hidden = j.value("speaker_hidden", d.speaker_hidden);
  d.f0_hidden = j.value("f0_hidden", d.f0_hidden);
  d.decoder_hidden = j.value("decoder_hidden", d.decoder_hidden);
  d.disc_channels = j.value("disc_channels", d.disc_channels);
  return d;
}

// F0 values enter the decoder as log(1+f0); unvoiced zeros stay zero.
inline Mat f0_conditioning_row(const Vec& f0) {
  Mat row(1, f0.size());
  for (long t = 0; t < f0.size(); ++t) row(0, t) = std::log1p(f0[t]);
  return row;
}

class Model {
 public:
  ModelDims dims;

  // content encoder, audio path
  nn::BiLstm ca_lstm1, ca_lstm2;
  nn::Dense ca_proj;
  // content encoder, phoneme path
  nn::EmbeddingLayer ct_embed;
  nn::BiLstm ct_lstm1, ct_lstm2;
  nn::Dense ct_proj;
  // speaker encoder + classifier
  nn::Conv1dLayer sp_conv1, sp_conv2, sp_conv3;
  nn::BiLstm sp_lstm;
  nn::Dense sp_proj;
  nn::Dense sp_classifier;
  // F0 encoder
  nn::Conv1dLayer f0_conv1, f0_conv2, f0_conv3, f0_conv4;
  nn::BiLstm f0_lstm;
  nn::Dense f0_value, f0_voicing;
  // decoder
  nn::BiLstm dec_lstm1, dec_lstm2;
  nn::Dense dec_out;
  // discriminator
  nn::Conv2dLayer d_conv1, d_conv2, d_conv3, d_conv4;
  nn::Dense d_head;

  void init(const ModelDims& d, uint64_t seed) {
    dims = d;
    Rng rng(seed);
    ca_lstm1.init(rng, d.content_hidden, d.n_mels, "content_audio/lstm1");
    ca_lstm2.init(rng, d.content_hidden, d.content_hidden,
                  "content_audio/lstm2");
    ca_proj.init(rng, d.content_dim, d.content_hidden, "content_audio/proj");
    ct_embed.init(rng, d.content_hidden, d.phoneme_vocab,
                  "content_text/embed");
    ct_lstm1.init(rng, d.content_hidden, d.content_hidden,
                  "content_text/lstm1");
    ct_lstm2.init(rng, d.content_hidden, d.content_hidden,
                  "content_text/lstm2");
    ct_proj.init(rng, d.content_dim, d.content_hidden, "content_text/proj");
    sp_conv1.init(rng, d.speaker_hidden, d.n_mels, 3, 2, "speaker/conv1");
    sp_conv2.init(rng, d.speaker_hidden, d.speaker_hidden, 3, 2,
                  "speaker/conv2");
    sp_conv3.init(rng, d.speaker_hidden, d.speaker_hidden, 3, 2,
                  "speaker/conv3");
    sp_lstm.init(rng, d.speaker_hidden, d.speaker_hidden, "speaker/lstm");
    sp_proj.init(rng, d.speaker_dim, d.speaker_hidden, "speaker/proj");
    sp_classifier.init(rng, d.n_speakers, d.speaker_dim,
                       "speaker/classifier");
    f0_conv1.init(rng, d.f0_hidden, d.n_mels, 3, 1, "f0/conv1");
    f0_conv2.init(rng, d.f0_hidden, d.f0_hidden, 3, 1, "f0/conv2");
    f0_conv3.init(rng, d.f0_hidden, d.f0_hidden, 3, 1, "f0/conv3");
    f0_conv4.init(rng, d.f0_hidden, d.f0_hidden, 3, 1, "f0/conv4");
    f0_lstm.init(rng, d.f0_hidden, d.f0_hidden, "f0/lstm");
    f0_value.init(rng, 1, d.f0_hidden, "f0/value");
    f0_voicing.init(rng, 1, d.f0_hidden, "f0/voicing");
    dec_lstm1.init(rng, d.decoder_hidden, d.decoder_input(), "decoder/lstm1");
    dec_lstm2.init(rng, d.decoder_hidden, d.decoder_hidden, "decoder/lstm2");
    dec_out.init(rng, d.n_mels, d.decoder_hidden, "decoder/out");
    d_conv1.init(rng, d.disc_channels, 1, 3, 2, "disc/conv1");
    d_conv2.init(rng, d.disc_channels, d.disc_channels, 3, 2, "disc/conv2");
    d_conv3.init(rng, d.disc_channels, d.disc_channels, 3, 2, "disc/conv3");
    d_conv4.init(rng, d.disc_channels, d.disc_channels, 3, 2, "disc/conv4");
    d_head.init(rng, 1, d.disc_channels, "disc/head");
  }

  // ---- tensor enumeration ----

  void content_tensors(const TensorVisitor& fn) {
    ca_lstm1.visit(fn);
    ca_lstm2.visit(fn);
    ca_proj.visit(fn);
    ct_embed.visit(fn);
    ct_lstm1.visit(fn);
    ct_lstm2.visit(fn);
    ct_proj.visit(fn);
  }

  void speaker_tensors(const TensorVisitor& fn) {
    sp_conv1.visit(fn);
    sp_conv2.visit(fn);
    sp_conv3.visit(fn);
    sp_lstm.visit(fn);
    sp_proj.visit(fn);
    sp_classifier.visit(fn);
  }

  void f0_tensors(const TensorVisitor& fn) {
    f0_conv1.visit(fn);
    f0_conv2.visit(fn);
    f0_conv3.visit(fn);
    f0_conv4.visit(fn);
    f0_lstm.visit(fn);
    f0_value.visit(fn);
    f0_voicing.visit(fn);
  }

  void decoder_tensors(const TensorVisitor& fn) {
    dec_lstm1.visit(fn);
    dec_lstm2.visit(fn);
    dec_out.visit(fn);
  }

  // Everything the generator optimizer updates (E^F0 excluded; it only ever
  // trains in its own pre-training stage).
  void generator_tensors(const TensorVisitor& fn) {
    content_tensors(fn);
    speaker_tensors(fn);
    decoder_tensors(fn);
  }

  void discriminator_tensors(const TensorVisitor& fn) {
    d_conv1.visit(fn);
    d_conv2.visit(fn);
    d_conv3.visit(fn);
    d_conv4.visit(fn);
    d_head.visit(fn);
  }

  void visit(const TensorVisitor& fn) {
    generator_tensors(fn);
    f0_tensors(fn);
    discriminator_tensors(fn);
  }

  void set_f0_frozen(bool frozen) {
    f0_tensors([frozen](Tensor& t) { t.frozen = frozen; });
  }

  bool f0_frozen() {
    bool all = true;
    f0_tensors([&all](Tensor& t) { all = all && t.frozen; });
    return all;
  }

  long parameter_count() {
    long n = 0;
    visit([&n](Tensor& t) { n += t.size(); });
    return n;
  }

  bool all_finite() {
    bool ok = true;
    visit([&ok](Tensor& t) { ok = ok && t.value.allFinite(); });
    return ok;
  }

  // ---- graph builders ----

  Node encode_content_audio_g(Graph& g, Binder& bind, Node mel) const {
    Node h = ca_lstm1.apply(g, bind, mel);
    h = ca_lstm2.apply(g, bind, h);
    return ca_proj.apply(g, bind, h);
  }

  Node encode_content_text_g(Graph& g, Binder& bind,
                             const std::vector<int>& ids) const {
    Node h = ct_embed.apply(g, bind, ids);
    h = ct_lstm1.apply(g, bind, h);
    h = ct_lstm2.apply(g, bind, h);
    return ct_proj.apply(g, bind, h);
  }

  Node encode_speaker_g(Graph& g, Binder& bind, Node mel) const {
    Node h = g.leaky_relu(sp_conv1.apply(g, bind, mel));
    h = g.leaky_relu(sp_conv2.apply(g, bind, h));
    h = g.leaky_relu(sp_conv3.apply(g, bind, h));
    h = sp_lstm.apply(g, bind, h);
    return sp_proj.apply(g, bind, g.row_mean(h));
  }

  Node classify_logits_g(Graph& g, Binder& bind, Node speaker_vec) const {
    return sp_classifier.apply(g, bind, speaker_vec);
  }

  struct F0Heads {
    Node value;          // 1 x T, ≥ 0
    Node voicing_logit;  // 1 x T
  };

  F0Heads f0_heads_g(Graph& g, Binder& bind, Node mel) const {
    Node h = g.leaky_relu(f0_conv1.apply(g, bind, mel));
    h = g.leaky_relu(f0_conv2.apply(g, bind, h));
    h = g.leaky_relu(f0_conv3.apply(g, bind, h));
    h = g.leaky_relu(f0_conv4.apply(g, bind, h));
    h = f0_lstm.apply(g, bind, h);
    Node value = g.scale(g.softplus(f0_value.apply(g, bind, h)), 100.0);
    Node voicing = f0_voicing.apply(g, bind, h);
    return {value, voicing};
  }

  // Gated track: value where the voicing head fires, hard zero elsewhere.
  // The voicing decision is treated as constant in the backward pass.
  Node f0_track_g(Graph& g, Binder& bind, Node mel) const {
    F0Heads heads = f0_heads_g(g, bind, mel);
    const Mat& logit = g.value(heads.voicing_logit);
    Mat mask(1, logit.cols());
    for (long t = 0; t < logit.cols(); ++t)
      mask(0, t) = logit(0, t) >= 0.0 ? 1.0 : 0.0;
    return g.cmul_const(heads.value, mask);
  }

  Node decode_g(Graph& g, Binder& bind, Node content, Node speaker_vec,
                const Vec& f0) const {
    require(g.value(content).cols() == f0.size(), Errc::invalid_input,
            "decode: content T and F0 length differ");
    Node spk = g.broadcast_col(speaker_vec,
                               static_cast<int>(g.value(content).cols()));
    Node cond = g.input(f0_conditioning_row(f0));
    Node x = g.vcat(g.vcat(content, spk), cond);
    Node h = dec_lstm1.apply(g, bind, x);
    h = dec_lstm2.apply(g, bind, h);
    return dec_out.apply(g, bind, h);
  }

  Node discriminate_g(Graph& g, Binder& bind, Node mel) const {
    const int height = static_cast<int>(g.value(mel).rows());
    int w = static_cast<int>(g.value(mel).cols());
    int h = height;
    Node img = g.reshape_rowmajor(mel, 1, height * w);
    int ho = 0, wo = 0;
    Node y = g.leaky_relu(d_conv1.apply(g, bind, img, h, w, &ho, &wo));
    h = ho;
    w = wo;
    y = g.leaky_relu(d_conv2.apply(g, bind, y, h, w, &ho, &wo));
    h = ho;
    w = wo;
    y = g.leaky_relu(d_conv3.apply(g, bind, y, h, w, &ho, &wo));
    h = ho;
    w = wo;
    y = g.leaky_relu(d_conv4.apply(g, bind, y, h, w, &ho, &wo));
    return d_head.apply(g, bind, g.row_mean(y));
  }

  // ---- inference operations ----

  ContentEmbedding encode_content(const MelSpectrogram& mel) const {
    check_standardized(mel);
    Graph g(false);
    Binder bind(g, false);
    auto& self = const_cast<Model&>(*this);
    Node out = self.encode_content_audio_g(g, bind, g.input(mel.values));
    return ContentEmbedding{g.value(out)};
  }

  ContentEmbedding encode_content(const PhonemeAlignment& alignment) const {
    require(alignment.inventory_size == dims.phoneme_vocab, Errc::vocabulary,
            "alignment inventory does not match the model vocabulary");
    require(!alignment.ids.empty(), Errc::invalid_input, "empty alignment");
    Graph g(false);
    Binder bind(g, false);
    auto& self = const_cast<Model&>(*this);
    Node out = self.encode_content_text_g(g, bind, alignment.ids);
    return ContentEmbedding{g.value(out)};
  }

  SpeakerEmbedding encode_speaker(const MelSpectrogram& mel) const {
    check_standardized(mel);
    Graph g(false);
    Binder bind(g, false);
    auto& self = const_cast<Model&>(*this);
    Node out = self.encode_speaker_g(g, bind, g.input(mel.values));
    return SpeakerEmbedding{Vec(g.value(out).col(0))};
  }

  Vec classify_speaker(const SpeakerEmbedding& emb) const {
    require(emb.values.size() == dims.speaker_dim, Errc::invalid_input,
            "speaker embedding dimension mismatch");
    Graph g(false);
    Binder bind(g, false);
    auto& self = const_cast<Model&>(*this);
    Node logits =
        self.classify_logits_g(g, bind, g.input(Mat(emb.values)));
    Vec z = g.value(logits).col(0);
    const double mx = z.maxCoeff();
    Vec p = (z.array() - mx).exp();
    return p / p.sum();
  }

  F0Track encode_f0(const MelSpectrogram& mel) const {
    check_standardized(mel);
    Graph g(false);
    Binder bind(g, false);
    auto& self = const_cast<Model&>(*this);
    Node track = self.f0_track_g(g, bind, g.input(mel.values));
    F0Track out;
    out.values = g.value(track).row(0).transpose();
    return out;
  }

  MelSpectrogram decode(const CodeBundle& codes) const {
    require(codes.content.values.cols() == codes.f0.length(),
            Errc::invalid_input, "code bundle length mismatch");
    require(codes.content.values.rows() == dims.content_dim,
            Errc::invalid_input, "content embedding dimension mismatch");
    Graph g(false);
    Binder bind(g, false);
    auto& self = const_cast<Model&>(*this);
    Node out = self.decode_g(g, bind, g.input(codes.content.values),
                             g.input(Mat(codes.speaker.values)),
                             codes.f0.values);
    MelSpectrogram mel;
    mel.values = g.value(out);
    mel.standardized = true;
    return mel;
  }

  double discriminate(const MelSpectrogram& mel) const {
    check_standardized(mel);
    require(mel.frames() >= 16, Errc::input_too_short,
            "discriminator requires at least 16 frames");
    Graph g(false);
    Binder bind(g, false);
    auto& self = const_cast<Model&>(*this);
    Node logit = self.discriminate_g(g, bind, g.input(mel.values));
    return g.scalar(logit);
  }

 private:
  void check_standardized(const MelSpectrogram& mel) const {
    require(mel.standardized, Errc::state,
            "model operations require a standardized Mel");
    require(mel.bins() == dims.n_mels, Errc::invalid_input,
            "Mel bin count does not match the model");
    require(mel.frames() >= 1, Errc::invalid_input, "empty Mel");
  }
};

// ---- checkpoint plumbing ----

inline void append_model_tensors(io::Checkpoint& ck, Model& model) {
  model.visit([&ck](Tensor& t) {
    ck.tensors.push_back(io::CheckpointTensor{
        t.name, t.value.rows(), t.value.cols(), t.frozen, t.value});
  });
}

inline void load_model_tensors(const io::Checkpoint& ck, Model& model) {
  model.visit([&ck](Tensor& t) {
    const io::CheckpointTensor* src = ck.find(t.name);
    require(src != nullptr, Errc::io, "checkpoint missing tensor " + t.name);
    require(src->value.rows() == t.value.rows() &&
                src->value.cols() == t.value.cols(),
            Errc::io, "checkpoint tensor shape mismatch for " + t.name);
    t.value = src->value;
    t.frozen = src->frozen;
    t.grad = Mat::Zero(t.value.rows(), t.value.cols());
  });
}

}  // namespace vreen::model

#endif  // VREEN_MODEL_HPP_
