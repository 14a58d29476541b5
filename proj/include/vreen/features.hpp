// vreen/features.hpp

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

#ifndef VREEN_FEATURES_HPP_
#define VREEN_FEATURES_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "vreen/common.hpp"
#include "vreen/dsp.hpp"
#include "vreen/types.hpp"

namespace vreen {

struct MelConfig {
  StftConfig stft;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-5;
};

// Log-amplitude Mel spectrogram of an utterance.  Input at any rate of at
// least 16 kHz; resampled to 16 kHz first.  T = 1 + floor(n/hop).
inline MelSpectrogram compute_mel(const Vec& audio, double source_rate,
                                  const MelConfig& cfg = {}) {
  require(audio.size() > 0, Errc::invalid_input, "empty audio");
  require(source_rate >= 16000.0, Errc::unsupported_rate,
          "source rate must be >= 16000 Hz, got " +
              std::to_string(source_rate));
  const Vec x = resample(audio, source_rate,
                         static_cast<double>(cfg.stft.sample_rate));
  const CMat spec = stft(x, cfg.stft);
  static thread_local Mat fb_cache;
  static thread_local MelConfig fb_cfg;
  if (fb_cache.rows() != cfg.n_mels || fb_cfg.fmax != cfg.fmax ||
      fb_cfg.fmin != cfg.fmin || fb_cfg.stft.n_fft != cfg.stft.n_fft) {
    fb_cache = mel_filterbank(cfg.n_mels, cfg.stft.n_fft,
                              cfg.stft.sample_rate, cfg.fmin, cfg.fmax);
    fb_cfg = cfg;
  }
  const Mat mel_amp = fb_cache * spec.cwiseAbs();

  MelSpectrogram mel;
  mel.values = mel_amp.unaryExpr(
      [&](double v) { return std::log(std::max(v, cfg.log_floor)); });
  mel.frame_rate = static_cast<double>(cfg.stft.sample_rate) / cfg.stft.hop;
  mel.standardized = false;
  return mel;
}

// Per-bin mean/std over all frames of all corpus items (population std,
// clamped below at 1e-8).
inline Standardizer fit_standardizer(const std::vector<MelSpectrogram>& corpus,
                                     const std::string& provenance = "") {
  require(!corpus.empty(), Errc::invalid_input, "empty standardizer corpus");
  const int bins = corpus.front().bins();
  long total = 0;
  Vec sum = Vec::Zero(bins), sq = Vec::Zero(bins);
  for (const auto& mel : corpus) {
    require(!mel.standardized, Errc::state,
            "standardizer corpus must be unstandardized");
    require(mel.bins() == bins, Errc::invalid_input,
            "inconsistent bin count in corpus");
    sum += mel.values.rowwise().sum();
    sq += mel.values.cwiseProduct(mel.values).rowwise().sum();
    total += mel.frames();
  }
  Standardizer s;
  s.provenance = provenance;
  s.mean = sum / total;
  s.std = Vec(bins);
  bool clamped = false;
  for (int b = 0; b < bins; ++b) {
    const double var = std::max(0.0, sq[b] / total - s.mean[b] * s.mean[b]);
    double sd = std::sqrt(var);
    if (sd < 1e-8) {
      sd = 1e-8;
      clamped = true;
    }
    s.std[b] = sd;
  }
  if (clamped) warn("constant Mel bin in corpus; std clamped to 1e-8");
  return s;
}

inline MelSpectrogram apply_standardizer(const MelSpectrogram& mel,
                                         const Standardizer& s,
                                         StdDirection direction) {
  require(mel.bins() == s.bins(), Errc::invalid_input,
          "standardizer bin count mismatch");
  MelSpectrogram out = mel;
  if (direction == StdDirection::forward) {
    require(!mel.standardized, Errc::state,
            "forward standardization requires unstandardized input");
    out.values = (mel.values.colwise() - s.mean).array().colwise() /
                 s.std.array();
    out.standardized = true;
  } else {
    require(mel.standardized, Errc::state,
            "inverse standardization requires standardized input");
    out.values =
        (mel.values.array().colwise() * s.std.array()).colwise() +
        s.mean.array();
    out.standardized = false;
  }
  return out;
}

struct F0Config {
  double fmin = 50.0;
  double fmax = 600.0;
  double periodicity_threshold = 0.45;
  int sample_rate = 16000;
  int win_length = 800;
  int hop = 200;
};

// Deterministic autocorrelation pitch tracker, frame-synchronous with
// compute_mel (same hop and centering, so track length always equals the
// Mel frame count).  For each frame the normalized cross-correlation is
// evaluated over lags covering [fmin, fmax]; among local maxima within 10%
// of the best score the shortest lag wins, which keeps period-doubled
// candidates of near-periodic signals from pulling the estimate an octave
// down.  A parabolic fit around the winning lag gives sub-sample precision.
inline F0Track extract_f0_oracle(const Vec& audio, const F0Config& cfg = {}) {
  require(audio.size() >= cfg.win_length, Errc::invalid_input,
          "audio shorter than one analysis window");
  const int T = stft_num_frames(audio.size(), cfg.hop);
  const int half = cfg.win_length / 2;
  const int lag_min = std::max(
      2, static_cast<int>(std::floor(cfg.sample_rate / cfg.fmax)));
  const int lag_max =
      static_cast<int>(std::ceil(cfg.sample_rate / cfg.fmin));

  F0Track track;
  track.values = Vec::Zero(T);
  std::vector<double> frame(cfg.win_length);
  std::vector<double> r(lag_max + 2, 0.0);
  for (int t = 0; t < T; ++t) {
    const long center = static_cast<long>(t) * cfg.hop;
    double energy = 0.0;
    for (int i = 0; i < cfg.win_length; ++i) {
      const long src = center - half + i;
      frame[i] = (src >= 0 && src < audio.size()) ? audio[src] : 0.0;
      energy += frame[i] * frame[i];
    }
    if (energy / cfg.win_length < 1e-10) continue;  // silence

    // NCCF over the fixed window; both norms adapt to the lag.
    double best = 0.0;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
      if (lag >= cfg.win_length) break;
      double num = 0, e0 = 0, e1 = 0;
      const int m = cfg.win_length - lag;
      for (int i = 0; i < m; ++i) {
        num += frame[i] * frame[i + lag];
        e0 += frame[i] * frame[i];
        e1 += frame[i + lag] * frame[i + lag];
      }
      const double den = std::sqrt(e0 * e1);
      r[lag] = den > 1e-12 ? num / den : 0.0;
      best = std::max(best, r[lag]);
    }
    if (best < cfg.periodicity_threshold) continue;

    int lag_star = 0;
    for (int lag = lag_min + 1; lag < lag_max && lag < cfg.win_length - 1;
         ++lag) {
      if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] &&
          r[lag] >= 0.9 * best) {
        lag_star = lag;
        break;  // shortest qualifying period
      }
    }
    if (lag_star == 0) continue;

    // Parabolic interpolation around the peak.
    double refined = lag_star;
    const double ym = r[lag_star - 1], y0 = r[lag_star], yp = r[lag_star + 1];
    const double den = ym - 2 * y0 + yp;
    if (std::abs(den) > 1e-12) {
      const double delta = 0.5 * (ym - yp) / den;
      if (std::abs(delta) <= 1.0) refined += delta;
    }
    const double f0 = cfg.sample_rate / refined;
    if (f0 >= cfg.fmin && f0 <= cfg.fmax) track.values[t] = f0;
  }
  return track;
}

// Phoneme inventory.  Default is a 72-symbol general-American set: 24
// consonants, 15 vowels in three stress variants, plus sil/sp/spn.
struct PhonemeInventory {
  std::vector<std::string> symbols;
  std::map<std::string, int> index;

  int size() const { return static_cast<int>(symbols.size()); }

  // Exact match first, then case/stress-normalized variants so informal
  // labels like "ah" resolve to "AH1".
  int id_of(const std::string& symbol) const {
    auto it = index.find(symbol);
    if (it != index.end()) return it->second;
    std::string upper = symbol, lower = symbol;
    for (auto& c : upper) c = static_cast<char>(std::toupper(c));
    for (auto& c : lower) c = static_cast<char>(std::tolower(c));
    for (const std::string& candidate : {upper, upper + "1", lower}) {
      it = index.find(candidate);
      if (it != index.end()) return it->second;
    }
    raise(Errc::vocabulary, "unknown phoneme symbol: " + symbol);
  }

  static PhonemeInventory general_american() {
    static const char* consonants[] = {
        "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
        "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"};
    static const char* vowels[] = {"AA", "AE", "AH", "AO", "AW", "AY", "EH",
                                   "ER", "EY", "IH", "IY", "OW", "OY", "UH",
                                   "UW"};
    PhonemeInventory inv;
    inv.symbols.push_back("sil");
    inv.symbols.push_back("sp");
    inv.symbols.push_back("spn");
    for (const char* c : consonants) inv.symbols.push_back(c);
    for (const char* v : vowels)
      for (int s = 0; s <= 2; ++s)
        inv.symbols.push_back(std::string(v) + std::to_string(s));
    for (int i = 0; i < inv.size(); ++i) inv.index[inv.symbols[i]] = i;
    return inv;
  }
};

// Parses "[symbol frames][symbol frames]..." into a frame-level ID vector.
// The total duration must land within 2 frames of expected_frames; the last
// phoneme is padded or truncated to absorb the rounding.
inline PhonemeAlignment parse_alignment(const std::string& text,
                                        int expected_frames,
                                        const PhonemeInventory& inventory) {
  std::vector<std::pair<int, int>> segments;  // (id, frames)
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] != '[') ++pos;
    if (pos >= text.size()) break;
    const size_t close = text.find(']', pos);
    require(close != std::string::npos, Errc::alignment,
            "unterminated alignment token");
    std::istringstream tok(text.substr(pos + 1, close - pos - 1));
    std::string symbol;
    long frames = -1;
    tok >> symbol >> frames;
    require(!symbol.empty() && frames > 0, Errc::alignment,
            "malformed alignment token near: " + text.substr(pos, 16));
    segments.emplace_back(inventory.id_of(symbol), static_cast<int>(frames));
    pos = close + 1;
  }
  require(!segments.empty(), Errc::alignment, "empty alignment");

  long total = 0;
  for (auto& [id, frames] : segments) total += frames;
  const long diff = expected_frames - total;
  require(std::abs(diff) <= 2, Errc::alignment,
          "alignment length " + std::to_string(total) + " vs expected " +
              std::to_string(expected_frames) + " differs by more than 2");
  segments.back().second += static_cast<int>(diff);
  require(segments.back().second > 0, Errc::alignment,
          "alignment truncation removed the last phoneme");

  PhonemeAlignment out;
  out.inventory_size = inventory.size();
  out.ids.reserve(expected_frames);
  for (auto& [id, frames] : segments)
    out.ids.insert(out.ids.end(), frames, id);
  return out;
}

inline PhonemeAlignment load_alignment(const std::string& path,
                                       int expected_frames,
                                       const PhonemeInventory& inventory) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open alignment file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_alignment(text, expected_frames, inventory);
}

// Mean and population std of log(F0) over voiced frames across all tracks.
// Sigma is clamped below at 1e-4.
inline std::pair<double, double> compute_speaker_f0_stats(
    const std::vector<F0Track>& tracks) {
  double sum = 0, sq = 0;
  long n = 0;
  for (const auto& track : tracks) {
    for (int t = 0; t < track.length(); ++t) {
      if (!track.voiced(t)) continue;
      const double lf = std::log(track.values[t]);
      sum += lf;
      sq += lf * lf;
      ++n;
    }
  }
  require(n > 0, Errc::insufficient_data,
          "no voiced frames available for F0 statistics");
  const double mu = sum / n;
  const double var = std::max(0.0, sq / n - mu * mu);
  const double sigma = std::max(1e-4, std::sqrt(var));
  return {mu, sigma};
}

}  // namespace vreen

#endif  // VREEN_FEATURES_HPP_
