// vreen/dsp.hpp

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

#ifndef VREEN_DSP_HPP_
#define VREEN_DSP_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "vreen/common.hpp"
#include "vreen/types.hpp"

namespace vreen {

constexpr double kPi = 3.14159265358979323846;

struct StftConfig {
  int sample_rate = 16000;
  int win_length = 800;  // 50 ms
  int hop = 200;         // 12.5 ms
  int n_fft = 2048;

  int freq_bins() const { return n_fft / 2 + 1; }
};

// Frame count under center-padded framing: one frame per hop, frame t
// centered on sample t*hop.
inline int stft_num_frames(long n_samples, int hop) {
  return 1 + static_cast<int>(n_samples / hop);
}

// Periodic Hann window.
inline Vec hann_window(int n) {
  Vec w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

using CMat = Eigen::MatrixXcd;

// Complex STFT, freq_bins x T.  Frames are centered on t*hop and windowed
// with a periodic Hann of win_length samples placed at the start of the
// n_fft buffer.
inline CMat stft(const Vec& audio, const StftConfig& cfg = {}) {
  const int n = static_cast<int>(audio.size());
  const int T = stft_num_frames(n, cfg.hop);
  const Vec window = hann_window(cfg.win_length);
  const int half = cfg.win_length / 2;

  CMat out(cfg.freq_bins(), T);
  Eigen::FFT<double> fft;
  std::vector<double> buf(cfg.n_fft);
  std::vector<std::complex<double>> spec(cfg.n_fft);
  for (int t = 0; t < T; ++t) {
    const long center = static_cast<long>(t) * cfg.hop;
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int i = 0; i < cfg.win_length; ++i) {
      const long src = center - half + i;
      if (src >= 0 && src < n) buf[i] = audio[src] * window[i];
    }
    fft.fwd(spec, buf);
    for (int k = 0; k < cfg.freq_bins(); ++k) out(k, t) = spec[k];
  }
  return out;
}

// Inverse STFT by windowed overlap-add with squared-window normalization.
// out_len selects how many samples to emit, normally (T-1)*hop.
inline Vec istft(const CMat& spec, const StftConfig& cfg, long out_len) {
  const int T = static_cast<int>(spec.cols());
  const Vec window = hann_window(cfg.win_length);
  const int half = cfg.win_length / 2;

  // Work buffer with half a window of padding on each side so frame 0 and
  // frame T-1 can be placed without clipping.
  const long buf_len = static_cast<long>(T - 1) * cfg.hop + cfg.win_length;
  Vec acc = Vec::Zero(buf_len);
  Vec norm = Vec::Zero(buf_len);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> full(cfg.n_fft);
  std::vector<double> frame(cfg.n_fft);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < cfg.freq_bins(); ++k) full[k] = spec(k, t);
    for (int k = cfg.freq_bins(); k < cfg.n_fft; ++k)
      full[k] = std::conj(full[cfg.n_fft - k]);
    fft.inv(frame, full);
    const long base = static_cast<long>(t) * cfg.hop;  // maps to center-half
    for (int i = 0; i < cfg.win_length; ++i) {
      acc[base + i] += frame[i] * window[i];
      norm[base + i] += window[i] * window[i];
    }
  }

  Vec out = Vec::Zero(out_len);
  for (long i = 0; i < out_len; ++i) {
    const long j = i + half;  // sample i sits at buffer index i + half
    if (j >= 0 && j < buf_len && norm[j] > 1e-10) out[i] = acc[j] / norm[j];
  }
  return out;
}

// HTK Mel scale.
inline double hz_to_mel(double hz) {
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

inline double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Triangular Mel filterbank (peak 1), n_mels x freq_bins.
inline Mat mel_filterbank(int n_mels, int n_fft, double sample_rate,
                          double fmin, double fmax) {
  const int bins = n_fft / 2 + 1;
  const double mel_min = hz_to_mel(fmin);
  const double mel_max = hz_to_mel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = mel_to_hz(mel_min + (mel_max - mel_min) * i / (n_mels + 1));

  Mat fb = Mat::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = sample_rate * k / n_fft;
      if (f > lo && f < center)
        fb(m, k) = (f - lo) / (center - lo);
      else if (f >= center && f < hi)
        fb(m, k) = (hi - f) / (hi - center);
    }
  }
  return fb;
}

// Center frequency of Mel filter m, for tests that locate spectral peaks.
inline double mel_bin_center_hz(int m, int n_mels, double fmin, double fmax) {
  const double mel_min = hz_to_mel(fmin);
  const double mel_max = hz_to_mel(fmax);
  return mel_to_hz(mel_min + (mel_max - mel_min) * (m + 1) / (n_mels + 1));
}

// Windowed-sinc resampler.  Cutoff sits at the lower of the two Nyquist
// frequencies; 32 zero crossings per side with a Hann taper.
inline Vec resample(const Vec& x, double src_rate, double dst_rate) {
  if (src_rate == dst_rate) return x;
  require(src_rate > 0 && dst_rate > 0, Errc::invalid_input,
          "sample rates must be positive");
  const double ratio = src_rate / dst_rate;
  const long out_len = static_cast<long>(std::floor(x.size() / ratio));
  const double fc = std::min(1.0, 1.0 / ratio) * 0.5;  // cycles/src-sample
  const int taps = 32;
  const double width = taps / std::max(1.0, ratio);

  Vec out = Vec::Zero(out_len);
  for (long i = 0; i < out_len; ++i) {
    const double t = i * ratio;
    const long k0 = static_cast<long>(std::ceil(t - width));
    const long k1 = static_cast<long>(std::floor(t + width));
    double acc = 0.0;
    for (long k = std::max<long>(0, k0);
         k <= std::min<long>(x.size() - 1, k1); ++k) {
      const double d = t - k;
      double s;
      if (std::abs(d) < 1e-12) {
        s = 2.0 * fc;
      } else {
        s = std::sin(2.0 * kPi * fc * d) / (kPi * d);
      }
      const double w = 0.5 + 0.5 * std::cos(kPi * d / width);
      acc += x[k] * s * w;
    }
    out[i] = acc;
  }
  return out;
}

// First/last sample of the span whose short-window RMS exceeds rel_db
// relative to the utterance peak RMS.  Returns {0, n} for all-quiet input.
inline std::pair<long, long> trim_silence_span(const Vec& audio,
                                               double rel_db = -50.0) {
  const long n = audio.size();
  const int win = 160, hop = 80;  // 10 ms / 5 ms at 16 kHz
  if (n < win) return {0, n};
  std::vector<double> rms;
  for (long start = 0; start + win <= n; start += hop) {
    double e = 0;
    for (int i = 0; i < win; ++i) e += audio[start + i] * audio[start + i];
    rms.push_back(std::sqrt(e / win));
  }
  const double peak = *std::max_element(rms.begin(), rms.end());
  if (peak <= 0) return {0, n};
  const double thresh = peak * std::pow(10.0, rel_db / 20.0);
  long first = -1, last = -1;
  for (size_t i = 0; i < rms.size(); ++i) {
    if (rms[i] > thresh) {
      if (first < 0) first = static_cast<long>(i);
      last = static_cast<long>(i);
    }
  }
  if (first < 0) return {0, n};
  const long begin = first * hop;
  const long end = std::min<long>(n, last * hop + win);
  return {begin, end};
}

inline Vec trim_silence(const Vec& audio, double rel_db = -50.0) {
  auto [begin, end] = trim_silence_span(audio, rel_db);
  return audio.segment(begin, end - begin);
}

// Phase reconstruction by alternating STFT projections from a magnitude
// spectrogram (zero initial phase, deterministic).
inline Vec griffin_lim(const Mat& magnitude, const StftConfig& cfg,
                       int iterations, long out_len) {
  const int T = static_cast<int>(magnitude.cols());
  require(magnitude.rows() == cfg.freq_bins(), Errc::invalid_input,
          "magnitude rows must equal freq bins");
  CMat spec = magnitude.cast<std::complex<double>>();
  Vec x = istft(spec, cfg, out_len);
  for (int it = 0; it < iterations; ++it) {
    CMat est = stft(x, cfg);
    for (int t = 0; t < T && t < est.cols(); ++t) {
      for (int k = 0; k < est.rows(); ++k) {
        const double m = std::abs(est(k, t));
        spec(k, t) = m > 1e-12 ? est(k, t) / m * magnitude(k, t)
                               : std::complex<double>(magnitude(k, t), 0.0);
      }
    }
    x = istft(spec, cfg, out_len);
  }
  return x;
}

}  // namespace vreen

#endif  // VREEN_DSP_HPP_
