// vreen/conversion.hpp

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

// Inference-time reenactment: source content + F0 under a target identity.
// The F0 conditioning track is transferred as-is, range-normalized to the
// target's log-F0 statistics, or supplied explicitly.

#ifndef VREEN_CONVERSION_HPP_
#define VREEN_CONVERSION_HPP_

#include <cmath>
#include <string>

#include "vreen/common.hpp"
#include "vreen/dsp.hpp"
#include "vreen/features.hpp"
#include "vreen/model.hpp"
#include "vreen/types.hpp"

namespace vreen::conv {

enum class F0Mode { transfer, transfer_normalized, explicit_track };

inline F0Mode parse_f0_mode(const std::string& s) {
  if (s == "transfer") return F0Mode::transfer;
  if (s == "transfer_normalized") return F0Mode::transfer_normalized;
  if (s == "explicit") return F0Mode::explicit_track;
  raise(Errc::config, "unknown f0_mode: " + s);
}

inline std::string f0_mode_name(F0Mode m) {
  switch (m) {
    case F0Mode::transfer: return "transfer";
    case F0Mode::transfer_normalized: return "transfer_normalized";
    default: return "explicit";
  }
}

// Log-domain affine range mapping; unvoiced frames pass through as exact 0.
inline F0Track adapt_f0_range(const F0Track& src, double mu_s, double sigma_s,
                              double mu_t, double sigma_t) {
  require(sigma_s > 0 && sigma_t > 0, Errc::invalid_stats,
          "adapt_f0_range: non-positive sigma");
  F0Track out;
  out.values = Vec::Zero(src.length());
  for (long t = 0; t < src.length(); ++t) {
    if (!src.voiced(t)) continue;
    const double z = (std::log(src.values[t]) - mu_s) / sigma_s;
    out.values[t] = std::exp(z * sigma_t + mu_t);
  }
  return out;
}

// Voiced-frame log-F0 mean and population std of a single track, for the
// stats-from-track fallback.
struct TrackStats {
  double mu = 0;
  double sigma = 0;
};

inline TrackStats track_log_f0_stats(const F0Track& track) {
  double sum = 0;
  long n = 0;
  for (long t = 0; t < track.length(); ++t)
    if (track.voiced(t)) {
      sum += std::log(track.values[t]);
      ++n;
    }
  require(n > 0, Errc::insufficient_data,
          "no voiced frames to estimate F0 statistics");
  const double mu = sum / static_cast<double>(n);
  double var = 0;
  for (long t = 0; t < track.length(); ++t)
    if (track.voiced(t)) {
      const double d = std::log(track.values[t]) - mu;
      var += d * d;
    }
  return {mu, std::max(1e-4, std::sqrt(var / static_cast<double>(n)))};
}

struct ConversionRequest {
  MelSpectrogram source_mel;  // standardized
  F0Track source_f0;
  MelSpectrogram target_reference;  // standardized
  SpeakerProfile target_profile;
  F0Mode f0_mode = F0Mode::transfer_normalized;
  F0Track explicit_track;  // used only in explicit mode
  // Source-side statistics for transfer_normalized: corpus profile when
  // available, otherwise the input track's own statistics.
  bool have_source_profile = false;
  SpeakerProfile source_profile;
};

struct ConversionResult {
  MelSpectrogram mel;
  F0Track conditioning;  // the track actually fed to the decoder
};

inline ConversionResult convert(const ConversionRequest& req,
                                const model::Model& m) {
  require(req.source_mel.frames() == req.source_f0.length(),
          Errc::invalid_input, "source Mel and F0 track lengths differ");
  F0Track conditioning;
  switch (req.f0_mode) {
    case F0Mode::transfer:
      conditioning = req.source_f0;
      break;
    case F0Mode::transfer_normalized: {
      double mu_s, sigma_s;
      if (req.have_source_profile) {
        mu_s = req.source_profile.log_f0_mean;
        sigma_s = req.source_profile.log_f0_std;
      } else {
        const TrackStats stats = track_log_f0_stats(req.source_f0);
        mu_s = stats.mu;
        sigma_s = stats.sigma;
      }
      conditioning =
          adapt_f0_range(req.source_f0, mu_s, sigma_s,
                         req.target_profile.log_f0_mean,
                         req.target_profile.log_f0_std);
      break;
    }
    case F0Mode::explicit_track:
      require(req.explicit_track.length() == req.source_mel.frames(),
              Errc::invalid_input,
              "explicit F0 track length does not match source frames");
      conditioning = req.explicit_track;
      break;
  }

  CodeBundle codes{m.encode_content(req.source_mel),
                   m.encode_speaker(req.target_reference), conditioning};
  ConversionResult out;
  out.mel = m.decode(codes);
  out.conditioning = std::move(conditioning);
  return out;
}

// De-standardize, invert the log and the Mel filterbank (regularized
// pseudo-inverse), then reconstruct phase by alternating STFT projections.
inline Vec render_waveform(const MelSpectrogram& mel, const Standardizer& s,
                           const MelConfig& cfg = {},
                           int gl_iterations = 60) {
  require(mel.standardized, Errc::state,
          "render_waveform expects a standardized Mel");
  MelSpectrogram linear =
      apply_standardizer(mel, s, StdDirection::inverse);
  Mat amplitudes = linear.values.array().exp();

  const Mat fb = mel_filterbank(cfg.n_mels, cfg.stft.n_fft,
                                cfg.stft.sample_rate, cfg.fmin,
                                cfg.fmax);  // n_mels x freq_bins
  Mat gram = fb * fb.transpose();
  gram.diagonal().array() += 1e-8;
  Mat spec = fb.transpose() * gram.ldlt().solve(amplitudes);
  spec = spec.cwiseMax(0.0);

  const long out_len =
      (mel.frames() - 1) * static_cast<long>(cfg.stft.hop);
  if (out_len <= 0) return Vec::Zero(0);
  return griffin_lim(spec, cfg.stft, gl_iterations, out_len);
}

}  // namespace vreen::conv

#endif  // VREEN_CONVERSION_HPP_
