// vreen/synth.hpp

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

// Bundled synthetic-data generator.  Produces a VCTK-style directory tree
// of formant-like multi-"speaker" utterances (or pure-tone utterances for
// pitch pre-training) with frame-exact alignment files.  Segment lengths
// are whole hops and utterances start and end voiced, so silence trimming
// is a no-op and alignments always land within the parser's 2-frame slack.

#ifndef VREEN_SYNTH_HPP_
#define VREEN_SYNTH_HPP_

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "vreen/common.hpp"
#include "vreen/io.hpp"
#include "vreen/wav.hpp"

namespace vreen::synth {

struct SynthSpec {
  std::string kind = "formant";  // "formant" | "sines"
  int n_speakers = 2;
  int utterances_per_speaker = 10;
  uint64_t seed = 1234;
};

namespace detail {

constexpr int kSampleRate = 16000;
constexpr int kHop = 200;

struct Vowel {
  const char* symbol;
  double f1, f2;
};

inline const std::vector<Vowel>& vowels() {
  static const std::vector<Vowel> v = {{"AA1", 730.0, 1090.0},
                                       {"IY1", 270.0, 2290.0},
                                       {"UW1", 300.0, 870.0},
                                       {"EH1", 530.0, 1840.0},
                                       {"OW1", 570.0, 840.0}};
  return v;
}

inline double speaker_base_f0(int k) {
  static const double table[] = {110.0, 205.0, 145.0, 260.0, 175.0};
  return table[k % 5] * (1.0 + 0.02 * (k / 5));
}

inline double formant_envelope(double freq, double f1, double f2,
                               double scale) {
  auto peak = [freq](double center) {
    const double d = (freq - center) / 180.0;
    return 1.0 / (1.0 + d * d);
  };
  const double tilt = 1.0 / (1.0 + (freq / 3000.0) * (freq / 3000.0));
  return (peak(f1 * scale) + 0.7 * peak(f2 * scale) + 0.02) * tilt;
}

struct Segment {
  std::string symbol;
  int frames = 0;
};

// Renders one utterance from its segment plan; returns samples and appends
// nothing silent at the edges.
inline Vec render_segments(const std::vector<Segment>& segments,
                           double base_f0, double formant_scale, Rng& rng) {
  long total = 0;
  for (const auto& s : segments) total += static_cast<long>(s.frames) * kHop;
  Vec audio = Vec::Zero(total);

  const double vibrato_rate = rng.uniform(1.0, 2.2);
  const double vibrato_depth = rng.uniform(0.03, 0.08);
  const double vibrato_phase = rng.uniform(0.0, 2.0 * M_PI);
  std::vector<double> phases(64, 0.0);
  double lp_state = 0.0;

  long pos = 0;
  for (const auto& seg : segments) {
    const long n = static_cast<long>(seg.frames) * kHop;
    const bool is_vowel = seg.symbol != "sil" && seg.symbol != "S" &&
                          seg.symbol != "F" && seg.symbol.rfind("TONE", 0) != 0;
    if (seg.symbol == "sil") {
      pos += n;
      continue;
    }
    if (seg.symbol == "S" || seg.symbol == "F") {
      double prev = 0.0;
      for (long i = 0; i < n; ++i) {
        const double w = rng.uniform(-1.0, 1.0);
        double s;
        if (seg.symbol == "S") {
          s = 0.5 * (w - prev);  // first difference lifts the high band
          prev = w;
        } else {
          lp_state = 0.25 * w + 0.75 * lp_state;
          s = 1.8 * lp_state;
        }
        audio[pos + i] = 0.25 * s;
      }
      pos += n;
      continue;
    }

    // Voiced: harmonic source under a two-formant envelope.  TONE segments
    // (sines kind) use a bare fundamental plus one weak harmonic.
    double f1 = 0, f2 = 0;
    bool tone = !is_vowel;
    double tone_f0 = base_f0;
    if (tone) {
      tone_f0 = base_f0 * rng.uniform(0.85, 1.25);
    } else {
      for (const auto& v : vowels())
        if (seg.symbol == v.symbol) {
          f1 = v.f1;
          f2 = v.f2;
        }
      require(f1 > 0, Errc::invalid_input,
              "unknown synthetic segment symbol: " + seg.symbol);
    }
    // Tones stay at constant pitch; vowels carry slow vibrato.
    for (long i = 0; i < n; ++i) {
      const double t = static_cast<double>(pos + i) / kSampleRate;
      const double f0 =
          tone ? tone_f0
               : base_f0 * (1.0 + vibrato_depth *
                                      std::sin(2.0 * M_PI * vibrato_rate * t +
                                               vibrato_phase));
      double s = 0.0;
      const int h_max = tone ? 2 : 32;
      for (int h = 1; h <= h_max; ++h) {
        const double freq = h * f0;
        if (freq > 7200.0) break;
        const double amp =
            tone ? (h == 1 ? 1.0 : 0.3)
                 : formant_envelope(freq, f1, f2, formant_scale) / h;
        s += amp * std::sin(phases[h]);
        phases[h] += 2.0 * M_PI * freq / kSampleRate;
      }
      audio[pos + i] = s;
    }
    pos += n;
  }

  const double peak = audio.cwiseAbs().maxCoeff();
  if (peak > 1e-9) audio *= 0.45 / peak;

  // Raised-cosine edges keep the first and last frames loud enough that
  // silence trimming never bites.
  const long fade = std::min<long>(48, total / 4);
  for (long i = 0; i < fade; ++i) {
    const double w = 0.5 - 0.5 * std::cos(M_PI * (i + 1) / (fade + 1));
    audio[i] *= w;
    audio[total - 1 - i] *= w;
  }
  return audio;
}

inline std::string alignment_text(const std::vector<Segment>& segments) {
  std::string out;
  for (const auto& s : segments) {
    const std::string sym = s.symbol.rfind("TONE", 0) == 0 ? "AA1" : s.symbol;
    out += "[" + sym + " " + std::to_string(s.frames) + "]";
  }
  return out + "\n";
}

}  // namespace detail

inline void generate_dataset(const std::string& root, const SynthSpec& spec) {
  require(spec.n_speakers >= 1 && spec.utterances_per_speaker >= 1,
          Errc::config, "synthetic dataset needs speakers and utterances");
  require(spec.kind == "formant" || spec.kind == "sines", Errc::config,
          "unknown synthetic dataset kind: " + spec.kind);
  Rng rng(spec.seed);

  for (int k = 0; k < spec.n_speakers; ++k) {
    char spk_name[8];
    std::snprintf(spk_name, sizeof(spk_name), "p%03d", k + 1);
    const std::filesystem::path spk_dir =
        std::filesystem::path(root) / spk_name;
    std::filesystem::create_directories(spk_dir);
    const double base_f0 = detail::speaker_base_f0(k);
    const double formant_scale = 0.92 + 0.1 * (k % 3);

    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      std::vector<detail::Segment> segments;
      if (spec.kind == "sines") {
        segments.push_back({"TONE_A", rng.uniform_int(12, 20)});
        segments.push_back({"sil", rng.uniform_int(4, 8)});
        segments.push_back({"TONE_B", rng.uniform_int(8, 16)});
      } else {
        const auto& vset = detail::vowels();
        const int n_seg = 4;
        for (int s = 0; s < n_seg; ++s) {
          std::string sym;
          if (s == 0 || s == n_seg - 1) {
            sym = vset[rng.uniform_int(0, static_cast<int>(vset.size()) - 1)]
                      .symbol;
          } else {
            const int pick = rng.uniform_int(0, 6);
            if (pick < 4)
              sym = vset[pick % vset.size()].symbol;
            else
              sym = (pick == 4) ? "S" : (pick == 5 ? "F" : "sil");
          }
          segments.push_back({sym, rng.uniform_int(8, 13)});
        }
      }

      const Vec audio =
          detail::render_segments(segments, base_f0, formant_scale, rng);
      char utt_name[16];
      std::snprintf(utt_name, sizeof(utt_name), "%s_%03d", spk_name, u + 1);
      write_wav((spk_dir / (std::string(utt_name) + ".wav")).string(),
                     audio, detail::kSampleRate);
      io::write_text_file(
          (spk_dir / (std::string(utt_name) + ".align")).string(),
          detail::alignment_text(segments));
    }
  }
}

}  // namespace vreen::synth

#endif  // VREEN_SYNTH_HPP_
