// vreen/types.hpp

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

#ifndef VREEN_TYPES_HPP_
#define VREEN_TYPES_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vreen/common.hpp"

namespace vreen {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Log-amplitude Mel energies, one column per frame.  The whole toolkit runs
// at 80 bins / 80 frames-per-second (12.5 ms hop at 16 kHz).
struct MelSpectrogram {
  Mat values;              // n_mels x T
  double frame_rate = 80.0;
  bool standardized = false;

  int bins() const { return static_cast<int>(values.rows()); }
  int frames() const { return static_cast<int>(values.cols()); }
};

inline void check_mel(const MelSpectrogram& mel, int expected_bins = 80) {
  require(mel.bins() == expected_bins, Errc::invalid_input,
          "Mel spectrogram must have " + std::to_string(expected_bins) +
              " bins, got " + std::to_string(mel.bins()));
  require(mel.frames() >= 1, Errc::invalid_input,
          "Mel spectrogram must have at least one frame");
  require(mel.values.allFinite(), Errc::invalid_input,
          "Mel spectrogram contains non-finite values");
}

// F0 per frame in Hz; unvoiced frames carry exactly 0.
struct F0Track {
  Vec values;

  int length() const { return static_cast<int>(values.size()); }
  bool voiced(int t) const { return values[t] > 0.0; }
  int voiced_count() const {
    int n = 0;
    for (int t = 0; t < length(); ++t) n += voiced(t) ? 1 : 0;
    return n;
  }
};

// Frame-level phoneme IDs, time-aligned to the Mel frames.
struct PhonemeAlignment {
  std::vector<int> ids;
  int inventory_size = 0;

  int length() const { return static_cast<int>(ids.size()); }
};

enum class StdDirection { forward, inverse };

// Per-bin affine standardization fitted on a training corpus.
struct Standardizer {
  Vec mean;
  Vec std;
  std::string provenance;

  int bins() const { return static_cast<int>(mean.size()); }
};

// Speaker identity plus the log-F0 statistics used for F0 range adaptation.
struct SpeakerProfile {
  std::string speaker_id;
  double log_f0_mean = 0.0;
  double log_f0_std = 1.0;
  std::vector<std::string> reference_utterances;
};

struct ContentEmbedding {
  Mat values;  // content_dim x T
  int frames() const { return static_cast<int>(values.cols()); }
};

struct SpeakerEmbedding {
  Vec values;  // speaker_dim
};

// Decoder conditioning: frame-synchronous content, a time-independent
// speaker vector and the F0 track driving prosody.
struct CodeBundle {
  ContentEmbedding content;
  SpeakerEmbedding speaker;
  F0Track f0;
};

}  // namespace vreen

#endif  // VREEN_TYPES_HPP_
