// vreen/eval.hpp

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

// Objective evaluation: F0 RMSE, time-synchrony checks and the
// classifier-based speaker-similarity proxy.  The proxy is an explicit
// non-equivalent substitute for listening tests.

#ifndef VREEN_EVAL_HPP_
#define VREEN_EVAL_HPP_

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "vreen/common.hpp"
#include "vreen/io.hpp"
#include "vreen/model.hpp"
#include "vreen/types.hpp"

namespace vreen::eval {

// RMSE in Hz over frames where both tracks are voiced.  No co-voiced
// frames is degenerate, not an error: 0 with a warning.
inline double f0_rmse(const F0Track& reference, const F0Track& measured) {
  require(reference.length() == measured.length(), Errc::invalid_input,
          "f0_rmse: track lengths differ");
  double sq = 0.0;
  long n = 0;
  for (long t = 0; t < reference.length(); ++t) {
    if (!reference.voiced(t) || !measured.voiced(t)) continue;
    const double d = reference.values[t] - measured.values[t];
    sq += d * d;
    ++n;
  }
  if (n == 0) {
    warn("f0_rmse: no co-voiced frames; reporting 0");
    return 0.0;
  }
  return std::sqrt(sq / static_cast<double>(n));
}

// Transparency variant: every frame participates, unvoiced as 0.
inline double f0_rmse_inclusive(const F0Track& reference,
                                const F0Track& measured) {
  require(reference.length() == measured.length(), Errc::invalid_input,
          "f0_rmse: track lengths differ");
  require(reference.length() >= 1, Errc::invalid_input,
          "f0_rmse: empty tracks");
  return std::sqrt((reference.values - measured.values).squaredNorm() /
                   static_cast<double>(reference.length()));
}

inline bool check_time_sync(const MelSpectrogram& source,
                            const MelSpectrogram& converted) {
  return source.frames() == converted.frames();
}

inline double speaker_similarity_proxy(
    const std::vector<MelSpectrogram>& converted, int target_id,
    const model::Model& m) {
  require(target_id >= 0 && target_id < m.dims.n_speakers, Errc::config,
          "speaker_similarity_proxy: unknown target id");
  if (converted.empty()) {
    warn("speaker_similarity_proxy: empty set; reporting 0");
    return 0.0;
  }
  long hits = 0;
  for (const auto& mel : converted) {
    const Vec probs = m.classify_speaker(m.encode_speaker(mel));
    int argmax = 0;
    probs.maxCoeff(&argmax);
    if (argmax == target_id) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(converted.size());
}

struct PairResult {
  std::string source_speaker;
  std::string target_speaker;
  std::string f0_mode;
  long utterances = 0;
  double f0_rmse_covoiced = 0;
  double f0_rmse_inclusive = 0;
  long sync_pass = 0;
  long sync_fail = 0;
  double speaker_proxy = 0;
};

struct EvalReport {
  std::string config_hash;
  uint64_t seed = 0;
  std::string version;
  std::string checkpoint;
  std::vector<PairResult> pairs;

  io::json to_json() const {
    io::json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["version"] = version;
    j["checkpoint"] = checkpoint;
    j["pairs"] = io::json::array();
    for (const auto& p : pairs) {
      j["pairs"].push_back(io::json{{"source_speaker", p.source_speaker},
                                    {"target_speaker", p.target_speaker},
                                    {"f0_mode", p.f0_mode},
                                    {"utterances", p.utterances},
                                    {"f0_rmse_covoiced", p.f0_rmse_covoiced},
                                    {"f0_rmse_inclusive", p.f0_rmse_inclusive},
                                    {"sync_pass", p.sync_pass},
                                    {"sync_fail", p.sync_fail},
                                    {"speaker_proxy", p.speaker_proxy}});
    }
    return j;
  }

  static EvalReport from_json(const io::json& j) {
    EvalReport r;
    r.config_hash = j.value("config_hash", std::string());
    r.seed = j.value("seed", static_cast<uint64_t>(0));
    r.version = j.value("version", std::string());
    r.checkpoint = j.value("checkpoint", std::string());
    for (const auto& e : j.value("pairs", io::json::array())) {
      PairResult p;
      p.source_speaker = e.value("source_speaker", std::string());
      p.target_speaker = e.value("target_speaker", std::string());
      p.f0_mode = e.value("f0_mode", std::string());
      p.utterances = e.value("utterances", 0L);
      p.f0_rmse_covoiced = e.value("f0_rmse_covoiced", 0.0);
      p.f0_rmse_inclusive = e.value("f0_rmse_inclusive", 0.0);
      p.sync_pass = e.value("sync_pass", 0L);
      p.sync_fail = e.value("sync_fail", 0L);
      p.speaker_proxy = e.value("speaker_proxy", 0.0);
      r.pairs.push_back(std::move(p));
    }
    return r;
  }

  // Plain-text table, one row per conversion pair.
  std::string text_table() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %-6s %9s %9s %6s %7s\n",
                  "pair", "utts", "rmse_cov", "rmse_all", "sync", "proxy");
    out += line;
    out += std::string(56, '-') + "\n";
    for (const auto& p : pairs) {
      const std::string pair = p.source_speaker + "->" + p.target_speaker;
      std::snprintf(line, sizeof(line), "%-14s %-6ld %9.3f %9.3f %3ld/%-3ld %7.2f\n",
                    pair.c_str(), p.utterances, p.f0_rmse_covoiced,
                    p.f0_rmse_inclusive, p.sync_pass,
                    p.sync_pass + p.sync_fail, p.speaker_proxy);
      out += line;
    }
    return out;
  }
};

}  // namespace vreen::eval

#endif  // VREEN_EVAL_HPP_
