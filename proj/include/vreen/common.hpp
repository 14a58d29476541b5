// vreen/common.hpp

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

#ifndef VREEN_COMMON_HPP_
#define VREEN_COMMON_HPP_

#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace vreen {

inline const char* version() { return "0.1.0"; }

// Error categories used across the toolkit.  Each maps to one failure mode
// named in the operation contracts.
enum class Errc {
  invalid_input,
  unsupported_rate,
  state,
  alignment,
  vocabulary,
  insufficient_data,
  insufficient_negatives,
  regime,
  config,
  dependency,
  input_too_short,
  invalid_stats,
  io,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::unsupported_rate: return "unsupported-rate";
    case Errc::state: return "state";
    case Errc::alignment: return "alignment";
    case Errc::vocabulary: return "vocabulary";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::insufficient_negatives: return "insufficient-negatives";
    case Errc::regime: return "regime";
    case Errc::config: return "configuration";
    case Errc::dependency: return "dependency";
    case Errc::input_too_short: return "input-too-short";
    case Errc::invalid_stats: return "invalid-stats";
    case Errc::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) raise(code, msg);
}

// Warnings go through a replaceable sink so tests can capture them.
using WarnSink = std::function<void(const std::string&)>;

inline WarnSink& warn_sink() {
  static WarnSink sink = [](const std::string& msg) {
    std::cerr << "[vreen] warning: " << msg << "\n";
  };
  return sink;
}

inline WarnSink set_warning_sink(WarnSink sink) {
  WarnSink prev = warn_sink();
  warn_sink() = std::move(sink);
  return prev;
}

inline void warn(const std::string& msg) {
  if (warn_sink()) warn_sink()(msg);
}

// Deterministic RNG.  Uniform/normal draws are derived from raw mt19937_64
// output so sequences do not depend on the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(raw() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(raw() % span);
  }

  // Box-Muller; consumes two uniforms per draw.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::string serialize() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void deserialize(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    if (!is) raise(Errc::invalid_input, "bad rng state string");
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

}  // namespace vreen

#endif  // VREEN_COMMON_HPP_
