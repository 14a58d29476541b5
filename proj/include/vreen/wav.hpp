// vreen/wav.hpp

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

#ifndef VREEN_WAV_HPP_
#define VREEN_WAV_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vreen/common.hpp"
#include "vreen/types.hpp"

namespace vreen {

struct WavData {
  Vec samples;  // mono, [-1, 1]
  double sample_rate = 0;
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::vector<unsigned char>& v, std::uint32_t x) {
  v.push_back(x & 0xff);
  v.push_back((x >> 8) & 0xff);
  v.push_back((x >> 16) & 0xff);
  v.push_back((x >> 24) & 0xff);
}

inline void put_u16(std::vector<unsigned char>& v, std::uint16_t x) {
  v.push_back(x & 0xff);
  v.push_back((x >> 8) & 0xff);
}

}  // namespace detail

// Reads a RIFF/WAVE file with 16-bit PCM samples.  Multi-channel input is
// averaged down to mono.
inline WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open wav file: " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  require(data.size() >= 44, Errc::invalid_input, "wav too short: " + path);
  require(std::memcmp(data.data(), "RIFF", 4) == 0 &&
              std::memcmp(data.data() + 8, "WAVE", 4) == 0,
          Errc::invalid_input, "not a RIFF/WAVE file: " + path);

  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* pcm = nullptr;
  std::uint32_t pcm_len = 0;

  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = reinterpret_cast<const char*>(data.data() + pos);
    const std::uint32_t len = detail::read_u32(data.data() + pos + 4);
    if (std::memcmp(id, "fmt ", 4) == 0 && pos + 8 + 16 <= data.size()) {
      const unsigned char* f = data.data() + pos + 8;
      const std::uint16_t format = detail::read_u16(f);
      require(format == 1, Errc::invalid_input,
              "only PCM wav supported: " + path);
      channels = detail::read_u16(f + 2);
      rate = detail::read_u32(f + 4);
      bits = detail::read_u16(f + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      pcm = data.data() + pos + 8;
      pcm_len = std::min<std::uint32_t>(
          len, static_cast<std::uint32_t>(data.size() - pos - 8));
    }
    pos += 8 + len + (len & 1);
  }
  require(pcm != nullptr && channels > 0, Errc::invalid_input,
          "wav missing fmt/data chunk: " + path);
  require(bits == 16, Errc::invalid_input, "only 16-bit PCM supported: " + path);

  const long frames = pcm_len / (2 * channels);
  WavData wav;
  wav.sample_rate = rate;
  wav.samples = Vec::Zero(frames);
  for (long i = 0; i < frames; ++i) {
    double acc = 0;
    for (int c = 0; c < channels; ++c) {
      const unsigned char* p = pcm + (i * channels + c) * 2;
      const std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      acc += s / 32768.0;
    }
    wav.samples[i] = acc / channels;
  }
  return wav;
}

// Writes mono 16-bit PCM; samples are clipped to [-1, 1].
inline void write_wav(const std::string& path, const Vec& samples, int rate) {
  std::vector<unsigned char> out;
  const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 2);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);   // PCM
  detail::put_u16(out, 1);   // mono
  detail::put_u32(out, rate);
  detail::put_u32(out, rate * 2);
  detail::put_u16(out, 2);
  detail::put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_u32(out, data_len);
  for (long i = 0; i < samples.size(); ++i) {
    double v = std::max(-1.0, std::min(1.0, samples[i]));
    const std::int16_t s = static_cast<std::int16_t>(std::lround(v * 32767.0));
    detail::put_u16(out, static_cast<std::uint16_t>(s));
  }
  std::ofstream f(path, std::ios::binary);
  require(f.good(), Errc::io, "cannot write wav file: " + path);
  f.write(reinterpret_cast<const char*>(out.data()), out.size());
}

}  // namespace vreen

#endif  // VREEN_WAV_HPP_
