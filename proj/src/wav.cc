// asrlab/wav.cc

// Copyright 2026  asrlab authors

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

#include "asrlab/wav.hh"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "asrlab/common.hh"

namespace asrlab {

namespace {

void PutU32(std::vector<unsigned char> &buf, uint32_t v) {
  buf.push_back(v & 0xff);
  buf.push_back((v >> 8) & 0xff);
  buf.push_back((v >> 16) & 0xff);
  buf.push_back((v >> 24) & 0xff);
}

void PutU16(std::vector<unsigned char> &buf, uint16_t v) {
  buf.push_back(v & 0xff);
  buf.push_back((v >> 8) & 0xff);
}

uint32_t GetU32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t GetU16(const unsigned char *p) {
  return static_cast<uint16_t>(p[0]) | (static_cast<uint16_t>(p[1]) << 8);
}

}  // namespace

void WriteWav(const std::string &path, const Waveform &w) {
  Require(w.sample_rate > 0, "WriteWav: sample_rate must be positive");
  const uint32_t n = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_bytes = n * 2;
  std::vector<unsigned char> buf;
  buf.reserve(44 + data_bytes);
  buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
  PutU32(buf, 36 + data_bytes);
  buf.insert(buf.end(), {'W', 'A', 'V', 'E'});
  buf.insert(buf.end(), {'f', 'm', 't', ' '});
  PutU32(buf, 16);
  PutU16(buf, 1);  // PCM
  PutU16(buf, 1);  // mono
  PutU32(buf, static_cast<uint32_t>(w.sample_rate));
  PutU32(buf, static_cast<uint32_t>(w.sample_rate) * 2);
  PutU16(buf, 2);
  PutU16(buf, 16);
  buf.insert(buf.end(), {'d', 'a', 't', 'a'});
  PutU32(buf, data_bytes);
  for (double x : w.samples) {
    double scaled = std::llround(std::clamp(x, -1.0, 1.0) * 32767.0);
    int16_t s = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    PutU16(buf, static_cast<uint16_t>(s));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out.write(reinterpret_cast<const char *>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw InputError("write failed for " + path);
}

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw InputError("not a RIFF/WAVE file: " + path);

  Waveform w;
  size_t pos = 12;
  bool have_fmt = false, have_data = false;
  uint16_t channels = 0, bits = 0;
  while (pos + 8 <= buf.size()) {
    const char *id = reinterpret_cast<const char *>(buf.data() + pos);
    uint32_t size = GetU32(buf.data() + pos + 4);
    size_t body = pos + 8;
    if (body + size > buf.size()) throw InputError("truncated chunk in " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw InputError("bad fmt chunk in " + path);
      uint16_t format = GetU16(buf.data() + body);
      channels = GetU16(buf.data() + body + 2);
      w.sample_rate = static_cast<int>(GetU32(buf.data() + body + 4));
      bits = GetU16(buf.data() + body + 14);
      if (format != 1) throw InputError("only PCM supported: " + path);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw InputError("data before fmt in " + path);
      if (channels != 1 || bits != 16)
        throw InputError("expected 16-bit mono PCM: " + path);
      size_t count = size / 2;
      w.samples.resize(count);
      for (size_t i = 0; i < count; ++i) {
        int16_t s = static_cast<int16_t>(GetU16(buf.data() + body + 2 * i));
        w.samples[i] = static_cast<double>(s) / 32767.0;
      }
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_data) throw InputError("no data chunk in " + path);
  return w;
}

double MeanPower(const std::vector<double> &samples, size_t begin, size_t end) {
  Require(begin <= end && end <= samples.size(), "MeanPower: bad range");
  if (begin == end) return 0.0;
  double acc = 0.0;
  for (size_t i = begin; i < end; ++i) acc += samples[i] * samples[i];
  return acc / static_cast<double>(end - begin);
}

}  // namespace asrlab
