// asrlab/features.cc

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

#include "asrlab/features.hh"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "asrlab/common.hh"

namespace asrlab {

namespace {
constexpr uint32_t kFeatureMagic = 0x414c4645;  // "ALFE"
constexpr uint32_t kFeatureVersion = 1;
}  // namespace

void WriteFeatureArchive(const std::string &path, const FeatureSequence &f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  auto put_u32 = [&](uint32_t v) {
    out.write(reinterpret_cast<const char *>(&v), 4);
  };
  auto put_f32 = [&](float v) {
    out.write(reinterpret_cast<const char *>(&v), 4);
  };
  put_u32(kFeatureMagic);
  put_u32(kFeatureVersion);
  put_u32(static_cast<uint32_t>(f.NumFrames()));
  put_u32(static_cast<uint32_t>(f.Dim()));
  put_f32(static_cast<float>(f.frame_shift_ms));
  put_f32(static_cast<float>(f.frame_length_ms));
  std::vector<float> row(f.Dim());
  for (int t = 0; t < f.NumFrames(); ++t) {
    for (int d = 0; d < f.Dim(); ++d) row[d] = static_cast<float>(f.frames(t, d));
    out.write(reinterpret_cast<const char *>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw InputError("write failed for " + path);
}

FeatureSequence ReadFeatureArchive(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  auto get_u32 = [&]() {
    uint32_t v = 0;
    in.read(reinterpret_cast<char *>(&v), 4);
    return v;
  };
  auto get_f32 = [&]() {
    float v = 0;
    in.read(reinterpret_cast<char *>(&v), 4);
    return v;
  };
  if (get_u32() != kFeatureMagic) throw InputError("bad feature magic: " + path);
  if (get_u32() != kFeatureVersion)
    throw InputError("unsupported feature version: " + path);
  uint32_t rows = get_u32(), cols = get_u32();
  FeatureSequence f;
  f.frame_shift_ms = get_f32();
  f.frame_length_ms = get_f32();
  f.frames.resize(rows, cols);
  std::vector<float> row(cols);
  for (uint32_t t = 0; t < rows; ++t) {
    in.read(reinterpret_cast<char *>(row.data()),
            static_cast<std::streamsize>(cols * sizeof(float)));
    if (!in) throw InputError("truncated feature archive: " + path);
    for (uint32_t d = 0; d < cols; ++d) f.frames(t, d) = row[d];
  }
  return f;
}

void QuantizeToFloat(Mat *m) {
  for (int r = 0; r < m->rows(); ++r)
    for (int c = 0; c < m->cols(); ++c)
      (*m)(r, c) = static_cast<double>(static_cast<float>((*m)(r, c)));
}

}  // namespace asrlab
