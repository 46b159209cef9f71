// asrlab/features.hh

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

#ifndef ASRLAB_FEATURES_HH_
#define ASRLAB_FEATURES_HH_

#include <string>

#include "asrlab/matrix.hh"

namespace asrlab {

struct FeatureSequence {
  Mat frames;  // T x D
  double frame_shift_ms = 10.0;
  double frame_length_ms = 25.0;

  int NumFrames() const { return static_cast<int>(frames.rows()); }
  int Dim() const { return static_cast<int>(frames.cols()); }
};

// One file per utterance: header (magic, version, T, D, frame_shift,
// frame_length) followed by row-major little-endian 32-bit floats.
void WriteFeatureArchive(const std::string &path, const FeatureSequence &f);
FeatureSequence ReadFeatureArchive(const std::string &path);

// Rounds every entry through float32 so in-memory features match what an
// archive round-trip would produce.
void QuantizeToFloat(Mat *m);

}  // namespace asrlab

#endif  // ASRLAB_FEATURES_HH_
