// asrlab/wav.hh

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

#ifndef ASRLAB_WAV_HH_
#define ASRLAB_WAV_HH_

#include <string>
#include <vector>

namespace asrlab {

// Mono audio in [-1, 1].  All corpus audio is 16 kHz.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  int NumSamples() const { return static_cast<int>(samples.size()); }
  double DurationSeconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// 16-bit little-endian mono PCM in a RIFF container.  Values are rounded
// symmetrically and clipped at the int16 range on write.
void WriteWav(const std::string &path, const Waveform &w);
Waveform ReadWav(const std::string &path);

// Mean square of a sample range [begin, end).
double MeanPower(const std::vector<double> &samples, size_t begin, size_t end);

}  // namespace asrlab

#endif  // ASRLAB_WAV_HH_
