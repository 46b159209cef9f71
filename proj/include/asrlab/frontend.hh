// asrlab/frontend.hh

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

#ifndef ASRLAB_FRONTEND_HH_
#define ASRLAB_FRONTEND_HH_

#include <vector>

#include "asrlab/features.hh"
#include "asrlab/matrix.hh"
#include "asrlab/wav.hh"

namespace asrlab {

struct FrontendConfig {
  int sample_rate = 16000;
  int window_samples = 400;  // 25 ms
  int shift_samples = 160;   // 10 ms
  int fft_size = 512;
  int num_mels = 80;
  double fmin_hz = 20.0;
  double log_floor = 1e-10;
  double vtlp_knee_hz = 4800.0;  // 0.6 x Nyquist
};

// T = 1 + floor((N - window)/shift); throws InputError if N < window.
int NumFramesForSamples(int num_samples, const FrontendConfig &config);

double MelScale(double hz);
double MelInverse(double mel);

// Center frequency (Hz) of mel filter k under the default (unwarped) bank.
std::vector<double> MelCenterFrequencies(const FrontendConfig &config);

// 80-dim log-mel energies: Hamming window, magnitude spectrum, triangular
// mel filters over [fmin, Nyquist], natural log with floor.
Mat ExtractLogMel(const Waveform &w, const FrontendConfig &config);

// Same pipeline with the mel-filter breakpoints mapped through a
// piecewise-linear warp: slope alpha below the knee, endpoint-matched above.
Mat VtlpWarp(const Waveform &w, const FrontendConfig &config, double alpha);

// Same pipeline with the per-frame linear-frequency magnitude axis rescaled
// by beta before mel binning; duration and frame count unchanged.
Mat PitchWarp(const Waveform &w, const FrontendConfig &config, double beta);

// out(t) = concat(x_t, x_{t+1}); last row repeats itself.  Input must be
// 80-dim (contract error otherwise).
Mat PairFrames(const Mat &feats);

// Subtracts the per-utterance mean of every column.
void MeanNormalizeColumns(Mat *feats);

struct ChunkSpec {
  int core_length = 300;
  int context_length = 10;
};

// Core [core_begin, core_end) carries training loss; the surrounding context
// [left_begin, core_begin) and [core_end, right_end) only warms the
// recurrent state.
struct Chunk {
  int left_begin = 0;
  int core_begin = 0;
  int core_end = 0;
  int right_end = 0;

  int TotalFrames() const { return right_end - left_begin; }
  int CoreOffset() const { return core_begin - left_begin; }
  int CoreFrames() const { return core_end - core_begin; }
};

// Cores tile [0, total_frames) without overlap; contexts clip at boundaries.
std::vector<Chunk> ChunkSequence(int total_frames, const ChunkSpec &spec);

}  // namespace asrlab

#endif  // ASRLAB_FRONTEND_HH_
