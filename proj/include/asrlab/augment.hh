// asrlab/augment.hh

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

#ifndef ASRLAB_AUGMENT_HH_
#define ASRLAB_AUGMENT_HH_

#include <string>
#include <vector>

#include "asrlab/manifest.hh"
#include "asrlab/wav.hh"

namespace asrlab {

inline constexpr const char *kTransformSpeed = "speed";
inline constexpr const char *kTransformVolume = "volume";
inline constexpr const char *kTransformPitch = "pitch";
inline constexpr const char *kTransformVtlp = "vtlp";
inline constexpr const char *kTransformNoise = "noise";

// Band-limited windowed-sinc resampling interpreted at the original rate;
// factor 0.9 lengthens the audio and lowers pitch.  Factor 1.0 is bit-exact.
Waveform SpeedPerturb(const Waveform &w, double factor);

// Scales samples by gain and hard-clips to [-1, 1].
Waveform VolumePerturb(const Waveform &w, double gain);

enum class NoiseMode { kForeground, kBackground };

// Mixes noise at the requested SNR over the mixed region.  Background tiles
// the noise over the whole signal; foreground inserts a chunk covering at
// most half the duration at a seeded random position.
Waveform MixNoise(const Waveform &w, const Waveform &noise, double snr_db,
                  NoiseMode mode, uint64_t seed);

// One term of an augmentation scheme, e.g. ("speed", 3) for "3x SP".
struct AugmentationTerm {
  std::string transform;
  int multiplicity = 1;
};

struct AugmentationSpec {
  std::vector<AugmentationTerm> terms;

  // Accepts the table shorthand ("2x Pit. 3x Vol. 2x VTLP 2x Noise 3x SP")
  // as well as lowercase names.  Empty text parses to an empty spec.
  static AugmentationSpec Parse(const std::string &text);
  int Fold() const;  // sum of multiplicities; 1 for the empty spec
  bool RequestsNoise() const;
  std::string ToString() const;
};

// Parameters of one augmented copy, derived deterministically from
// (seed, source id, transform, copy index).  Copy 0 of every transform is
// the identity convention copy.
struct AugParams {
  std::string transform;
  int copy_index = 0;
  double factor = 1.0;   // speed factor, volume gain, pitch beta, vtlp alpha
  double snr_db = 0.0;
  int noise_index = -1;
  NoiseMode noise_mode = NoiseMode::kBackground;
  bool identity = true;
};

AugParams DeriveAugParams(uint64_t aug_seed, const std::string &source_id,
                          const std::string &transform, int copy_index,
                          int noise_pool_size);

struct AugmentedId {
  std::string source;
  std::string transform;
  int copy_index = 0;
  bool augmented = false;
};

// "utt000012#noise-1" -> {source, transform, copy}.  Plain ids pass through.
AugmentedId ParseAugmentedId(const std::string &id);

// Expands every entry into sum-of-multiplicities copies with suffixed ids.
// Audio/alignment paths keep pointing at the source; the feature loader
// re-derives the transform parameters.  Noise terms with an empty pool are
// a configuration error.
std::vector<ManifestEntry> ApplyAugmentation(
    const std::vector<ManifestEntry> &entries, const AugmentationSpec &spec,
    int noise_pool_size, uint64_t seed);

// Nearest-index remapping of a per-frame alignment onto a new frame count
// (uniform time stretch, as produced by speed perturbation).
std::vector<int> ResampleAlignment(const std::vector<int> &src, int new_frames);

}  // namespace asrlab

#endif  // ASRLAB_AUGMENT_HH_
