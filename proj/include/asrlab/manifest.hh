// asrlab/manifest.hh

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

#ifndef ASRLAB_MANIFEST_HH_
#define ASRLAB_MANIFEST_HH_

#include <string>
#include <vector>

namespace asrlab {

inline constexpr const char *kSplitTranscribed = "transcribed-train";
inline constexpr const char *kSplitUntranscribed = "untranscribed-train";
inline constexpr const char *kSplitDev = "dev";
inline constexpr const char *kSplitEval = "eval";

// One corpus utterance.  Augmented copies keep the source audio/alignment
// paths and carry the transform in the id suffix ("id#transform-copyindex").
struct ManifestEntry {
  std::string id;
  std::string audio_path;
  std::string transcript;  // space-separated words; empty for non-speech/untranscribed
  std::string alignment_path;
  std::string split;

  std::vector<std::string> Words() const;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  uint64_t seed = 0;
  std::string config_digest;

  std::vector<ManifestEntry> Split(const std::string &split) const;
  // Throws InputError on duplicate ids.
  void CheckIdsUnique() const;
};

// Line format: id \t audio \t transcript \t alignment \t split.  The header
// line carries the seed and generator config digest.
void WriteManifest(const std::string &path, const CorpusManifest &manifest);
CorpusManifest ReadManifest(const std::string &path);

// Alignment files: one integer state id per line, one line per frame.
void WriteAlignment(const std::string &path, const std::vector<int> &states);
std::vector<int> ReadAlignment(const std::string &path);

}  // namespace asrlab

#endif  // ASRLAB_MANIFEST_HH_
