// asrlab/corpus.hh

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

#ifndef ASRLAB_CORPUS_HH_
#define ASRLAB_CORPUS_HH_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "asrlab/manifest.hh"
#include "asrlab/state-inventory.hh"
#include "asrlab/wav.hh"

namespace asrlab {

// Non-speech is deliberately not just silence: hesitation hums and babble
// noise carry energy comparable to quiet speech.
inline constexpr int kNsSilence = 0;
inline constexpr int kNsHesitation = 1;
inline constexpr int kNsBabble = 2;
inline constexpr int kNumNonspeechStates = 3;
inline constexpr int kStatesPerPhone = 3;

struct PhoneSpec {
  std::string phone_id;
  std::vector<std::pair<double, double>> formants;  // (frequency Hz, amplitude)
  double noise_floor = 0.0;                         // amplitude in [0,1]
  int mean_duration = 8;                            // frames
  int duration_jitter = 3;                          // frames

  void Validate(int sample_rate) const;
};

struct CorpusConfig {
  int sample_rate = 16000;
  int num_phones = 8;
  int vocab_size = 24;
  int transcribed_count = 120;
  int untranscribed_count = 60;
  int dev_count = 30;
  int eval_count = 30;
  double nonspeech_fraction = 0.146;  // of transcribed-train utterances
  double target_ns_ratio = 2.2;       // non-speech : speech total frames
  int min_words = 2;
  int max_words = 5;
  int num_speakers = 12;
  double amp_lo = 0.25;
  double amp_hi = 0.90;
  double ambient_lo = 0.004;   // per-utterance ambient noise amplitude
  double ambient_hi = 0.030;
  int ns_utt_min_frames = 150;  // pure non-speech utterance length range
  int ns_utt_max_frames = 500;
  int min_gap_frames = 3;       // minimum non-speech slot around/between words
  int written_sentences = 150;  // extra text-only sentences for LM training

  std::string Serialize() const;
  std::string Digest() const;
};

// Phone inventory, vocabulary, word pronunciations and a seed-derived bigram
// word grammar.  Everything downstream (lexicon, state inventory) hangs off
// this.
struct ToyLanguage {
  std::vector<PhoneSpec> phones;
  std::vector<std::string> words;
  std::vector<std::vector<int>> word_phones;
  std::vector<std::vector<double>> bigram;  // [prev+1][next]; row 0 = sentence start
  StateInventory inventory;

  int WordId(const std::string &word) const;  // throws InputError if unknown
  // First of the three consecutive state ids of phone `p`.
  int PhoneStateBase(int phone) const {
    return kNumNonspeechStates + kStatesPerPhone * phone;
  }
};

ToyLanguage BuildToyLanguage(const CorpusConfig &config, uint64_t seed);

struct SyntheticUtterance {
  std::string utterance_id;
  Waveform waveform;
  std::vector<std::string> transcript;
  std::vector<int> true_alignment;
  std::string speaker_id;
};

// Renders one utterance with default non-speech gaps around and between
// words.  Deterministic in (words, language, seed).
SyntheticUtterance SynthUtterance(const std::vector<std::string> &words,
                                  const ToyLanguage &language, uint64_t seed);

struct ClassStats {
  int64_t total_frames = 0;
  double mean_frames = 0.0;
  double std_frames = 0.0;  // population std over per-utterance counts
};

struct StateDurationStats {
  ClassStats nonspeech;
  ClassStats speech;
  int num_utterances = 0;

  double Ratio() const {
    return speech.total_frames > 0
               ? static_cast<double>(nonspeech.total_frames) /
                     static_cast<double>(speech.total_frames)
               : 0.0;
  }
};

// Reads every entry's alignment file; throws InputError if one is missing.
StateDurationStats ComputeCorpusStats(const std::vector<ManifestEntry> &entries);
StateDurationStats ComputeCorpusStats(
    const std::vector<std::vector<int>> &alignments,
    const StateInventory &inventory);

// Removes empty-transcript entries from the transcribed-train split and
// returns them as the noise-source pool.  Other splits pass through.
std::pair<CorpusManifest, std::vector<ManifestEntry>> SplitNonspeechUtterances(
    const CorpusManifest &manifest);

struct GeneratedCorpus {
  CorpusManifest manifest;
  ToyLanguage language;
  std::vector<std::string> written_text;  // LM-only sentences
};

// Generates the corpus under out_dir (wav/, ali/, manifest.tsv, written.txt,
// lexicon.txt, inventory.txt).  Pure function of (config, seed); re-running
// produces byte-identical files.
GeneratedCorpus GenerateCorpus(const CorpusConfig &config, uint64_t seed,
                               const std::string &out_dir, int jobs = 1);

void WriteLexiconFile(const std::string &path, const ToyLanguage &language);

}  // namespace asrlab

#endif  // ASRLAB_CORPUS_HH_
