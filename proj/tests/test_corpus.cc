// asrlab/tests/test_corpus.cc

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

#include "asrlab/corpus.hh"

#include <cmath>
#include <set>

#include "asrlab/common.hh"
#include "asrlab/frontend.hh"
#include "doctest.h"
#include "test_util.hh"

using namespace asrlab;

namespace {

CorpusConfig SmallConfig() {
  CorpusConfig c;
  c.transcribed_count = 100;
  c.untranscribed_count = 8;
  c.dev_count = 6;
  c.eval_count = 6;
  c.written_sentences = 20;
  return c;
}

}  // namespace

TEST_CASE("generate_corpus: split counts and non-speech fraction") {
  test::TempDir dir("corpus-counts");
  CorpusConfig cfg = SmallConfig();
  auto gen = GenerateCorpus(cfg, 7, dir.Path());
  auto transcribed = gen.manifest.Split(kSplitTranscribed);
  CHECK(transcribed.size() == 100);
  int empty = 0;
  for (const auto &e : transcribed)
    if (e.transcript.empty()) ++empty;
  CHECK(empty == 15);  // round(0.146 * 100)
  CHECK(gen.manifest.Split(kSplitUntranscribed).size() == 8);
  CHECK(gen.manifest.Split(kSplitDev).size() == 6);
  CHECK(gen.manifest.Split(kSplitEval).size() == 6);
}

TEST_CASE("generate_corpus: deterministic for fixed config and seed") {
  test::TempDir dir_a("corpus-det-a"), dir_b("corpus-det-b");
  CorpusConfig cfg = SmallConfig();
  cfg.transcribed_count = 12;
  cfg.untranscribed_count = 0;
  cfg.dev_count = 0;
  cfg.eval_count = 0;
  auto a = GenerateCorpus(cfg, 11, dir_a.Path());
  auto b = GenerateCorpus(cfg, 11, dir_b.Path());
  REQUIRE(a.manifest.entries.size() == b.manifest.entries.size());
  for (size_t i = 0; i < a.manifest.entries.size(); ++i) {
    CHECK(a.manifest.entries[i].id == b.manifest.entries[i].id);
    CHECK(a.manifest.entries[i].transcript == b.manifest.entries[i].transcript);
    CHECK(ReadTextFile(a.manifest.entries[i].audio_path) ==
          ReadTextFile(b.manifest.entries[i].audio_path));
    CHECK(ReadTextFile(a.manifest.entries[i].alignment_path) ==
          ReadTextFile(b.manifest.entries[i].alignment_path));
  }
}

TEST_CASE("generate_corpus: hits the target class ratio within 10 percent") {
  test::TempDir dir("corpus-ratio");
  CorpusConfig cfg = SmallConfig();
  cfg.target_ns_ratio = 2.2;
  auto gen = GenerateCorpus(cfg, 3, dir.Path());
  auto stats = ComputeCorpusStats(gen.manifest.Split(kSplitTranscribed));
  CHECK(stats.Ratio() == doctest::Approx(2.2).epsilon(0.10));
}

TEST_CASE("generate_corpus: configuration errors") {
  test::TempDir dir("corpus-err");
  CorpusConfig cfg = SmallConfig();
  cfg.target_ns_ratio = -1.0;
  CHECK_THROWS_AS(GenerateCorpus(cfg, 1, dir.Path()), ConfigError);
  cfg = SmallConfig();
  cfg.vocab_size = 10;  // below the 20-word contract
  CHECK_THROWS_AS(GenerateCorpus(cfg, 1, dir.Path()), ConfigError);
  cfg = SmallConfig();
  cfg.num_phones = 4;
  CHECK_THROWS_AS(GenerateCorpus(cfg, 1, dir.Path()), ConfigError);
}

TEST_CASE("synth_utterance: empty transcript yields pure non-speech") {
  CorpusConfig cfg;
  auto lang = BuildToyLanguage(cfg, 5);
  auto utt = SynthUtterance({}, lang, 42);
  CHECK(!utt.true_alignment.empty());
  for (int s : utt.true_alignment) CHECK(s < kNumNonspeechStates);
  CHECK(utt.transcript.empty());
}

TEST_CASE("synth_utterance: states visit three per phone, left to right") {
  CorpusConfig cfg;
  auto lang = BuildToyLanguage(cfg, 5);
  // find a two-phone word
  int wid = -1;
  for (size_t w = 0; w < lang.word_phones.size(); ++w)
    if (lang.word_phones[w].size() == 2) { wid = static_cast<int>(w); break; }
  REQUIRE(wid >= 0);
  auto utt = SynthUtterance({lang.words[wid]}, lang, 9);
  std::vector<int> speech_states;
  for (int s : utt.true_alignment)
    if (s >= kNumNonspeechStates &&
        (speech_states.empty() || speech_states.back() != s))
      speech_states.push_back(s);
  std::vector<int> expected;
  for (int p : lang.word_phones[wid])
    for (int k = 0; k < kStatesPerPhone; ++k)
      expected.push_back(lang.PhoneStateBase(p) + k);
  CHECK(speech_states == expected);
  CHECK(speech_states.size() == 6);
}

TEST_CASE("synth_utterance: deterministic waveform") {
  CorpusConfig cfg;
  auto lang = BuildToyLanguage(cfg, 5);
  auto a = SynthUtterance({lang.words[0], lang.words[3]}, lang, 11);
  auto b = SynthUtterance({lang.words[0], lang.words[3]}, lang, 11);
  CHECK(a.waveform.samples == b.waveform.samples);
  CHECK(a.true_alignment == b.true_alignment);
  CHECK_THROWS_AS(SynthUtterance({"no-such-word"}, lang, 1), InputError);
}

TEST_CASE("corpus_stats: constant per-utterance counts have zero std") {
  StateInventory inv(3, 24);
  std::vector<std::vector<int>> alignments;
  for (int u = 0; u < 4; ++u) {
    std::vector<int> a;
    a.insert(a.end(), 800, 0);  // non-speech
    a.insert(a.end(), 400, 5);  // speech
    alignments.push_back(a);
  }
  auto stats = ComputeCorpusStats(alignments, inv);
  CHECK(stats.nonspeech.mean_frames == doctest::Approx(800.0));
  CHECK(stats.speech.mean_frames == doctest::Approx(400.0));
  CHECK(stats.nonspeech.std_frames == doctest::Approx(0.0));
  CHECK(stats.speech.std_frames == doctest::Approx(0.0));
  CHECK(stats.nonspeech.total_frames == 3200);
  CHECK(stats.speech.total_frames == 1600);
}

TEST_CASE("corpus_stats: population std matches one-pass oracle") {
  StateInventory inv(3, 24);
  std::vector<std::vector<int>> alignments;
  const int counts[3] = {100, 200, 300};
  for (int c : counts) alignments.push_back(std::vector<int>(c, 7));
  auto stats = ComputeCorpusStats(alignments, inv);

  // independent one-pass sum / sum-of-squares recomputation
  double sum = 0, sumsq = 0;
  for (int c : counts) { sum += c; sumsq += static_cast<double>(c) * c; }
  double mean = sum / 3.0;
  double oracle_std = std::sqrt(sumsq / 3.0 - mean * mean);

  CHECK(stats.speech.mean_frames == doctest::Approx(200.0));
  CHECK(stats.speech.std_frames == doctest::Approx(oracle_std).epsilon(1e-12));
  CHECK(stats.speech.std_frames == doctest::Approx(81.6497).epsilon(1e-4));
}

TEST_CASE("split_nonspeech_utterances: partition of the transcribed split") {
  test::TempDir dir("corpus-split");
  CorpusConfig cfg = SmallConfig();
  cfg.transcribed_count = 40;
  auto gen = GenerateCorpus(cfg, 21, dir.Path());
  auto [cleaned, pool] = SplitNonspeechUtterances(gen.manifest);

  int expected_pool = 0;
  for (const auto &e : gen.manifest.Split(kSplitTranscribed))
    if (e.transcript.empty()) ++expected_pool;
  CHECK(static_cast<int>(pool.size()) == expected_pool);
  CHECK(cleaned.entries.size() + pool.size() == gen.manifest.entries.size());

  std::set<std::string> cleaned_ids, pool_ids;
  for (const auto &e : cleaned.entries) cleaned_ids.insert(e.id);
  for (const auto &e : pool) {
    CHECK(e.split == kSplitTranscribed);
    CHECK(e.transcript.empty());
    pool_ids.insert(e.id);
  }
  for (const auto &id : pool_ids) CHECK(cleaned_ids.count(id) == 0);

  // idempotent on a manifest without empty transcribed transcripts
  auto [cleaned2, pool2] = SplitNonspeechUtterances(cleaned);
  CHECK(pool2.empty());
  CHECK(cleaned2.entries.size() == cleaned.entries.size());
}

TEST_CASE("alignment length equals frontend frame count") {
  test::TempDir dir("corpus-frames");
  CorpusConfig cfg = SmallConfig();
  cfg.transcribed_count = 10;
  cfg.untranscribed_count = 0;
  cfg.dev_count = 2;
  cfg.eval_count = 0;
  auto gen = GenerateCorpus(cfg, 13, dir.Path());
  FrontendConfig fe;
  for (const auto &e : gen.manifest.entries) {
    auto w = ReadWav(e.audio_path);
    auto ali = ReadAlignment(e.alignment_path);
    CHECK(static_cast<int>(ali.size()) ==
          NumFramesForSamples(w.NumSamples(), fe));
    for (int s : ali) CHECK(gen.language.inventory.IsValid(s));
  }
}
