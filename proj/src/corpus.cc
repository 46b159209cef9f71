// asrlab/corpus.cc

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

namespace asrlab {

namespace {

constexpr int kFrameShiftSamples = 160;  // 10 ms at 16 kHz
constexpr int kFrameWindowSamples = 400; // 25 ms at 16 kHz
constexpr double kTwoPi = 6.283185307179586476925286766559;

// A waveform of T frames must yield exactly T frontend frames:
// N = shift*T + (window - shift)  =>  1 + floor((N - window)/shift) = T.
int SamplesForFrames(int frames) {
  return kFrameShiftSamples * frames + (kFrameWindowSamples - kFrameShiftSamples);
}

struct Segment {
  bool is_phone = false;
  int phone = -1;                 // phone index when is_phone
  int state_frames[3] = {0, 0, 0};
  int ns_type = kNsSilence;       // when !is_phone
  int frames = 0;
  // render parameters drawn once per segment
  double amp = 0.0;
  double freq_jitter = 1.0;
  double hum_freq = 180.0;
  std::vector<double> babble_freqs;
};

struct UtterancePlan {
  std::string id;
  std::string speaker;
  std::string split;
  std::vector<int> word_ids;              // empty for pure non-speech
  std::vector<std::vector<int>> phone_durations;  // per word, per phone (frames)
  std::vector<int> gaps;                  // word_ids.size()+1, or {length} if pure
  double amp = 0.6;
  double ambient = 0.01;
  double speaker_warp = 1.0;
  uint64_t render_seed = 0;
};

std::vector<PhoneSpec> BasePhoneTable() {
  return {
      {"a", {{730, 0.30}, {1090, 0.25}, {2440, 0.08}}, 0.004, 10, 4},
      {"i", {{270, 0.30}, {2290, 0.20}, {3010, 0.08}}, 0.004, 9, 3},
      {"o", {{570, 0.30}, {840, 0.25}, {2410, 0.06}}, 0.004, 10, 4},
      {"u", {{300, 0.30}, {870, 0.22}, {2240, 0.06}}, 0.004, 9, 3},
      {"k", {{400, 0.12}, {1800, 0.18}, {2600, 0.10}}, 0.030, 5, 2},
      {"t", {{450, 0.10}, {3200, 0.20}, {4000, 0.10}}, 0.040, 5, 2},
      {"s", {{4500, 0.18}, {6000, 0.15}}, 0.060, 6, 2},
      {"m", {{250, 0.28}, {1200, 0.10}, {2100, 0.05}}, 0.004, 8, 3},
  };
}

bool IsVowelIndex(int phone) { return phone < 4; }

int SampleCategorical(Rng &rng, const std::vector<double> &weights) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.Uniform(0.0, total);
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::vector<int> SampleWordSequence(const ToyLanguage &lang, Rng &rng,
                                    int min_words, int max_words) {
  int len = rng.UniformInt(min_words, max_words);
  std::vector<int> words;
  int prev = -1;
  for (int i = 0; i < len; ++i) {
    int w = SampleCategorical(rng, lang.bigram[prev + 1]);
    words.push_back(w);
    prev = w;
  }
  return words;
}

void SplitPhoneDuration(int total, int out[3]) {
  // left-to-right thirds; middle state absorbs the remainder
  out[0] = std::max(1, total / 3);
  out[2] = std::max(1, total / 3);
  out[1] = std::max(1, total - out[0] - out[2]);
}

std::vector<Segment> MakeGapSegments(int frames, Rng &rng) {
  std::vector<Segment> segs;
  int remaining = frames;
  while (remaining > 0) {
    Segment s;
    s.is_phone = false;
    s.ns_type = SampleCategorical(rng, {0.55, 0.20, 0.25});
    int len = (remaining <= 6) ? remaining
                               : std::min(remaining, rng.UniformInt(4, 40));
    if (remaining - len > 0 && remaining - len < 4) len = remaining;
    s.frames = len;
    switch (s.ns_type) {
      case kNsSilence:
        s.amp = rng.Uniform(0.003, 0.010);
        break;
      case kNsHesitation:
        s.amp = rng.Uniform(0.06, 0.18);
        s.hum_freq = rng.Uniform(150.0, 230.0);
        break;
      case kNsBabble:
        s.amp = rng.Uniform(0.05, 0.25);
        for (int i = 0; i < 4; ++i)
          s.babble_freqs.push_back(rng.Uniform(300.0, 2500.0));
        break;
      default:
        break;
    }
    segs.push_back(std::move(s));
    remaining -= len;
  }
  return segs;
}

std::vector<Segment> BuildSegments(const UtterancePlan &plan,
                                   const ToyLanguage &lang, Rng &rng) {
  std::vector<Segment> segs;
  if (plan.word_ids.empty()) {
    auto gap = MakeGapSegments(plan.gaps.at(0), rng);
    segs.insert(segs.end(), gap.begin(), gap.end());
    return segs;
  }
  Require(plan.gaps.size() == plan.word_ids.size() + 1,
          "plan gaps must bracket every word");
  for (size_t w = 0; w < plan.word_ids.size(); ++w) {
    auto gap = MakeGapSegments(plan.gaps[w], rng);
    segs.insert(segs.end(), gap.begin(), gap.end());
    const auto &phones = lang.word_phones.at(plan.word_ids[w]);
    for (size_t p = 0; p < phones.size(); ++p) {
      Segment s;
      s.is_phone = true;
      s.phone = phones[p];
      int dur = plan.phone_durations.at(w).at(p);
      SplitPhoneDuration(dur, s.state_frames);
      s.frames = s.state_frames[0] + s.state_frames[1] + s.state_frames[2];
      s.amp = plan.amp * rng.Uniform(0.85, 1.15);
      s.freq_jitter = rng.Uniform(0.98, 1.02);
      segs.push_back(std::move(s));
    }
  }
  auto gap = MakeGapSegments(plan.gaps.back(), rng);
  segs.insert(segs.end(), gap.begin(), gap.end());
  return segs;
}

void RenderSegment(const Segment &seg, const PhoneSpec *spec,
                   double speaker_warp, int sample_rate, Rng &rng,
                   std::vector<double> *out, size_t begin, size_t end) {
  const double dt = 1.0 / sample_rate;
  const size_t n = end - begin;
  if (seg.is_phone) {
    // formant glide from 0.96x to 1.04x across the phone gives the three
    // HMM states a temporal signature
    std::vector<double> phases(spec->formants.size(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      double tau = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
      double glide = 0.96 + 0.08 * tau;
      double v = 0.0;
      for (size_t f = 0; f < spec->formants.size(); ++f) {
        double freq = spec->formants[f].first * speaker_warp *
                      seg.freq_jitter * glide;
        freq = std::min(freq, 0.49 * sample_rate);
        phases[f] += kTwoPi * freq * dt;
        v += spec->formants[f].second * std::sin(phases[f]);
      }
      v *= seg.amp;
      v += spec->noise_floor * seg.amp * rng.Uniform(-1.0, 1.0);
      (*out)[begin + i] += v;
    }
  } else if (seg.ns_type == kNsSilence) {
    for (size_t i = 0; i < n; ++i)
      (*out)[begin + i] += seg.amp * rng.Uniform(-1.0, 1.0);
  } else if (seg.ns_type == kNsHesitation) {
    double phase = 0.0, phase2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double vib = 1.0 + 0.02 * std::sin(kTwoPi * 5.0 * i * dt);
      phase += kTwoPi * seg.hum_freq * vib * dt;
      phase2 += kTwoPi * 2.0 * seg.hum_freq * vib * dt;
      (*out)[begin + i] +=
          seg.amp * (0.8 * std::sin(phase) + 0.3 * std::sin(phase2)) +
          0.02 * seg.amp * rng.Uniform(-1.0, 1.0);
    }
  } else {  // babble
    std::vector<double> phases(seg.babble_freqs.size(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (size_t f = 0; f < seg.babble_freqs.size(); ++f) {
        double drift = 1.0 + 0.15 * std::sin(kTwoPi * (0.8 + 0.3 * f) * i * dt);
        phases[f] += kTwoPi * seg.babble_freqs[f] * drift * dt;
        v += std::sin(phases[f]);
      }
      (*out)[begin + i] += seg.amp * (0.25 * v + 0.5 * rng.Uniform(-1.0, 1.0));
    }
  }
}

SyntheticUtterance RenderUtterance(const UtterancePlan &plan,
                                   const ToyLanguage &lang,
                                   int sample_rate) {
  Rng rng(plan.render_seed);
  std::vector<Segment> segs = BuildSegments(plan, lang, rng);

  int total_frames = 0;
  for (const auto &s : segs) total_frames += s.frames;
  Require(total_frames > 0, "utterance plan produced zero frames");

  SyntheticUtterance utt;
  utt.utterance_id = plan.id;
  utt.speaker_id = plan.speaker;
  for (int w : plan.word_ids) utt.transcript.push_back(lang.words.at(w));

  utt.true_alignment.reserve(total_frames);
  for (const auto &s : segs) {
    if (s.is_phone) {
      int base = lang.PhoneStateBase(s.phone);
      for (int k = 0; k < 3; ++k)
        for (int f = 0; f < s.state_frames[k]; ++f)
          utt.true_alignment.push_back(base + k);
    } else {
      for (int f = 0; f < s.frames; ++f) utt.true_alignment.push_back(s.ns_type);
    }
  }

  const size_t num_samples = SamplesForFrames(total_frames);
  utt.waveform.sample_rate = sample_rate;
  utt.waveform.samples.assign(num_samples, 0.0);

  size_t cursor = 0;
  for (size_t si = 0; si < segs.size(); ++si) {
    size_t begin = cursor;
    size_t end = cursor + static_cast<size_t>(segs[si].frames) * kFrameShiftSamples;
    cursor = end;
    if (si + 1 == segs.size()) end = num_samples;  // window tail
    const PhoneSpec *spec =
        segs[si].is_phone ? &lang.phones.at(segs[si].phone) : nullptr;
    RenderSegment(segs[si], spec, plan.speaker_warp, sample_rate, rng,
                  &utt.waveform.samples, begin, end);
  }
  for (auto &v : utt.waveform.samples) {
    v += plan.ambient * rng.Uniform(-1.0, 1.0);
    v = std::clamp(v, -1.0, 1.0);
  }
  return utt;
}

}  // namespace

void PhoneSpec::Validate(int sample_rate) const {
  for (const auto &f : formants) {
    if (f.first >= 0.5 * sample_rate)
      throw ConfigError(StrCat("phone ", phone_id, ": formant ", f.first,
                               " Hz at or above Nyquist"));
    if (f.second < 0.0 || f.second > 1.0)
      throw ConfigError(StrCat("phone ", phone_id, ": amplitude out of [0,1]"));
  }
  if (noise_floor < 0.0 || noise_floor > 1.0)
    throw ConfigError(StrCat("phone ", phone_id, ": noise floor out of [0,1]"));
  if (mean_duration < 3)
    throw ConfigError(StrCat("phone ", phone_id,
                             ": mean duration below 3 frames"));
}

std::string CorpusConfig::Serialize() const {
  std::ostringstream os;
  os << "sample_rate=" << sample_rate << "\nnum_phones=" << num_phones
     << "\nvocab_size=" << vocab_size
     << "\ntranscribed_count=" << transcribed_count
     << "\nuntranscribed_count=" << untranscribed_count
     << "\ndev_count=" << dev_count << "\neval_count=" << eval_count
     << "\nnonspeech_fraction=" << FormatFixed(nonspeech_fraction, 6)
     << "\ntarget_ns_ratio=" << FormatFixed(target_ns_ratio, 6)
     << "\nmin_words=" << min_words << "\nmax_words=" << max_words
     << "\nnum_speakers=" << num_speakers
     << "\namp_lo=" << FormatFixed(amp_lo, 6)
     << "\namp_hi=" << FormatFixed(amp_hi, 6)
     << "\nambient_lo=" << FormatFixed(ambient_lo, 6)
     << "\nambient_hi=" << FormatFixed(ambient_hi, 6)
     << "\nns_utt_min_frames=" << ns_utt_min_frames
     << "\nns_utt_max_frames=" << ns_utt_max_frames
     << "\nmin_gap_frames=" << min_gap_frames
     << "\nwritten_sentences=" << written_sentences << "\n";
  return os.str();
}

std::string CorpusConfig::Digest() const { return HashHex(Hash64(Serialize())); }

int ToyLanguage::WordId(const std::string &word) const {
  for (size_t i = 0; i < words.size(); ++i)
    if (words[i] == word) return static_cast<int>(i);
  throw InputError("unknown word: " + word);
}

ToyLanguage BuildToyLanguage(const CorpusConfig &config, uint64_t seed) {
  if (config.num_phones < 8)
    throw ConfigError("phone set must have at least 8 phones");
  if (config.vocab_size < 20)
    throw ConfigError("vocabulary must have at least 20 words");

  ToyLanguage lang;
  lang.phones = BasePhoneTable();
  Rng rng(DeriveSeed(seed, "language"));
  const std::string extra_letters = "bdgnprlfvz";
  for (int p = 8; p < config.num_phones; ++p) {
    PhoneSpec spec;
    spec.phone_id = p - 8 < static_cast<int>(extra_letters.size())
                        ? std::string(1, extra_letters[p - 8])
                        : StrCat("q", p);
    int nf = rng.UniformInt(2, 3);
    for (int f = 0; f < nf; ++f)
      spec.formants.emplace_back(rng.Uniform(300.0, 3500.0),
                                 rng.Uniform(0.10, 0.30));
    spec.noise_floor = rng.Uniform(0.004, 0.03);
    spec.mean_duration = rng.UniformInt(5, 10);
    spec.duration_jitter = rng.UniformInt(1, 3);
    lang.phones.push_back(std::move(spec));
  }
  for (const auto &p : lang.phones) p.Validate(config.sample_rate);

  // CV-patterned words; consonants are phones >= 4 of the base table and any
  // procedural extras, vowels are the first four.
  std::vector<int> vowels, consonants;
  for (int p = 0; p < config.num_phones; ++p)
    (IsVowelIndex(p) ? vowels : consonants).push_back(p);
  const std::vector<std::vector<int>> patterns = {
      {1, 0}, {1, 0, 1}, {0, 1}, {1, 0, 1, 0}, {0, 1, 0}, {1, 0, 0}};
  std::set<std::string> seen;
  int pattern_idx = 0;
  while (static_cast<int>(lang.words.size()) < config.vocab_size) {
    const auto &pat = patterns[pattern_idx % patterns.size()];
    ++pattern_idx;
    std::vector<int> phones;
    std::string text;
    for (int kind : pat) {
      const auto &pool = kind == 1 ? consonants : vowels;
      int p = pool[rng.UniformInt(0, static_cast<int>(pool.size()) - 1)];
      phones.push_back(p);
      text += lang.phones[p].phone_id;
    }
    if (seen.insert(text).second) {
      lang.words.push_back(text);
      lang.word_phones.push_back(std::move(phones));
    }
  }

  // Seeded bigram grammar; row 0 is the sentence-start history.
  lang.bigram.resize(lang.words.size() + 1);
  for (auto &row : lang.bigram) {
    row.resize(lang.words.size());
    for (auto &w : row) w = std::exp(1.2 * rng.Gaussian());
  }

  lang.inventory = StateInventory(kNumNonspeechStates,
                                  kStatesPerPhone * config.num_phones);
  return lang;
}

SyntheticUtterance SynthUtterance(const std::vector<std::string> &words,
                                  const ToyLanguage &lang, uint64_t seed) {
  Rng rng(DeriveSeed(seed, "synth-utterance"));
  UtterancePlan plan;
  plan.id = "utt";
  plan.speaker = "spk000";
  plan.split = "";
  plan.amp = rng.Uniform(0.4, 0.8);
  plan.ambient = 0.01;
  plan.speaker_warp = rng.Uniform(0.94, 1.06);
  plan.render_seed = DeriveSeed(seed, "render");
  if (words.empty()) {
    plan.gaps = {rng.UniformInt(120, 240)};
  } else {
    plan.gaps.push_back(rng.UniformInt(10, 30));
    for (const auto &w : words) {
      int wid = lang.WordId(w);  // throws on unknown word
      plan.word_ids.push_back(wid);
      std::vector<int> durs;
      for (int p : lang.word_phones[wid]) {
        const auto &spec = lang.phones[p];
        int d = spec.mean_duration +
                rng.UniformInt(-spec.duration_jitter, spec.duration_jitter);
        durs.push_back(std::max(3, d));
      }
      plan.phone_durations.push_back(std::move(durs));
      plan.gaps.push_back(rng.UniformInt(5, 20));
    }
  }
  return RenderUtterance(plan, lang, 16000);
}

StateDurationStats ComputeCorpusStats(
    const std::vector<std::vector<int>> &alignments,
    const StateInventory &inventory) {
  StateDurationStats stats;
  stats.num_utterances = static_cast<int>(alignments.size());
  std::vector<double> ns_counts, sp_counts;
  for (const auto &ali : alignments) {
    int64_t ns = 0, sp = 0;
    for (int s : ali) {
      if (inventory.IsSpeech(s)) ++sp;
      else ++ns;
    }
    ns_counts.push_back(static_cast<double>(ns));
    sp_counts.push_back(static_cast<double>(sp));
    stats.nonspeech.total_frames += ns;
    stats.speech.total_frames += sp;
  }
  auto finish = [](ClassStats *c, const std::vector<double> &counts) {
    if (counts.empty()) return;
    double mean = std::accumulate(counts.begin(), counts.end(), 0.0) /
                  counts.size();
    double var = 0.0;
    for (double v : counts) var += (v - mean) * (v - mean);
    var /= counts.size();  // population convention
    c->mean_frames = mean;
    c->std_frames = std::sqrt(var);
  };
  finish(&stats.nonspeech, ns_counts);
  finish(&stats.speech, sp_counts);
  return stats;
}

StateDurationStats ComputeCorpusStats(const std::vector<ManifestEntry> &entries) {
  std::vector<std::vector<int>> alignments;
  int max_state = 0;
  for (const auto &e : entries) {
    alignments.push_back(ReadAlignment(e.alignment_path));
    for (int s : alignments.back()) max_state = std::max(max_state, s);
  }
  StateInventory inv(kNumNonspeechStates,
                     std::max(1, max_state + 1 - kNumNonspeechStates));
  return ComputeCorpusStats(alignments, inv);
}

std::pair<CorpusManifest, std::vector<ManifestEntry>> SplitNonspeechUtterances(
    const CorpusManifest &manifest) {
  CorpusManifest cleaned;
  cleaned.seed = manifest.seed;
  cleaned.config_digest = manifest.config_digest;
  std::vector<ManifestEntry> pool;
  for (const auto &e : manifest.entries) {
    if (e.split == kSplitTranscribed && e.transcript.empty())
      pool.push_back(e);
    else
      cleaned.entries.push_back(e);
  }
  return {cleaned, pool};
}

GeneratedCorpus GenerateCorpus(const CorpusConfig &config, uint64_t seed,
                               const std::string &out_dir, int jobs) {
  if (config.target_ns_ratio < 0)
    throw ConfigError("target non-speech ratio must be >= 0");
  if (config.nonspeech_fraction < 0 || config.nonspeech_fraction > 1)
    throw ConfigError("non-speech fraction must be in [0,1]");
  if (config.transcribed_count < 1)
    throw ConfigError("transcribed split must be nonempty");
  if (config.min_words < 1 || config.max_words < config.min_words)
    throw ConfigError("bad word-count range");

  GeneratedCorpus out;
  out.language = BuildToyLanguage(config, seed);
  const ToyLanguage &lang = out.language;

  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wav");
  fs::create_directories(fs::path(out_dir) / "ali");

  std::vector<double> speaker_warp(config.num_speakers);
  for (int k = 0; k < config.num_speakers; ++k) {
    Rng r(DeriveSeed(seed, StrCat("speaker/", k)));
    speaker_warp[k] = 0.92 + 0.16 * r.Uniform(0.0, 1.0);
  }

  std::vector<UtterancePlan> plans;
  int utt_counter = 0;
  const std::vector<std::pair<std::string, int>> split_counts = {
      {kSplitTranscribed, config.transcribed_count},
      {kSplitUntranscribed, config.untranscribed_count},
      {kSplitDev, config.dev_count},
      {kSplitEval, config.eval_count}};

  for (const auto &[split, count] : split_counts) {
    if (count <= 0) continue;
    Rng rng(DeriveSeed(seed, "plan/" + split));
    int ns_count = split == kSplitTranscribed
                       ? static_cast<int>(std::llround(
                             config.nonspeech_fraction * count))
                       : 0;
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.gen());
    std::set<int> pure_ns(order.begin(), order.begin() + ns_count);

    std::vector<UtterancePlan> split_plans(count);
    int64_t speech_frames = 0;
    int64_t pure_ns_frames = 0;
    int gap_slots = 0;
    for (int i = 0; i < count; ++i) {
      UtterancePlan &plan = split_plans[i];
      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "utt%06d", utt_counter++);
      plan.id = idbuf;
      plan.split = split;
      int spk = rng.UniformInt(0, config.num_speakers - 1);
      char spkbuf[16];
      std::snprintf(spkbuf, sizeof(spkbuf), "spk%03d", spk);
      plan.speaker = spkbuf;
      plan.speaker_warp = speaker_warp[spk];
      plan.amp = rng.Uniform(config.amp_lo, config.amp_hi);
      plan.ambient = rng.Uniform(config.ambient_lo, config.ambient_hi);
      plan.render_seed = DeriveSeed(seed, "render/" + plan.id);
      if (pure_ns.count(i)) {
        pure_ns_frames += config.ns_utt_min_frames;
        plan.gaps = {rng.UniformInt(config.ns_utt_min_frames,
                                    config.ns_utt_max_frames)};
        pure_ns_frames += plan.gaps[0] - config.ns_utt_min_frames;
        continue;
      }
      plan.word_ids =
          SampleWordSequence(lang, rng, config.min_words, config.max_words);
      for (int w : plan.word_ids) {
        std::vector<int> durs;
        for (int p : lang.word_phones[w]) {
          const auto &spec = lang.phones[p];
          int d = spec.mean_duration +
                  rng.UniformInt(-spec.duration_jitter, spec.duration_jitter);
          durs.push_back(std::max(3, d));
          speech_frames += durs.back();
        }
        plan.phone_durations.push_back(std::move(durs));
      }
      gap_slots += static_cast<int>(plan.word_ids.size()) + 1;
    }

    // Allocate the split's non-speech budget so the class ratio lands on
    // target: pure non-speech utterances first, the rest spread over gaps.
    int64_t ns_needed = static_cast<int64_t>(
        std::llround(config.target_ns_ratio * speech_frames));
    int64_t gap_budget = ns_needed - pure_ns_frames;
    int64_t min_total = static_cast<int64_t>(gap_slots) * config.min_gap_frames;
    if (gap_budget < min_total) gap_budget = min_total;
    int64_t extra = gap_budget - min_total;

    std::vector<double> weights(gap_slots);
    double weight_sum = 0.0;
    for (auto &w : weights) {
      w = rng.Uniform(0.5, 1.5);
      weight_sum += w;
    }
    std::vector<int> gap_len(gap_slots, config.min_gap_frames);
    int64_t assigned = 0;
    for (int g = 0; g < gap_slots; ++g) {
      int64_t share = static_cast<int64_t>(extra * weights[g] / weight_sum);
      gap_len[g] += static_cast<int>(share);
      assigned += share;
    }
    for (int64_t r = extra - assigned, g = 0; r > 0 && gap_slots > 0; --r, ++g)
      gap_len[g % gap_slots] += 1;

    int slot = 0;
    for (auto &plan : split_plans) {
      if (plan.word_ids.empty() && plan.gaps.size() == 1) continue;
      plan.gaps.assign(plan.word_ids.size() + 1, 0);
      for (auto &g : plan.gaps) g = gap_len[slot++];
    }
    for (auto &plan : split_plans) plans.push_back(std::move(plan));
  }

  // Rendering is pure per utterance; parallel-safe.
  std::vector<SyntheticUtterance> utts(plans.size());
  ParallelFor(static_cast<int>(plans.size()), jobs, [&](int i) {
    utts[i] = RenderUtterance(plans[i], lang, config.sample_rate);
  });

  out.manifest.seed = seed;
  out.manifest.config_digest = config.Digest();
  std::ostringstream untranscribed_refs;
  for (size_t i = 0; i < utts.size(); ++i) {
    const auto &utt = utts[i];
    std::string wav_path = (fs::path(out_dir) / "wav" / (utt.utterance_id + ".wav")).string();
    std::string ali_path = (fs::path(out_dir) / "ali" / (utt.utterance_id + ".ali")).string();
    WriteWav(wav_path, utt.waveform);
    WriteAlignment(ali_path, utt.true_alignment);
    ManifestEntry entry;
    entry.id = utt.utterance_id;
    entry.audio_path = wav_path;
    entry.alignment_path = ali_path;
    entry.split = plans[i].split;
    std::string text = JoinStrings(utt.transcript, " ");
    if (entry.split == kSplitUntranscribed) {
      // reference kept aside for analysis only; the pipeline never reads it
      untranscribed_refs << utt.utterance_id << '\t' << text << '\n';
      entry.transcript = "";
    } else {
      entry.transcript = text;
    }
    out.manifest.entries.push_back(std::move(entry));
  }
  out.manifest.CheckIdsUnique();

  Rng text_rng(DeriveSeed(seed, "written-text"));
  for (int i = 0; i < config.written_sentences; ++i) {
    auto ids = SampleWordSequence(lang, text_rng, config.min_words,
                                  config.max_words);
    std::vector<std::string> ws;
    for (int w : ids) ws.push_back(lang.words[w]);
    out.written_text.push_back(JoinStrings(ws, " "));
  }

  WriteManifest((fs::path(out_dir) / "manifest.tsv").string(), out.manifest);
  WriteTextFile((fs::path(out_dir) / "untranscribed_ref.tsv").string(),
                untranscribed_refs.str());
  WriteTextFile((fs::path(out_dir) / "written.txt").string(),
                JoinStrings(out.written_text, "\n") + "\n");
  WriteLexiconFile((fs::path(out_dir) / "lexicon.txt").string(), lang);
  WriteTextFile((fs::path(out_dir) / "inventory.txt").string(),
                lang.inventory.Serialize());
  return out;
}

void WriteLexiconFile(const std::string &path, const ToyLanguage &lang) {
  std::ostringstream os;
  os << "#phones";
  for (const auto &p : lang.phones) os << '\t' << p.phone_id;
  os << '\n';
  for (size_t w = 0; w < lang.words.size(); ++w) {
    os << lang.words[w];
    for (int p : lang.word_phones[w]) os << '\t' << lang.phones[p].phone_id;
    os << '\n';
  }
  WriteTextFile(path, os.str());
}

}  // namespace asrlab
