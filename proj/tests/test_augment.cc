// asrlab/tests/test_augment.cc

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

#include "asrlab/augment.hh"

#include <cmath>

#include "asrlab/common.hh"
#include "asrlab/frontend.hh"
#include "doctest.h"

using namespace asrlab;

namespace {

Waveform Tone(double freq_hz, int num_samples, double amp = 0.5) {
  Waveform w;
  w.samples.resize(num_samples);
  for (int i = 0; i < num_samples; ++i)
    w.samples[i] = amp * std::sin(2.0 * M_PI * freq_hz * i / w.sample_rate);
  return w;
}

double Rms(const std::vector<double> &x) {
  return std::sqrt(MeanPower(x, 0, x.size()));
}

}  // namespace

TEST_CASE("speed_perturb: sample counts and identity") {
  Waveform w = Tone(440.0, 16000);
  CHECK(SpeedPerturb(w, 1.1).NumSamples() == 14545);  // round(16000/1.1)
  Waveform same = SpeedPerturb(w, 1.0);
  REQUIRE(same.NumSamples() == w.NumSamples());
  CHECK(same.samples == w.samples);  // bit-exact
  CHECK_THROWS_AS(SpeedPerturb(w, 0.0), ParamError);
  CHECK_THROWS_AS(SpeedPerturb(w, -0.5), ParamError);
}

TEST_CASE("speed_perturb: frame count scales by the warp factor") {
  FrontendConfig cfg;
  Waveform w = Tone(700.0, 24000);
  const int base_frames = NumFramesForSamples(w.NumSamples(), cfg);
  Waveform slow = SpeedPerturb(w, 0.9);
  // oracle: recompute via the frame-count formula on the resampled length
  const int expect =
      NumFramesForSamples(static_cast<int>(std::llround(24000 / 0.9)), cfg);
  const int got = NumFramesForSamples(slow.NumSamples(), cfg);
  CHECK(got == expect);
  CHECK(std::abs(got - static_cast<int>(std::llround(base_frames / 0.9))) <= 1);
}

TEST_CASE("volume_perturb: gain, clipping, rms") {
  Waveform w = Tone(300.0, 4000, 0.6);
  Waveform same = VolumePerturb(w, 1.0);
  CHECK(same.samples == w.samples);

  Waveform loud = VolumePerturb(w, 2.0);
  double peak = 0.0;
  for (double s : loud.samples) peak = std::max(peak, std::abs(s));
  CHECK(peak == doctest::Approx(1.0));

  Waveform quiet = VolumePerturb(w, 0.5);
  CHECK(Rms(quiet.samples) == doctest::Approx(0.5 * Rms(w.samples)).epsilon(1e-12));

  CHECK_THROWS_AS(VolumePerturb(w, 0.0), ParamError);
}

TEST_CASE("mix_noise: unit gain at 0 dB with equal powers") {
  Waveform sig = Tone(500.0, 8000, 0.1);
  Waveform noise = Tone(1700.0, 8000, 0.1);
  Waveform mixed = MixNoise(sig, noise, 0.0, NoiseMode::kBackground, 1);
  for (int i = 0; i < 8000; ++i)
    CHECK(mixed.samples[i] ==
          doctest::Approx(sig.samples[i] + noise.samples[i]).epsilon(1e-9));
}

TEST_CASE("mix_noise: achieves the requested snr within 0.1 dB") {
  Rng rng(4);
  Waveform sig;
  sig.samples.resize(12000);
  for (auto &s : sig.samples) s = 0.2 * rng.Uniform(-1.0, 1.0);
  Waveform noise;
  noise.sample_rate = sig.sample_rate;
  noise.samples.resize(5000);
  for (auto &s : noise.samples) s = 0.3 * rng.Uniform(-1.0, 1.0);

  for (double snr : {0.0, 5.0, 13.0}) {
    for (auto mode : {NoiseMode::kBackground, NoiseMode::kForeground}) {
      Waveform mixed = MixNoise(sig, noise, snr, mode, 7);
      // oracle: recover the injected component and recompute the actual SNR
      std::vector<double> injected(sig.samples.size());
      size_t lo = sig.samples.size(), hi = 0;
      for (size_t i = 0; i < sig.samples.size(); ++i) {
        injected[i] = mixed.samples[i] - sig.samples[i];
        if (std::abs(injected[i]) > 1e-15) { lo = std::min(lo, i); hi = std::max(hi, i + 1); }
      }
      REQUIRE(lo < hi);
      double p_sig = MeanPower(sig.samples, lo, hi);
      double p_noise = MeanPower(injected, lo, hi);
      double measured = 10.0 * std::log10(p_sig / p_noise);
      CHECK(std::abs(measured - snr) < 0.1);
    }
  }
}

TEST_CASE("mix_noise: parameter errors") {
  Waveform sig = Tone(500.0, 4000, 0.1);
  Waveform silent;
  silent.samples.assign(1000, 0.0);
  CHECK_THROWS_AS(MixNoise(sig, silent, 10.0, NoiseMode::kBackground, 1),
                  ParamError);
  Waveform wrong_rate = Tone(500.0, 1000, 0.1);
  wrong_rate.sample_rate = 8000;
  CHECK_THROWS_AS(MixNoise(sig, wrong_rate, 10.0, NoiseMode::kBackground, 1),
                  ParamError);
}

TEST_CASE("augmentation spec: table shorthand parses to the 12-fold scheme") {
  auto spec = AugmentationSpec::Parse("2x Pit. 3x Vol. 2x VTLP 2x Noise 3x SP");
  CHECK(spec.Fold() == 12);
  CHECK(spec.RequestsNoise());
  REQUIRE(spec.terms.size() == 5);
  CHECK(spec.terms[0].transform == kTransformPitch);
  CHECK(spec.terms[4].transform == kTransformSpeed);

  CHECK(AugmentationSpec::Parse("3x SP").Fold() == 3);
  CHECK(AugmentationSpec::Parse("").Fold() == 1);
  CHECK_THROWS_AS(AugmentationSpec::Parse("3x warble"), ConfigError);
}

TEST_CASE("apply_augmentation: cardinality and provenance ids") {
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < 100; ++i)
    entries.push_back({StrCat("utt", i), "a.wav", "ka to", "a.ali",
                       kSplitTranscribed});

  auto sp3 = ApplyAugmentation(entries, AugmentationSpec::Parse("3x SP"), 0, 1);
  CHECK(sp3.size() == 300);

  auto full = ApplyAugmentation(
      entries, AugmentationSpec::Parse("2x Pit. 3x Vol. 2x VTLP 2x Noise 3x SP"),
      4, 1);
  CHECK(full.size() == 1200);
  auto parsed = ParseAugmentedId(full.front().id);
  CHECK(parsed.augmented);
  CHECK(parsed.source == "utt0");
  CHECK(parsed.transform == kTransformPitch);
  CHECK(parsed.copy_index == 0);

  auto none = ApplyAugmentation(entries, AugmentationSpec{}, 0, 1);
  CHECK(none.size() == entries.size());

  CHECK_THROWS_AS(
      ApplyAugmentation(entries, AugmentationSpec::Parse("2x Noise"), 0, 1),
      ConfigError);
}

TEST_CASE("aug params: deterministic, identity copy 0, speed triple") {
  auto a = DeriveAugParams(99, "utt7", kTransformVolume, 1, 0);
  auto b = DeriveAugParams(99, "utt7", kTransformVolume, 1, 0);
  CHECK(a.factor == b.factor);
  CHECK(!a.identity);
  CHECK(a.factor >= 0.5);
  CHECK(a.factor <= 2.0);

  CHECK(DeriveAugParams(99, "utt7", kTransformVolume, 0, 0).identity);
  CHECK(DeriveAugParams(99, "utt7", kTransformSpeed, 0, 0).factor == 1.0);
  CHECK(DeriveAugParams(99, "utt7", kTransformSpeed, 1, 0).factor == 0.9);
  CHECK(DeriveAugParams(99, "utt7", kTransformSpeed, 2, 0).factor == 1.1);

  auto n = DeriveAugParams(99, "utt7", kTransformNoise, 1, 5);
  CHECK(n.noise_index >= 0);
  CHECK(n.noise_index < 5);
  CHECK(n.snr_db >= 5.0);
  CHECK(n.snr_db <= 20.0);
}

TEST_CASE("resample_alignment: preserves structure under stretch") {
  std::vector<int> src;
  src.insert(src.end(), 10, 0);
  src.insert(src.end(), 20, 5);
  src.insert(src.end(), 10, 1);
  auto out = ResampleAlignment(src, 44);  // 40 / 0.9 ~ 44
  CHECK(out.size() == 44);
  CHECK(out.front() == 0);
  CHECK(out.back() == 1);
  int mid_count = 0;
  for (int s : out) if (s == 5) ++mid_count;
  CHECK(mid_count == doctest::Approx(22).epsilon(0.15));

  auto same = ResampleAlignment(src, static_cast<int>(src.size()));
  CHECK(same == src);
}
