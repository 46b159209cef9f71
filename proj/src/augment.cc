// asrlab/augment.cc

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

#include <algorithm>
#include <cmath>
#include <map>

#include "asrlab/common.hh"

namespace asrlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedFactors[3] = {1.0, 0.9, 1.1};

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

std::string CanonicalTransformName(const std::string &raw) {
  std::string t;
  for (char c : raw)
    if (c != '.') t.push_back(static_cast<char>(std::tolower(c)));
  static const std::map<std::string, std::string> names = {
      {"sp", kTransformSpeed},    {"speed", kTransformSpeed},
      {"pit", kTransformPitch},   {"pitch", kTransformPitch},
      {"vol", kTransformVolume},  {"volume", kTransformVolume},
      {"vtlp", kTransformVtlp},   {"noise", kTransformNoise}};
  auto it = names.find(t);
  if (it == names.end()) throw ConfigError("unknown transform name: " + raw);
  return it->second;
}

}  // namespace

Waveform SpeedPerturb(const Waveform &w, double factor) {
  if (factor <= 0.0) throw ParamError("speed factor must be positive");
  if (factor == 1.0) return w;  // the "3x SP" convention copy stays untouched
  const int n = w.NumSamples();
  const int m = static_cast<int>(std::llround(n / factor));
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(m);
  // sinc kernel with Hann taper; cutoff shrinks when compressing (factor > 1)
  const double cutoff = std::min(1.0, 1.0 / factor);
  const double half_width = 16.0 / cutoff;
  for (int i = 0; i < m; ++i) {
    const double pos = i * factor;
    const int j0 = std::max(0, static_cast<int>(std::ceil(pos - half_width)));
    const int j1 = std::min(n - 1, static_cast<int>(std::floor(pos + half_width)));
    double acc = 0.0;
    for (int j = j0; j <= j1; ++j) {
      const double x = pos - j;
      const double taper = 0.5 * (1.0 + std::cos(kPi * x / half_width));
      acc += w.samples[j] * cutoff * Sinc(cutoff * x) * taper;
    }
    out.samples[i] = std::clamp(acc, -1.0, 1.0);
  }
  return out;
}

Waveform VolumePerturb(const Waveform &w, double gain) {
  if (gain <= 0.0) throw ParamError("volume gain must be positive");
  Waveform out = w;
  for (auto &s : out.samples) s = std::clamp(s * gain, -1.0, 1.0);
  return out;
}

Waveform MixNoise(const Waveform &w, const Waveform &noise, double snr_db,
                  NoiseMode mode, uint64_t seed) {
  if (noise.sample_rate != w.sample_rate)
    throw ParamError("noise sample rate differs from signal");
  if (noise.samples.empty()) throw ParamError("empty noise source");
  const size_t n = w.samples.size();
  double noise_power = MeanPower(noise.samples, 0, noise.samples.size());
  if (noise_power <= 0.0) throw ParamError("all-zero noise source");

  Waveform out = w;
  Rng rng(seed);
  size_t region_begin = 0, region_end = n;
  std::vector<double> patch;
  if (mode == NoiseMode::kBackground) {
    patch.resize(n);
    for (size_t i = 0; i < n; ++i)
      patch[i] = noise.samples[i % noise.samples.size()];
  } else {
    size_t len = std::min(noise.samples.size(), n / 2);
    if (len == 0) len = std::min<size_t>(noise.samples.size(), n);
    region_begin = static_cast<size_t>(
        rng.UniformInt(0, static_cast<int>(n - len)));
    region_end = region_begin + len;
    patch.assign(noise.samples.begin(), noise.samples.begin() + len);
  }
  const double patch_power = MeanPower(patch, 0, patch.size());
  const double signal_power = MeanPower(w.samples, region_begin, region_end);
  const double gain =
      std::sqrt(signal_power / (patch_power * std::pow(10.0, snr_db / 10.0)));
  for (size_t i = region_begin; i < region_end; ++i)
    out.samples[i] =
        std::clamp(out.samples[i] + gain * patch[i - region_begin], -1.0, 1.0);
  return out;
}

AugmentationSpec AugmentationSpec::Parse(const std::string &text) {
  AugmentationSpec spec;
  auto tokens = SplitString(TrimString(text), ' ');
  size_t i = 0;
  while (i < tokens.size()) {
    const std::string &tok = tokens[i];
    auto x = tok.find('x');
    if (x == std::string::npos || x == 0)
      throw ConfigError("bad augmentation token: " + tok);
    int mult = 0;
    try {
      mult = std::stoi(tok.substr(0, x));
    } catch (...) {
      throw ConfigError("bad multiplicity in: " + tok);
    }
    if (mult < 1) throw ConfigError("multiplicity must be >= 1: " + tok);
    std::string name;
    if (x + 1 < tok.size()) {
      name = tok.substr(x + 1);  // allow "3xSP"
    } else {
      if (++i >= tokens.size())
        throw ConfigError("dangling multiplicity: " + tok);
      name = tokens[i];
    }
    spec.terms.push_back({CanonicalTransformName(name), mult});
    ++i;
  }
  return spec;
}

int AugmentationSpec::Fold() const {
  if (terms.empty()) return 1;
  int fold = 0;
  for (const auto &t : terms) fold += t.multiplicity;
  return fold;
}

bool AugmentationSpec::RequestsNoise() const {
  for (const auto &t : terms)
    if (t.transform == kTransformNoise) return true;
  return false;
}

std::string AugmentationSpec::ToString() const {
  std::vector<std::string> parts;
  for (const auto &t : terms)
    parts.push_back(StrCat(t.multiplicity, "x ", t.transform));
  return JoinStrings(parts, " ");
}

AugParams DeriveAugParams(uint64_t aug_seed, const std::string &source_id,
                          const std::string &transform, int copy_index,
                          int noise_pool_size) {
  AugParams p;
  p.transform = transform;
  p.copy_index = copy_index;
  Rng rng(DeriveSeed(aug_seed,
                     StrCat("aug/", source_id, "/", transform, "/", copy_index)));
  if (transform == kTransformSpeed) {
    p.factor = kSpeedFactors[copy_index % 3];
    p.identity = p.factor == 1.0;
  } else if (copy_index == 0) {
    p.identity = true;  // convention copy, unmodified
  } else if (transform == kTransformVolume) {
    p.factor = rng.LogUniform(0.5, 2.0);
    p.identity = false;
  } else if (transform == kTransformPitch || transform == kTransformVtlp) {
    p.factor = rng.Uniform(0.9, 1.1);
    p.identity = false;
  } else if (transform == kTransformNoise) {
    Require(noise_pool_size > 0, "noise params need a nonempty pool");
    p.snr_db = rng.Uniform(5.0, 20.0);
    p.noise_index = rng.UniformInt(0, noise_pool_size - 1);
    p.noise_mode = rng.Coin() ? NoiseMode::kForeground : NoiseMode::kBackground;
    p.identity = false;
  } else {
    throw ConfigError("unknown transform: " + transform);
  }
  return p;
}

AugmentedId ParseAugmentedId(const std::string &id) {
  AugmentedId out;
  auto hash = id.find('#');
  if (hash == std::string::npos) {
    out.source = id;
    return out;
  }
  out.source = id.substr(0, hash);
  std::string suffix = id.substr(hash + 1);
  auto dash = suffix.rfind('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= suffix.size())
    throw InputError("bad augmented id: " + id);
  out.transform = suffix.substr(0, dash);
  out.copy_index = std::stoi(suffix.substr(dash + 1));
  out.augmented = true;
  return out;
}

std::vector<ManifestEntry> ApplyAugmentation(
    const std::vector<ManifestEntry> &entries, const AugmentationSpec &spec,
    int noise_pool_size, uint64_t seed) {
  (void)seed;  // parameters are derived lazily from the same seed
  if (spec.RequestsNoise() && noise_pool_size <= 0)
    throw ConfigError("noise augmentation requested with an empty noise pool");
  if (spec.terms.empty()) return entries;
  std::vector<ManifestEntry> out;
  out.reserve(entries.size() * spec.Fold());
  for (const auto &e : entries) {
    for (const auto &term : spec.terms) {
      for (int copy = 0; copy < term.multiplicity; ++copy) {
        ManifestEntry a = e;
        a.id = StrCat(e.id, "#", term.transform, "-", copy);
        out.push_back(std::move(a));
      }
    }
  }
  return out;
}

std::vector<int> ResampleAlignment(const std::vector<int> &src, int new_frames) {
  Require(!src.empty() && new_frames > 0, "ResampleAlignment: empty input");
  std::vector<int> out(new_frames);
  const double scale = static_cast<double>(src.size()) / new_frames;
  for (int t = 0; t < new_frames; ++t) {
    int idx = static_cast<int>((t + 0.5) * scale);
    out[t] = src[std::min<size_t>(idx, src.size() - 1)];
  }
  return out;
}

}  // namespace asrlab
