// asrlab/frontend.cc

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

#include "asrlab/frontend.hh"

#include <algorithm>
#include <cmath>
#include <complex>

#include "asrlab/common.hh"

namespace asrlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// In-place iterative radix-2 FFT; n must be a power of two.
void Fft(std::vector<std::complex<double>> *buf) {
  auto &a = *buf;
  const size_t n = a.size();
  Require((n & (n - 1)) == 0 && n > 0, "FFT size must be a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<double> HammingWindow(int length) {
  std::vector<double> w(length);
  for (int i = 0; i < length; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (length - 1));
  return w;
}

// Per-filter (bin, weight) pairs.  Breakpoints are equally spaced on the mel
// scale between fmin and Nyquist, optionally warped in the linear domain.
std::vector<std::vector<std::pair<int, double>>> BuildMelFilters(
    const FrontendConfig &config, const std::function<double(double)> &warp) {
  const int bins = config.fft_size / 2 + 1;
  const double nyquist = 0.5 * config.sample_rate;
  const double bin_hz = static_cast<double>(config.sample_rate) / config.fft_size;
  const int m = config.num_mels;
  std::vector<double> points(m + 2);
  const double mel_lo = MelScale(config.fmin_hz);
  const double mel_hi = MelScale(nyquist);
  for (int i = 0; i < m + 2; ++i) {
    double hz = MelInverse(mel_lo + (mel_hi - mel_lo) * i / (m + 1));
    points[i] = warp ? warp(hz) : hz;
  }
  std::vector<std::vector<std::pair<int, double>>> filters(m);
  for (int k = 0; k < m; ++k) {
    const double left = points[k], center = points[k + 1], right = points[k + 2];
    for (int b = 0; b < bins; ++b) {
      double hz = b * bin_hz;
      double weight = 0.0;
      if (hz > left && hz < center)
        weight = (hz - left) / (center - left);
      else if (hz >= center && hz < right)
        weight = (right - hz) / (right - center);
      if (weight > 0.0) filters[k].emplace_back(b, weight);
    }
  }
  return filters;
}

enum class WarpKind { kNone, kVtlp, kPitch };

Mat ExtractInternal(const Waveform &w, const FrontendConfig &config,
                    WarpKind warp_kind, double warp_factor) {
  const int n = w.NumSamples();
  const int T = NumFramesForSamples(n, config);
  const int bins = config.fft_size / 2 + 1;

  std::function<double(double)> mel_warp;
  if (warp_kind == WarpKind::kVtlp) {
    const double knee = config.vtlp_knee_hz;
    const double nyq = 0.5 * config.sample_rate;
    const double alpha = warp_factor;
    mel_warp = [knee, nyq, alpha](double f) {
      if (f <= knee) return alpha * f;
      // linear segment matching (knee, alpha*knee) to (nyq, nyq)
      return alpha * knee + (nyq - alpha * knee) * (f - knee) / (nyq - knee);
    };
  }
  const auto filters = BuildMelFilters(config, mel_warp);
  const auto window = HammingWindow(config.window_samples);

  Mat out(T, config.num_mels);
  std::vector<std::complex<double>> buf(config.fft_size);
  std::vector<double> mag(bins), warped(bins);
  for (int t = 0; t < T; ++t) {
    const int begin = t * config.shift_samples;
    for (int i = 0; i < config.fft_size; ++i) {
      double v = i < config.window_samples ? w.samples[begin + i] * window[i] : 0.0;
      buf[i] = {v, 0.0};
    }
    Fft(&buf);
    for (int b = 0; b < bins; ++b) mag[b] = std::abs(buf[b]);

    const double *spec = mag.data();
    if (warp_kind == WarpKind::kPitch) {
      // content at frequency f moves to beta*f: sample the source at i/beta
      for (int b = 0; b < bins; ++b) {
        double src = b / warp_factor;
        int lo = static_cast<int>(std::floor(src));
        double frac = src - lo;
        double v = 0.0;
        if (lo >= 0 && lo < bins) v += (1.0 - frac) * mag[lo];
        if (lo + 1 >= 0 && lo + 1 < bins) v += frac * mag[lo + 1];
        warped[b] = v;
      }
      spec = warped.data();
    }
    for (int k = 0; k < config.num_mels; ++k) {
      double e = 0.0;
      for (const auto &[b, wgt] : filters[k]) e += wgt * spec[b];
      out(t, k) = std::log(std::max(e, config.log_floor));
    }
  }
  return out;
}

}  // namespace

int NumFramesForSamples(int num_samples, const FrontendConfig &config) {
  if (num_samples < config.window_samples)
    throw InputError(StrCat("waveform too short: ", num_samples, " < ",
                            config.window_samples, " samples"));
  return 1 + (num_samples - config.window_samples) / config.shift_samples;
}

double MelScale(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelInverse(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> MelCenterFrequencies(const FrontendConfig &config) {
  const double mel_lo = MelScale(config.fmin_hz);
  const double mel_hi = MelScale(0.5 * config.sample_rate);
  std::vector<double> centers(config.num_mels);
  for (int k = 0; k < config.num_mels; ++k)
    centers[k] =
        MelInverse(mel_lo + (mel_hi - mel_lo) * (k + 1) / (config.num_mels + 1));
  return centers;
}

Mat ExtractLogMel(const Waveform &w, const FrontendConfig &config) {
  return ExtractInternal(w, config, WarpKind::kNone, 1.0);
}

Mat VtlpWarp(const Waveform &w, const FrontendConfig &config, double alpha) {
  if (alpha < 0.8 || alpha > 1.2)
    throw ParamError(StrCat("VTLP alpha outside guard range: ", alpha));
  return ExtractInternal(w, config, WarpKind::kVtlp, alpha);
}

Mat PitchWarp(const Waveform &w, const FrontendConfig &config, double beta) {
  if (beta < 0.8 || beta > 1.2)
    throw ParamError(StrCat("pitch beta outside guard range: ", beta));
  return ExtractInternal(w, config, WarpKind::kPitch, beta);
}

Mat PairFrames(const Mat &feats) {
  Require(feats.cols() == 80,
          StrCat("PairFrames expects 80 columns, got ", feats.cols()));
  const int T = static_cast<int>(feats.rows());
  Require(T >= 1, "PairFrames needs at least one frame");
  Mat out(T, 160);
  for (int t = 0; t < T; ++t) {
    out.row(t).head(80) = feats.row(t);
    out.row(t).tail(80) = feats.row(std::min(t + 1, T - 1));
  }
  return out;
}

void MeanNormalizeColumns(Mat *feats) {
  Eigen::RowVectorXd mean = feats->colwise().mean();
  feats->rowwise() -= mean;
}

std::vector<Chunk> ChunkSequence(int total_frames, const ChunkSpec &spec) {
  Require(total_frames >= 1, "ChunkSequence needs at least one frame");
  Require(spec.core_length >= 1 && spec.context_length >= 0,
          "bad chunk spec");
  std::vector<Chunk> chunks;
  for (int begin = 0; begin < total_frames; begin += spec.core_length) {
    Chunk c;
    c.core_begin = begin;
    c.core_end = std::min(begin + spec.core_length, total_frames);
    c.left_begin = std::max(0, begin - spec.context_length);
    c.right_end = std::min(total_frames, c.core_end + spec.context_length);
    chunks.push_back(c);
  }
  return chunks;
}

}  // namespace asrlab
