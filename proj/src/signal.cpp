// Copyright 2025 The GASR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gasr/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "gasr/common.hpp"

namespace gasr {

namespace {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

double MeanSquare(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

Spectrogram ComputeLogMel(const Waveform& w, const LogMelOptions& opts) {
  long flen = std::lround(opts.frame_length * w.sample_rate);
  long fshift = std::lround(opts.frame_shift * w.sample_rate);
  if (flen <= 1 || fshift < 1)
    throw Error("ComputeLogMel: degenerate frame geometry");
  long n = static_cast<long>(w.samples.size());
  if (n < flen)
    throw Error("ComputeLogMel: audio shorter than one frame (" +
                std::to_string(n) + " < " + std::to_string(flen) +
                " samples)");
  long frames = 1 + (n - flen) / fshift;

  std::vector<double> emphasized(w.samples.size());
  emphasized[0] = w.samples[0] * (1.0 - opts.preemphasis);
  for (long i = 1; i < n; ++i)
    emphasized[i] = w.samples[i] - opts.preemphasis * w.samples[i - 1];

  long nfft = 1;
  while (nfft < flen) nfft <<= 1;
  long nbins = nfft / 2 + 1;

  VectorX window(flen);
  for (long i = 0; i < flen; ++i)
    window(i) = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (flen - 1));

  // Triangular filters with edges equally spaced on the mel scale
  // between 0 and nyquist.
  double nyquist = w.sample_rate / 2.0;
  double mel_hi = HzToMel(nyquist);
  std::vector<double> edges(opts.mel_bins + 2);
  for (int j = 0; j < opts.mel_bins + 2; ++j)
    edges[j] = MelToHz(mel_hi * j / (opts.mel_bins + 1));
  MatrixX filters = MatrixX::Zero(opts.mel_bins, nbins);
  for (int j = 0; j < opts.mel_bins; ++j) {
    double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
    for (long k = 0; k < nbins; ++k) {
      double f = static_cast<double>(k) * w.sample_rate / nfft;
      if (f > lo && f < mid)
        filters(j, k) = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        filters(j, k) = (hi - f) / (hi - mid);
    }
  }

  Eigen::FFT<double> fft;
  Spectrogram spec;
  spec.frame_length = opts.frame_length;
  spec.frame_shift = opts.frame_shift;
  spec.values.resize(opts.mel_bins, frames);
  std::vector<double> frame(nfft, 0.0);
  std::vector<std::complex<double>> out(nfft);
  for (long t = 0; t < frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0);
    for (long i = 0; i < flen; ++i)
      frame[i] = emphasized[t * fshift + i] * window(i);
    fft.fwd(out, frame);
    VectorX power(nbins);
    for (long k = 0; k < nbins; ++k) power(k) = std::norm(out[k]);
    VectorX mel = filters * power;
    for (int j = 0; j < opts.mel_bins; ++j)
      spec.values(j, t) = std::log(std::max(mel(j), opts.log_floor));
  }
  return spec;
}

Waveform SpeedPerturb(const Waveform& w, double factor) {
  if (factor <= 0.0) throw Error("SpeedPerturb: factor must be positive");
  if (factor == 1.0) return w;
  long n = static_cast<long>(w.samples.size());
  long out_len = static_cast<long>(std::floor(n / factor));
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(out_len);
  for (long i = 0; i < out_len; ++i) {
    double pos = i * factor;
    long lo = static_cast<long>(pos);
    if (lo >= n - 1) {
      out.samples[i] = w.samples[n - 1];
    } else {
      double frac = pos - lo;
      out.samples[i] =
          (1.0 - frac) * w.samples[lo] + frac * w.samples[lo + 1];
    }
  }
  return out;
}

std::pair<Waveform, double> VolumePerturb(const Waveform& w, Rng* rng) {
  double scale = rng->Uniform(0.125, 2.0);
  Waveform out = w;
  for (double& v : out.samples) v *= scale;
  return {std::move(out), scale};
}

std::vector<AudioSegment> SegmentAudio(const Waveform& w,
                                       const std::vector<WordBoundary>& words,
                                       double target) {
  if (target <= 0.0) throw Error("SegmentAudio: target must be positive");
  double duration = w.DurationSeconds();
  for (size_t i = 0; i < words.size(); ++i) {
    const WordBoundary& b = words[i];
    if (b.start < 0.0 || b.end < b.start || b.end > duration + 1e-9)
      throw Error("SegmentAudio: word " + std::to_string(i) +
                  " lies outside the audio");
    if (i > 0 && b.start < words[i - 1].end)
      throw Error("SegmentAudio: boundaries unsorted or overlapping at word " +
                  std::to_string(i));
  }

  std::vector<AudioSegment> out;
  size_t i = 0;
  while (i < words.size()) {
    double seg_start = words[i].start;
    size_t j = i;
    // Extend while the next word still fits; a lone overlong word is
    // taken as-is.
    while (j + 1 < words.size() &&
           words[j + 1].end - seg_start <= target)
      ++j;
    double seg_end = words[j].end;
    AudioSegment seg;
    seg.offset = seg_start;
    seg.audio.sample_rate = w.sample_rate;
    long lo = std::lround(seg_start * w.sample_rate);
    long hi = std::min<long>(std::lround(seg_end * w.sample_rate),
                             static_cast<long>(w.samples.size()));
    seg.audio.samples.assign(w.samples.begin() + lo, w.samples.begin() + hi);
    out.push_back(std::move(seg));
    i = j + 1;
  }
  return out;
}

std::pair<Waveform, double> MixNoise(const Waveform& utt,
                                     const Waveform& clip,
                                     const NoiseMixPolicy& policy, Rng* rng) {
  if (utt.sample_rate != clip.sample_rate)
    throw Error("MixNoise: sample rates differ (" +
                std::to_string(utt.sample_rate) + " vs " +
                std::to_string(clip.sample_rate) + ")");
  if (utt.samples.empty()) throw Error("MixNoise: empty utterance");
  if (clip.samples.empty()) throw Error("MixNoise: empty noise clip");

  double snr = rng->Gaussian(policy.snr_mean_db, policy.snr_std_db);
  snr = std::clamp(snr, policy.snr_min_db, policy.snr_max_db);

  // Tile or trim the clip to cover the utterance.
  std::vector<double> tiled(utt.samples.size());
  for (size_t i = 0; i < tiled.size(); ++i)
    tiled[i] = clip.samples[i % clip.samples.size()];

  double p_signal = MeanSquare(utt.samples);
  double p_noise = MeanSquare(tiled);
  if (p_signal <= 0.0) throw Error("MixNoise: silent utterance (zero power)");
  if (p_noise <= 0.0) throw Error("MixNoise: silent noise clip (zero power)");

  double scale = std::sqrt(p_signal / (p_noise * std::pow(10.0, snr / 10.0)));
  Waveform out;
  out.sample_rate = utt.sample_rate;
  out.samples.resize(utt.samples.size());
  for (size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = utt.samples[i] + scale * tiled[i];
  return {std::move(out), snr};
}

SpecAugmentResult SpecAugment(const Spectrogram& s,
                              const SpecAugmentPolicy& policy, Rng* rng) {
  long bins = s.values.rows();
  long frames = s.values.cols();
  if (policy.freq_masks < 0 || policy.time_masks < 0)
    throw Error("SpecAugment: negative mask count");
  if (policy.freq_width > bins)
    throw Error("SpecAugment: frequency mask width " +
                std::to_string(policy.freq_width) + " exceeds " +
                std::to_string(bins) + " bins");
  if (policy.time_masks > 0 && policy.time_width > frames)
    throw Error("SpecAugment: time mask width " +
                std::to_string(policy.time_width) + " exceeds " +
                std::to_string(frames) + " frames");

  SpecAugmentResult result;
  result.spec = s;
  double fill = s.values.mean();
  for (int m = 0; m < policy.freq_masks; ++m) {
    int f = rng->UniformInt(0, policy.freq_width);
    int f0 = bins - f > 0
                 ? rng->UniformInt(0, static_cast<int>(bins - f) - 1)
                 : 0;
    result.freq_masks.emplace_back(f0, f);
    for (int row = f0; row < f0 + f; ++row)
      for (long t = 0; t < frames; ++t) result.spec.values(row, t) = fill;
  }
  for (int m = 0; m < policy.time_masks; ++m) {
    int t = rng->UniformInt(0, policy.time_width);
    int t0 = frames - t > 0
                 ? rng->UniformInt(0, static_cast<int>(frames - t) - 1)
                 : 0;
    result.time_masks.emplace_back(t0, t);
    for (int col = t0; col < t0 + t; ++col)
      for (long row = 0; row < bins; ++row)
        result.spec.values(row, col) = fill;
  }
  return result;
}

}  // namespace gasr
