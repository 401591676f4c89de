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

#ifndef GASR_SIGNAL_HPP_
#define GASR_SIGNAL_HPP_

#include <utility>
#include <vector>

#include "gasr/rng.hpp"
#include "gasr/types.hpp"
#include "gasr/wav_io.hpp"

namespace gasr {

struct LogMelOptions {
  int mel_bins = 80;
  double frame_length = 0.025;  // seconds
  double frame_shift = 0.010;   // seconds
  double preemphasis = 0.97;
  double log_floor = 1e-10;
};

struct Spectrogram {
  MatrixX values;  // mel_bins x frames
  double frame_length = 0.025;
  double frame_shift = 0.010;
};

// Pre-emphasis, Hamming window, power spectrum, triangular mel
// filterbank over [0, nyquist], natural log with a floor.
Spectrogram ComputeLogMel(const Waveform& w, const LogMelOptions& opts = {});

// Linear-interpolation resampling; output length floor(len / factor).
// Factor 1.0 returns the samples bit-identical.
Waveform SpeedPerturb(const Waveform& w, double factor);

// One gain drawn uniformly from [0.125, 2]; returns the scaled audio
// and the gain.
std::pair<Waveform, double> VolumePerturb(const Waveform& w, Rng* rng);

struct WordBoundary {
  double start = 0.0;  // seconds
  double end = 0.0;
};

struct AudioSegment {
  Waveform audio;
  double offset = 0.0;  // seconds into the source
};

// Greedy packing of consecutive words into segments of at most
// `target` seconds, cutting only at word boundaries. A single word
// longer than target forms its own segment.
std::vector<AudioSegment> SegmentAudio(const Waveform& w,
                                       const std::vector<WordBoundary>& words,
                                       double target = 10.0);

struct NoiseMixPolicy {
  double snr_mean_db = 10.0;
  double snr_std_db = 5.0;
  double snr_min_db = 0.0;
  double snr_max_db = 20.0;
  int copies = 2;
};

// Tiles or trims the clip to the utterance length, draws a target SNR
// from N(mean, std) clamped to [min, max], scales the clip so the
// mean-square power ratio hits the target, and adds. Returns the mix
// and the target SNR in dB.
std::pair<Waveform, double> MixNoise(const Waveform& utt,
                                     const Waveform& clip,
                                     const NoiseMixPolicy& policy, Rng* rng);

struct SpecAugmentPolicy {
  int freq_masks = 2;   // m_F
  int freq_width = 15;  // F, bins
  int time_masks = 0;   // m_T; 0 disables time masking
  int time_width = 0;   // T, frames
};

struct SpecAugmentResult {
  Spectrogram spec;
  // Applied masks as (start, width); frequency masks span all frames
  // and time masks span all bins.
  std::vector<std::pair<int, int>> freq_masks;
  std::vector<std::pair<int, int>> time_masks;
};

// Width drawn from the closed range [0, F], start from the half-open
// [0, bins - width); masked cells become the pre-mask spectrogram mean.
SpecAugmentResult SpecAugment(const Spectrogram& s,
                              const SpecAugmentPolicy& policy, Rng* rng);

}  // namespace gasr

#endif  // GASR_SIGNAL_HPP_
