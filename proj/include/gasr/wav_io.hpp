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

#ifndef GASR_WAV_IO_HPP_
#define GASR_WAV_IO_HPP_

#include <string>
#include <vector>

namespace gasr {

// Mono audio, nominal sample range [-1, 1]. Intermediate processing may
// exceed the range; clamping happens only at file export.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WavFormat { kPcm16, kFloat32 };

// Mono RIFF/WAVE only; PCM 16-bit or IEEE float32. Multi-channel or
// other encodings are rejected.
Waveform ReadWav(const std::string& path);
void WriteWav(const Waveform& w, const std::string& path,
              WavFormat format = WavFormat::kPcm16);

}  // namespace gasr

#endif  // GASR_WAV_IO_HPP_
