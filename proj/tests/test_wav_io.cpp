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

#include "gasr/wav_io.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "gasr/common.hpp"
#include "temp_dir.hpp"

using namespace gasr;
using gasr_tests::TempDir;

namespace {

Waveform Ramp(int n, int rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (int i = 0; i < n; ++i)
    w.samples[i] = -1.0 + 2.0 * i / (n - 1);
  return w;
}

}  // namespace

TEST_CASE("wav: pcm16 round trip quantizes to half a step") {
  TempDir tmp;
  auto w = Ramp(1000);
  std::string path = tmp.File("a.wav");
  WriteWav(w, path);
  Waveform back = ReadWav(path);
  CHECK(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - w.samples[i]) <= 1.0 / 32767.0);
}

TEST_CASE("wav: float32 round trip is near exact") {
  TempDir tmp;
  auto w = Ramp(377, 22050);
  std::string path = tmp.File("f.wav");
  WriteWav(w, path, WavFormat::kFloat32);
  Waveform back = ReadWav(path);
  CHECK(back.sample_rate == 22050);
  REQUIRE(back.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i)
    CHECK(back.samples[i] ==
          doctest::Approx(w.samples[i]).epsilon(1e-7));
  CHECK(back.DurationSeconds() == doctest::Approx(377.0 / 22050.0));
}

TEST_CASE("wav: out of range samples clamp at export") {
  TempDir tmp;
  Waveform w;
  w.samples = {1.5, -2.0, 0.25};
  std::string path = tmp.File("c.wav");
  WriteWav(w, path, WavFormat::kFloat32);
  Waveform back = ReadWav(path);
  CHECK(back.samples[0] == doctest::Approx(1.0));
  CHECK(back.samples[1] == doctest::Approx(-1.0));
  CHECK(back.samples[2] == doctest::Approx(0.25));
}

TEST_CASE("wav: write rejects bad input") {
  TempDir tmp;
  Waveform w;
  w.samples = {0.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_WITH_AS(WriteWav(w, tmp.File("n.wav")),
                       doctest::Contains("non-finite"), Error);
  Waveform bad_rate;
  bad_rate.samples = {0.0};
  bad_rate.sample_rate = 0;
  CHECK_THROWS_AS(WriteWav(bad_rate, tmp.File("r.wav")), Error);
}

TEST_CASE("wav: read rejects malformed files") {
  TempDir tmp;
  CHECK_THROWS_AS(ReadWav(tmp.File("missing.wav")), Error);

  std::string garbage = tmp.File("g.wav");
  WriteFileText(garbage, "not audio at all");
  CHECK_THROWS_WITH_AS(ReadWav(garbage), doctest::Contains("RIFF"),
                       StageInputError);

  // A valid header whose data chunk claims more bytes than exist.
  auto w = Ramp(100);
  std::string path = tmp.File("t.wav");
  WriteWav(w, path);
  std::string content = ReadFileText(path);
  content.resize(content.size() - 50);
  std::string truncated = tmp.File("trunc.wav");
  WriteFileText(truncated, content);
  CHECK_THROWS_WITH_AS(ReadWav(truncated), doctest::Contains("truncated"),
                       StageInputError);
}

TEST_CASE("wav: read rejects stereo") {
  TempDir tmp;
  auto w = Ramp(64);
  std::string path = tmp.File("s.wav");
  WriteWav(w, path);
  std::string content = ReadFileText(path);
  // Channel count lives two bytes into the fmt body.
  REQUIRE(content.substr(12, 4) == "fmt ");
  content[22] = 2;
  std::string stereo = tmp.File("stereo.wav");
  WriteFileText(stereo, content);
  CHECK_THROWS_WITH_AS(ReadWav(stereo), doctest::Contains("mono"),
                       StageInputError);
}
