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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "gasr/common.hpp"

namespace gasr {

namespace {

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string* out, uint32_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
  out->push_back(static_cast<char>((v >> 16) & 0xff));
  out->push_back(static_cast<char>((v >> 24) & 0xff));
}

void PutU16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Waveform ReadWav(const std::string& path) {
  std::string raw = ReadFileText(path);
  const uint8_t* data = reinterpret_cast<const uint8_t*>(raw.data());
  size_t size = raw.size();
  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0)
    throw StageInputError(path + ": not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const uint8_t* samples = nullptr;
  uint32_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= size) {
    const uint8_t* chunk = data + pos;
    uint32_t chunk_size = ReadU32(chunk + 4);
    const uint8_t* body = chunk + 8;
    if (pos + 8 + chunk_size > size)
      throw StageInputError(path + ": truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw StageInputError(path + ": short fmt chunk");
      format = ReadU16(body);
      channels = ReadU16(body + 2);
      rate = ReadU32(body + 4);
      bits = ReadU16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      samples = body;
      data_size = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || samples == nullptr)
    throw StageInputError(path + ": missing fmt or data chunk");
  if (channels != 1)
    throw StageInputError(path + ": expected mono audio, got " +
                          std::to_string(channels) + " channels");
  if (rate == 0) throw StageInputError(path + ": zero sample rate");

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  if (format == 1 && bits == 16) {
    size_t n = data_size / 2;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t v;
      std::memcpy(&v, samples + 2 * i, 2);
      // Mirror the writer's scale; only -32768 needs the clamp.
      w.samples[i] = std::max(-1.0, static_cast<double>(v) / 32767.0);
    }
  } else if (format == 3 && bits == 32) {
    size_t n = data_size / 4;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, samples + 4 * i, 4);
      w.samples[i] = static_cast<double>(v);
    }
  } else {
    throw StageInputError(path + ": unsupported encoding (format " +
                          std::to_string(format) + ", " +
                          std::to_string(bits) + " bits)");
  }
  for (double v : w.samples)
    if (!std::isfinite(v))
      throw StageInputError(path + ": non-finite sample value");
  return w;
}

void WriteWav(const Waveform& w, const std::string& path, WavFormat format) {
  for (double v : w.samples)
    if (!std::isfinite(v)) throw Error("WriteWav: non-finite sample value");
  if (w.sample_rate <= 0) throw Error("WriteWav: non-positive sample rate");

  bool pcm = format == WavFormat::kPcm16;
  uint16_t bytes_per_sample = pcm ? 2 : 4;
  uint32_t data_size =
      static_cast<uint32_t>(w.samples.size()) * bytes_per_sample;

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  PutU32(&out, 36 + data_size);
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, pcm ? 1 : 3);
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<uint32_t>(w.sample_rate));
  PutU32(&out, static_cast<uint32_t>(w.sample_rate) * bytes_per_sample);
  PutU16(&out, bytes_per_sample);
  PutU16(&out, pcm ? 16 : 32);
  out += "data";
  PutU32(&out, data_size);
  for (double v : w.samples) {
    double clamped = std::clamp(v, -1.0, 1.0);
    if (pcm) {
      int s = static_cast<int>(std::lround(clamped * 32767.0));
      PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(s)));
    } else {
      float f = static_cast<float>(clamped);
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      PutU32(&out, bits);
    }
  }
  WriteFileText(path, out);
}

}  // namespace gasr
