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

#ifndef GASR_MANIFEST_HPP_
#define GASR_MANIFEST_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gasr/signal.hpp"
#include "gasr/wav_io.hpp"

namespace gasr {

// One utterance. The provenance chain is either "orig" or
// "<source row id>|op|op..." where ops are "speed:<factor>",
// "noise:<copy>" and "volume"; replaying the chain with the row's seed
// reproduces the waveform bit for bit.
struct ManifestRow {
  std::string id;
  std::string audio_path;
  std::string transcript;
  std::string language;
  std::string category;  // clean | noisy | xtrm1 | xtrm2
  std::string provenance = "orig";
  uint64_t seed = 0;
};

bool IsValidCategory(const std::string& category);

struct Manifest {
  std::vector<ManifestRow> rows;
  // Rendered as leading "# key<TAB>value" lines; carries tags such as
  // the online SpecAugment policy.
  std::map<std::string, std::string> annotations;

  const ManifestRow& RowById(const std::string& id) const;

  std::string ToText() const;
  static Manifest FromText(const std::string& text);
  void Save(const std::string& path) const;
  static Manifest Load(const std::string& path);
};

struct ExpandOptions {
  bool speed = false;
  int noise_copies = 0;
  bool specaugment = false;
  SpecAugmentPolicy specaugment_policy;
  uint64_t base_seed = 0;
  // Directory recorded as the audio_path of derived rows.
  std::string audio_dir = "augmented";
};

// Speed triples every row (factors 0.9, 1.0, 1.1; the 1.0 row is the
// original passed through); noise then adds `noise_copies` variants of
// every current row. SpecAugment is an online transform and only gets
// an annotation. With everything off the manifest returns unchanged.
Manifest ExpandManifest(const Manifest& in, const ExpandOptions& opts);

// Noise clips for mixing, loaded from a directory in sorted filename
// order so clip indices are stable.
struct NoisePool {
  std::vector<std::string> paths;
  std::vector<Waveform> clips;

  static NoisePool FromDirectory(const std::string& dir);
};

// Replays a row's provenance chain: resolves the source row, applies
// the ops in order with a fresh Rng seeded by row.seed. Rows with
// provenance "orig" read their own audio_path.
Waveform MaterializeRow(const Manifest& manifest, const ManifestRow& row,
                        const NoisePool& pool, const NoiseMixPolicy& policy);

}  // namespace gasr

#endif  // GASR_MANIFEST_HPP_
