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

#ifndef GASR_CONFIG_HPP_
#define GASR_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace gasr {

struct LanguageConfig {
  std::string tag;
  std::vector<std::string> ranges;  // "U+XXXX-U+XXXX" codepoint ranges
  std::string corpus;               // text corpus, one sentence per line
};

// One config file drives every stage. Sections mirror the pipeline;
// every value has a default so a minimal config only lists languages.
struct PipelineConfig {
  uint64_t seed = 1;
  // "independent" decodes with the full multilingual vocabulary;
  // "specific:<tag>" restricts the lexicon and LM to one language.
  std::string mode = "independent";
  std::vector<LanguageConfig> languages;

  struct Lm {
    int order = 2;
    double discount = 0.5;
  } lm;

  struct Tree {
    int max_leaves = 500;
    double min_gain = 200.0;
    int topology = 1;     // positions per tri-grapheme unit
    int feature_dim = 8;  // synthetic feature dimension
  } tree;

  struct Audio {
    int sample_rate = 16000;
    double frame_length = 0.025;  // seconds
    double frame_shift = 0.010;
    int mel_bins = 80;
  } audio;

  struct Augment {
    bool speed = false;
    int noise_copies = 0;
    double snr_mean = 10.0;  // dB
    double snr_std = 5.0;
    bool specaugment = false;
    int freq_masks = 2;
    int freq_width = 15;
    int time_masks = 0;
    int time_width = 0;
  } augment;

  struct Decoder {
    double beam = 1e9;
    double acoustic_scale = 1.0;
    double margin = 4.0;  // oracle scorer separation
    double noise = 0.0;   // oracle scorer noise amplitude
    int frames_per_state = 3;
  } decoder;

  struct Graph {
    double silence_weight = 0.6931471805599453;  // -ln P(sil), ln 2
    int max_det_states = 1000000;
  } graph;

  // The tag behind "specific:", empty in independent mode.
  std::string SpecificLanguage() const;
};

// Parses the YAML text. Relative corpus paths resolve against
// base_dir. Malformed YAML, unknown keys, and type mismatches throw
// ConfigError; range semantics are checked later by ValidateConfig.
PipelineConfig ParseConfig(const std::string& yaml_text,
                           const std::string& base_dir);

// Applies GF_SEED, GF_MODE, and GF_<SECTION>_<KEY> environment
// overrides. Unparsable values append to *errors.
void ApplyEnvOverrides(PipelineConfig* config,
                       std::vector<std::string>* errors);

// Every violated constraint, one message each; empty when valid.
std::vector<std::string> ConfigViolations(const PipelineConfig& config);

// Throws one ConfigError listing every violation.
void ValidateConfig(const PipelineConfig& config);

// Read + parse + env overrides + validation in one step.
PipelineConfig LoadConfig(const std::string& path);

}  // namespace gasr

#endif  // GASR_CONFIG_HPP_
