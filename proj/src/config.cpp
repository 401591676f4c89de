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

#include "gasr/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "gasr/common.hpp"
#include "gasr/grapheme_set.hpp"

namespace gasr {

std::string PipelineConfig::SpecificLanguage() const {
  const std::string prefix = "specific:";
  if (mode.rfind(prefix, 0) == 0) return mode.substr(prefix.size());
  return "";
}

namespace {

void CheckKeys(const YAML::Node& node, const std::string& where,
               const std::set<std::string>& known) {
  for (const auto& kv : node) {
    std::string key = kv.first.as<std::string>();
    if (known.count(key) == 0)
      throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void ReadScalar(const YAML::Node& section, const std::string& where,
                const char* key, T* out) {
  const YAML::Node& node = section[key];
  if (!node) return;
  try {
    *out = node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config: bad value for '" + where + "." + key + "'");
  }
}

std::string ResolvePath(const std::string& path,
                        const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

bool ParseEnvBool(const std::string& value, bool* out) {
  if (value == "1" || value == "true" || value == "yes") {
    *out = true;
    return true;
  }
  if (value == "0" || value == "false" || value == "no") {
    *out = false;
    return true;
  }
  return false;
}

template <typename T, typename Parse>
void EnvOverride(const char* name, T* out, Parse parse,
                 std::vector<std::string>* errors) {
  const char* value = std::getenv(name);
  if (value == nullptr) return;
  if (!parse(std::string(value), out))
    errors->push_back(std::string(name) + ": cannot parse '" + value + "'");
}

bool ParseEnvInt(const std::string& s, int* out) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) return false;
    *out = v;
    return true;
  } catch (...) {
    return false;
  }
}

bool ParseEnvU64(const std::string& s, uint64_t* out) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) return false;
    *out = v;
    return true;
  } catch (...) {
    return false;
  }
}

bool ParseEnvDouble(const std::string& s, double* out) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) return false;
    *out = v;
    return true;
  } catch (...) {
    return false;
  }
}

bool ParseEnvString(const std::string& s, std::string* out) {
  *out = s;
  return true;
}

bool ParseEnvBoolWrap(const std::string& s, bool* out) {
  return ParseEnvBool(s, out);
}

}  // namespace

PipelineConfig ParseConfig(const std::string& yaml_text,
                           const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: YAML parse error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  CheckKeys(root, "config",
            {"seed", "mode", "languages", "lm", "tree", "audio", "augment",
             "decoder", "graph"});

  PipelineConfig config;
  ReadScalar(root, "config", "seed", &config.seed);
  ReadScalar(root, "config", "mode", &config.mode);

  if (root["languages"]) {
    const YAML::Node& langs = root["languages"];
    if (!langs.IsSequence())
      throw ConfigError("config: 'languages' must be a sequence");
    for (const YAML::Node& entry : langs) {
      if (!entry.IsMap())
        throw ConfigError("config: each language must be a mapping");
      CheckKeys(entry, "languages[]", {"tag", "ranges", "corpus"});
      LanguageConfig lang;
      ReadScalar(entry, "languages[]", "tag", &lang.tag);
      ReadScalar(entry, "languages[]", "corpus", &lang.corpus);
      lang.corpus = ResolvePath(lang.corpus, base_dir);
      if (entry["ranges"]) {
        if (!entry["ranges"].IsSequence())
          throw ConfigError("config: 'ranges' must be a sequence for "
                            "language '" + lang.tag + "'");
        for (const YAML::Node& r : entry["ranges"])
          lang.ranges.push_back(r.as<std::string>());
      }
      config.languages.push_back(std::move(lang));
    }
  }

  if (root["lm"]) {
    CheckKeys(root["lm"], "lm", {"order", "discount"});
    ReadScalar(root["lm"], "lm", "order", &config.lm.order);
    ReadScalar(root["lm"], "lm", "discount", &config.lm.discount);
  }
  if (root["tree"]) {
    CheckKeys(root["tree"], "tree",
              {"max_leaves", "min_gain", "topology", "feature_dim"});
    ReadScalar(root["tree"], "tree", "max_leaves", &config.tree.max_leaves);
    ReadScalar(root["tree"], "tree", "min_gain", &config.tree.min_gain);
    ReadScalar(root["tree"], "tree", "topology", &config.tree.topology);
    ReadScalar(root["tree"], "tree", "feature_dim", &config.tree.feature_dim);
  }
  if (root["audio"]) {
    CheckKeys(root["audio"], "audio",
              {"sample_rate", "frame_length", "frame_shift", "mel_bins"});
    ReadScalar(root["audio"], "audio", "sample_rate",
               &config.audio.sample_rate);
    ReadScalar(root["audio"], "audio", "frame_length",
               &config.audio.frame_length);
    ReadScalar(root["audio"], "audio", "frame_shift",
               &config.audio.frame_shift);
    ReadScalar(root["audio"], "audio", "mel_bins", &config.audio.mel_bins);
  }
  if (root["augment"]) {
    CheckKeys(root["augment"], "augment",
              {"speed", "noise_copies", "snr_mean", "snr_std", "specaugment",
               "freq_masks", "freq_width", "time_masks", "time_width"});
    ReadScalar(root["augment"], "augment", "speed", &config.augment.speed);
    ReadScalar(root["augment"], "augment", "noise_copies",
               &config.augment.noise_copies);
    ReadScalar(root["augment"], "augment", "snr_mean",
               &config.augment.snr_mean);
    ReadScalar(root["augment"], "augment", "snr_std", &config.augment.snr_std);
    ReadScalar(root["augment"], "augment", "specaugment",
               &config.augment.specaugment);
    ReadScalar(root["augment"], "augment", "freq_masks",
               &config.augment.freq_masks);
    ReadScalar(root["augment"], "augment", "freq_width",
               &config.augment.freq_width);
    ReadScalar(root["augment"], "augment", "time_masks",
               &config.augment.time_masks);
    ReadScalar(root["augment"], "augment", "time_width",
               &config.augment.time_width);
  }
  if (root["decoder"]) {
    CheckKeys(root["decoder"], "decoder",
              {"beam", "acoustic_scale", "margin", "noise",
               "frames_per_state"});
    ReadScalar(root["decoder"], "decoder", "beam", &config.decoder.beam);
    ReadScalar(root["decoder"], "decoder", "acoustic_scale",
               &config.decoder.acoustic_scale);
    ReadScalar(root["decoder"], "decoder", "margin", &config.decoder.margin);
    ReadScalar(root["decoder"], "decoder", "noise", &config.decoder.noise);
    ReadScalar(root["decoder"], "decoder", "frames_per_state",
               &config.decoder.frames_per_state);
  }
  if (root["graph"]) {
    CheckKeys(root["graph"], "graph", {"silence_weight", "max_det_states"});
    ReadScalar(root["graph"], "graph", "silence_weight",
               &config.graph.silence_weight);
    ReadScalar(root["graph"], "graph", "max_det_states",
               &config.graph.max_det_states);
  }
  return config;
}

void ApplyEnvOverrides(PipelineConfig* config,
                       std::vector<std::string>* errors) {
  EnvOverride("GF_SEED", &config->seed, ParseEnvU64, errors);
  EnvOverride("GF_MODE", &config->mode, ParseEnvString, errors);
  EnvOverride("GF_LM_ORDER", &config->lm.order, ParseEnvInt, errors);
  EnvOverride("GF_LM_DISCOUNT", &config->lm.discount, ParseEnvDouble, errors);
  EnvOverride("GF_TREE_MAX_LEAVES", &config->tree.max_leaves, ParseEnvInt,
              errors);
  EnvOverride("GF_TREE_MIN_GAIN", &config->tree.min_gain, ParseEnvDouble,
              errors);
  EnvOverride("GF_TREE_TOPOLOGY", &config->tree.topology, ParseEnvInt,
              errors);
  EnvOverride("GF_TREE_FEATURE_DIM", &config->tree.feature_dim, ParseEnvInt,
              errors);
  EnvOverride("GF_AUDIO_SAMPLE_RATE", &config->audio.sample_rate,
              ParseEnvInt, errors);
  EnvOverride("GF_AUDIO_FRAME_LENGTH", &config->audio.frame_length,
              ParseEnvDouble, errors);
  EnvOverride("GF_AUDIO_FRAME_SHIFT", &config->audio.frame_shift,
              ParseEnvDouble, errors);
  EnvOverride("GF_AUDIO_MEL_BINS", &config->audio.mel_bins, ParseEnvInt,
              errors);
  EnvOverride("GF_AUGMENT_SPEED", &config->augment.speed, ParseEnvBoolWrap,
              errors);
  EnvOverride("GF_AUGMENT_NOISE_COPIES", &config->augment.noise_copies,
              ParseEnvInt, errors);
  EnvOverride("GF_AUGMENT_SNR_MEAN", &config->augment.snr_mean,
              ParseEnvDouble, errors);
  EnvOverride("GF_AUGMENT_SNR_STD", &config->augment.snr_std, ParseEnvDouble,
              errors);
  EnvOverride("GF_AUGMENT_SPECAUGMENT", &config->augment.specaugment,
              ParseEnvBoolWrap, errors);
  EnvOverride("GF_AUGMENT_FREQ_MASKS", &config->augment.freq_masks,
              ParseEnvInt, errors);
  EnvOverride("GF_AUGMENT_FREQ_WIDTH", &config->augment.freq_width,
              ParseEnvInt, errors);
  EnvOverride("GF_AUGMENT_TIME_MASKS", &config->augment.time_masks,
              ParseEnvInt, errors);
  EnvOverride("GF_AUGMENT_TIME_WIDTH", &config->augment.time_width,
              ParseEnvInt, errors);
  EnvOverride("GF_DECODER_BEAM", &config->decoder.beam, ParseEnvDouble,
              errors);
  EnvOverride("GF_DECODER_ACOUSTIC_SCALE", &config->decoder.acoustic_scale,
              ParseEnvDouble, errors);
  EnvOverride("GF_DECODER_MARGIN", &config->decoder.margin, ParseEnvDouble,
              errors);
  EnvOverride("GF_DECODER_NOISE", &config->decoder.noise, ParseEnvDouble,
              errors);
  EnvOverride("GF_DECODER_FRAMES_PER_STATE",
              &config->decoder.frames_per_state, ParseEnvInt, errors);
  EnvOverride("GF_GRAPH_SILENCE_WEIGHT", &config->graph.silence_weight,
              ParseEnvDouble, errors);
  EnvOverride("GF_GRAPH_MAX_DET_STATES", &config->graph.max_det_states,
              ParseEnvInt, errors);
}

std::vector<std::string> ConfigViolations(const PipelineConfig& config) {
  std::vector<std::string> v;
  if (config.languages.empty())
    v.push_back("languages: at least one language required");

  std::set<std::string> tags;
  for (const LanguageConfig& lang : config.languages) {
    std::string where = "languages[" + lang.tag + "]";
    if (lang.tag.empty())
      v.push_back("languages: empty tag");
    else if (!tags.insert(lang.tag).second)
      v.push_back("languages: duplicate tag '" + lang.tag + "'");
    if (lang.ranges.empty()) v.push_back(where + ": no codepoint ranges");
    std::vector<CodepointRange> parsed;
    for (const std::string& text : lang.ranges) {
      try {
        parsed.push_back(ParseCodepointRange(text));
      } catch (const Error& e) {
        v.push_back(where + ": " + e.what());
      }
    }
    std::sort(parsed.begin(), parsed.end(),
              [](const CodepointRange& a, const CodepointRange& b) {
                return a.lo < b.lo;
              });
    for (size_t i = 1; i < parsed.size(); ++i) {
      if (parsed[i].lo <= parsed[i - 1].hi)
        v.push_back(where + ": overlapping codepoint ranges");
    }
    if (lang.corpus.empty())
      v.push_back(where + ": no corpus path");
    else if (!std::filesystem::exists(lang.corpus))
      v.push_back(where + ": corpus not found: " + lang.corpus);
  }

  if (config.mode != "independent") {
    std::string tag = config.SpecificLanguage();
    if (tag.empty())
      v.push_back("mode: must be 'independent' or 'specific:<tag>', got '" +
                  config.mode + "'");
    else if (tags.count(tag) == 0)
      v.push_back("mode: unknown language '" + tag + "'");
  }

  if (config.lm.order < 1) v.push_back("lm.order: must be >= 1");
  if (config.lm.discount < 0.0 || config.lm.discount >= 1.0)
    v.push_back("lm.discount: must be in [0, 1)");

  if (config.tree.max_leaves < 1) v.push_back("tree.max_leaves: must be >= 1");
  if (config.tree.min_gain < 0.0) v.push_back("tree.min_gain: must be >= 0");
  if (config.tree.topology < 1) v.push_back("tree.topology: must be >= 1");
  if (config.tree.feature_dim < 1)
    v.push_back("tree.feature_dim: must be >= 1");

  if (config.audio.sample_rate < 1)
    v.push_back("audio.sample_rate: must be >= 1");
  if (config.audio.frame_length <= 0.0)
    v.push_back("audio.frame_length: must be positive");
  if (config.audio.frame_shift <= 0.0)
    v.push_back("audio.frame_shift: must be positive");
  if (config.audio.mel_bins < 1) v.push_back("audio.mel_bins: must be >= 1");

  if (config.augment.noise_copies < 0)
    v.push_back("augment.noise_copies: must be >= 0");
  if (config.augment.snr_std < 0.0)
    v.push_back("augment.snr_std: must be >= 0");
  if (config.augment.freq_masks < 0)
    v.push_back("augment.freq_masks: must be >= 0");
  if (config.augment.freq_width < 0)
    v.push_back("augment.freq_width: must be >= 0");
  if (config.augment.time_masks < 0)
    v.push_back("augment.time_masks: must be >= 0");
  if (config.augment.time_width < 0)
    v.push_back("augment.time_width: must be >= 0");

  if (config.decoder.beam <= 0.0) v.push_back("decoder.beam: must be positive");
  if (config.decoder.acoustic_scale <= 0.0)
    v.push_back("decoder.acoustic_scale: must be positive");
  if (config.decoder.margin <= 0.0)
    v.push_back("decoder.margin: must be positive");
  if (config.decoder.noise < 0.0) v.push_back("decoder.noise: must be >= 0");
  if (config.decoder.frames_per_state < 1)
    v.push_back("decoder.frames_per_state: must be >= 1");

  if (config.graph.silence_weight < 0.0)
    v.push_back("graph.silence_weight: must be >= 0");
  if (config.graph.max_det_states < 1)
    v.push_back("graph.max_det_states: must be >= 1");
  return v;
}

void ValidateConfig(const PipelineConfig& config) {
  std::vector<std::string> violations = ConfigViolations(config);
  if (violations.empty()) return;
  std::string message = "config: " +
                        std::to_string(violations.size()) + " violation(s)";
  for (const std::string& item : violations) message += "\n  " + item;
  throw ConfigError(message);
}

PipelineConfig LoadConfig(const std::string& path) {
  std::string text;
  try {
    text = ReadFileText(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::string base_dir = std::filesystem::path(path).parent_path().string();
  PipelineConfig config = ParseConfig(text, base_dir);
  std::vector<std::string> errors;
  ApplyEnvOverrides(&config, &errors);
  if (!errors.empty()) {
    std::string message = "config: bad environment override(s)";
    for (const std::string& item : errors) message += "\n  " + item;
    throw ConfigError(message);
  }
  ValidateConfig(config);
  return config;
}

}  // namespace gasr
