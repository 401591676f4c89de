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

#include "gasr/manifest.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <set>

#include "gasr/common.hpp"

namespace gasr {

bool IsValidCategory(const std::string& category) {
  return category == "clean" || category == "noisy" || category == "xtrm1" ||
         category == "xtrm2";
}

const ManifestRow& Manifest::RowById(const std::string& id) const {
  for (const ManifestRow& row : rows)
    if (row.id == id) return row;
  throw StageInputError("manifest: no row with id '" + id + "'");
}

std::string Manifest::ToText() const {
  std::string out;
  for (const auto& [key, value] : annotations)
    out += "# " + key + "\t" + value + "\n";
  char seed_buf[32];
  for (const ManifestRow& row : rows) {
    for (const std::string* field :
         {&row.id, &row.audio_path, &row.transcript, &row.language,
          &row.category, &row.provenance})
      if (field->find('\t') != std::string::npos ||
          field->find('\n') != std::string::npos)
        throw Error("manifest: field contains a tab or newline in row '" +
                    row.id + "'");
    std::snprintf(seed_buf, sizeof(seed_buf), "%" PRIu64, row.seed);
    out += row.id + "\t" + row.audio_path + "\t" + row.transcript + "\t" +
           row.language + "\t" + row.category + "\t" + row.provenance +
           "\t" + seed_buf + "\n";
  }
  return out;
}

Manifest Manifest::FromText(const std::string& text) {
  Manifest m;
  std::set<std::string> seen;
  size_t lineno = 0;
  for (const std::string& line : SplitString(text, '\n')) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      std::vector<std::string> kv = SplitString(body, '\t');
      if (kv.size() != 2)
        throw StageInputError("manifest line " + std::to_string(lineno) +
                              ": bad annotation");
      m.annotations[kv[0]] = kv[1];
      continue;
    }
    std::vector<std::string> f = SplitString(line, '\t', true);
    if (f.size() != 7)
      throw StageInputError("manifest line " + std::to_string(lineno) +
                            ": expected 7 tab-separated fields, got " +
                            std::to_string(f.size()));
    ManifestRow row;
    row.id = f[0];
    row.audio_path = f[1];
    row.transcript = f[2];
    row.language = f[3];
    row.category = f[4];
    row.provenance = f[5];
    row.seed = std::strtoull(f[6].c_str(), nullptr, 10);
    if (row.id.empty())
      throw StageInputError("manifest line " + std::to_string(lineno) +
                            ": empty id");
    if (!IsValidCategory(row.category))
      throw StageInputError("manifest line " + std::to_string(lineno) +
                            ": unknown category '" + row.category + "'");
    if (!seen.insert(row.id).second)
      throw StageInputError("manifest line " + std::to_string(lineno) +
                            ": duplicate id '" + row.id + "'");
    m.rows.push_back(std::move(row));
  }
  return m;
}

void Manifest::Save(const std::string& path) const {
  WriteFileText(path, ToText());
}

Manifest Manifest::Load(const std::string& path) {
  return FromText(ReadFileText(path));
}

namespace {

std::string FormatFactor(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", f);
  return buf;
}

}  // namespace

Manifest ExpandManifest(const Manifest& in, const ExpandOptions& opts) {
  bool specaug_active = opts.specaugment &&
                        (opts.specaugment_policy.freq_masks > 0 ||
                         opts.specaugment_policy.time_masks > 0);
  if (!opts.speed && opts.noise_copies <= 0 && !specaug_active) return in;

  Manifest out;
  out.annotations = in.annotations;
  if (specaug_active) {
    const SpecAugmentPolicy& p = opts.specaugment_policy;
    out.annotations["specaugment"] =
        "online freq_masks=" + std::to_string(p.freq_masks) +
        " freq_width=" + std::to_string(p.freq_width) +
        " time_masks=" + std::to_string(p.time_masks) +
        " time_width=" + std::to_string(p.time_width);
  }

  std::vector<double> factors =
      opts.speed ? std::vector<double>{0.9, 1.0, 1.1}
                 : std::vector<double>{1.0};
  for (const ManifestRow& row : in.rows) {
    std::vector<ManifestRow> group;
    for (double factor : factors) {
      if (factor == 1.0) {
        group.push_back(row);
        continue;
      }
      ManifestRow sp = row;
      sp.id = row.id + "-sp" + FormatFactor(factor);
      sp.audio_path = opts.audio_dir + "/" + sp.id + ".wav";
      sp.provenance = row.id + "|speed:" + FormatFactor(factor);
      sp.seed = DeriveSeed(opts.base_seed, sp.id);
      group.push_back(std::move(sp));
    }
    for (const ManifestRow& base : group) {
      out.rows.push_back(base);
      for (int k = 1; k <= opts.noise_copies; ++k) {
        ManifestRow nz = base;
        nz.id = base.id + "-n" + std::to_string(k);
        nz.audio_path = opts.audio_dir + "/" + nz.id + ".wav";
        nz.provenance = base.id + "|noise:" + std::to_string(k);
        nz.seed = DeriveSeed(opts.base_seed, nz.id);
        out.rows.push_back(std::move(nz));
      }
    }
  }
  return out;
}

NoisePool NoisePool::FromDirectory(const std::string& dir) {
  NoisePool pool;
  if (!std::filesystem::is_directory(dir))
    throw StageInputError("noise pool: '" + dir + "' is not a directory");
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      pool.paths.push_back(entry.path().string());
  std::sort(pool.paths.begin(), pool.paths.end());
  for (const std::string& path : pool.paths)
    pool.clips.push_back(ReadWav(path));
  return pool;
}

Waveform MaterializeRow(const Manifest& manifest, const ManifestRow& row,
                        const NoisePool& pool, const NoiseMixPolicy& policy) {
  if (row.provenance == "orig" || row.provenance.empty())
    return ReadWav(row.audio_path);

  std::vector<std::string> ops = SplitString(row.provenance, '|');
  Waveform w = MaterializeRow(manifest, manifest.RowById(ops[0]), pool,
                              policy);
  Rng rng(row.seed);
  for (size_t i = 1; i < ops.size(); ++i) {
    const std::string& op = ops[i];
    if (op.rfind("speed:", 0) == 0) {
      w = SpeedPerturb(w, std::strtod(op.c_str() + 6, nullptr));
    } else if (op.rfind("noise:", 0) == 0) {
      if (pool.clips.empty())
        throw StageInputError("materialize '" + row.id +
                              "': empty noise pool");
      int idx = rng.UniformInt(0, static_cast<int>(pool.clips.size()) - 1);
      w = MixNoise(w, pool.clips[idx], policy, &rng).first;
    } else if (op == "volume") {
      w = VolumePerturb(w, &rng).first;
    } else {
      throw StageInputError("materialize '" + row.id +
                            "': unknown provenance op '" + op + "'");
    }
  }
  return w;
}

}  // namespace gasr
