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

// Pipeline driver. Every stage reads the shared config, consumes the
// artifacts of earlier stages out of the work directory, and writes its
// own directory plus a MANIFEST of content hashes, so a rerun with the
// same seed is byte-identical and verifiable.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "gasr/common.hpp"
#include "gasr/config.hpp"
#include "gasr/context_tree.hpp"
#include "gasr/decoder.hpp"
#include "gasr/eval.hpp"
#include "gasr/graph_builder.hpp"
#include "gasr/grapheme_set.hpp"
#include "gasr/lexicon.hpp"
#include "gasr/manifest.hpp"
#include "gasr/ngram_lm.hpp"
#include "gasr/rng.hpp"
#include "gasr/signal.hpp"
#include "gasr/utf8.hpp"
#include "gasr/wav_io.hpp"
#include "gasr/wfst.hpp"

namespace fs = std::filesystem;
using namespace gasr;

namespace {

struct StageContext {
  PipelineConfig config;
  fs::path work;
  bool dry_run = false;
  int jobs = 1;
};

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void RequireArtifact(const fs::path& path, const std::string& stage) {
  if (!fs::exists(path))
    throw StageInputError("missing artifact " + path.generic_string() +
                          "; run `gasr " + stage + "` first");
}

// Fresh stage directory; stale files from earlier runs never leak into
// the MANIFEST.
fs::path PrepareStageDir(const StageContext& ctx, const std::string& stage) {
  fs::path dir = ctx.work / stage;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void WriteStageManifest(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    std::string rel = fs::relative(item.path(), dir).generic_string();
    if (rel == "MANIFEST") continue;
    entries.emplace_back(rel, HashHex(HashFile(item.path().string())));
  }
  std::sort(entries.begin(), entries.end());
  std::string text;
  for (const auto& [rel, hash] : entries) text += rel + "\t" + hash + "\n";
  WriteFileText((dir / "MANIFEST").string(), text);
}

// jobs <= 1 runs inline; otherwise a worker pool pulls indices off an
// atomic counter. The first failing index wins, so error reporting does
// not depend on thread timing.
void RunParallel(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> failures(count);
  std::vector<std::thread> pool;
  int workers = std::min(jobs, count);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (int i = 0; i < count; ++i)
    if (failures[i]) std::rethrow_exception(failures[i]);
}

std::vector<std::string> CorpusSentences(const std::string& path) {
  std::vector<std::string> sentences;
  for (const std::string& line : ReadLines(path)) {
    if (!SplitWhitespace(line).empty()) sentences.push_back(line);
  }
  return sentences;
}

// Sorted distinct tokens of a corpus.
std::vector<std::string> CorpusVocabulary(const std::string& path) {
  std::set<std::string> vocab;
  for (const std::string& line : ReadLines(path))
    for (const std::string& token : SplitWhitespace(line)) vocab.insert(token);
  return std::vector<std::string>(vocab.begin(), vocab.end());
}

std::string RejectionsToText(const std::string& tag,
                             const std::vector<RejectedWord>& rejected) {
  std::string text;
  for (const RejectedWord& r : rejected) {
    std::string points;
    for (char32_t cp : r.uncovered) {
      if (!points.empty()) points += ",";
      points += CodepointNotation(cp);
    }
    text += tag + "\t" + r.word + "\t" + points + "\n";
  }
  return text;
}

std::vector<CodepointRange> ParseRanges(const LanguageConfig& lang) {
  std::vector<CodepointRange> ranges;
  for (const std::string& text : lang.ranges)
    ranges.push_back(ParseCodepointRange(text));
  return ranges;
}

int RunGraphemes(const StageContext& ctx) {
  if (ctx.dry_run) {
    for (const LanguageConfig& lang : ctx.config.languages)
      std::cout << "[dry-run] graphemes: would scan " << lang.corpus << "\n";
    return 0;
  }
  fs::path dir = PrepareStageDir(ctx, "graphemes");
  std::vector<GraphemeSet> sets;
  std::string rejections;
  for (const LanguageConfig& lang : ctx.config.languages) {
    GraphemeSetResult result =
        BuildGraphemeSet(CorpusVocabulary(lang.corpus), ParseRanges(lang),
                         DefaultExtraGraphemes(), lang.tag);
    result.set.Save((dir / (lang.tag + ".graphemes.txt")).string());
    rejections += RejectionsToText(lang.tag, result.rejected);
    sets.push_back(std::move(result.set));
  }
  UnionGraphemeSets(sets).Save((dir / "union.graphemes.txt").string());
  WriteFileText((dir / "rejected.txt").string(), rejections);
  WriteStageManifest(dir);
  std::cout << "graphemes: " << sets.size() << " language set(s) -> "
            << dir.generic_string() << "\n";
  return 0;
}

GraphemeSet LoadLanguageSet(const StageContext& ctx, const std::string& tag) {
  fs::path path = ctx.work / "graphemes" / (tag + ".graphemes.txt");
  RequireArtifact(path, "graphemes");
  return GraphemeSet::Load(path.string());
}

GraphemeSet LoadUnionSet(const StageContext& ctx) {
  fs::path path = ctx.work / "graphemes" / "union.graphemes.txt";
  RequireArtifact(path, "graphemes");
  return GraphemeSet::Load(path.string());
}

int RunLexicon(const StageContext& ctx) {
  if (ctx.dry_run) {
    std::cout << "[dry-run] lexicon: would build "
              << ctx.config.languages.size() << " language lexicon(s)\n";
    return 0;
  }
  LoadUnionSet(ctx);  // fail before writing anything
  fs::path dir = PrepareStageDir(ctx, "lexicon");
  std::vector<Lexicon> lexicons;
  std::string rejections;
  for (const LanguageConfig& lang : ctx.config.languages) {
    std::vector<TaggedWord> words;
    for (const std::string& word : CorpusVocabulary(lang.corpus))
      words.push_back({word, lang.tag});
    LexiconResult result =
        BuildLexicon(words, LoadLanguageSet(ctx, lang.tag));
    WriteFileText((dir / (lang.tag + ".lexicon.txt")).string(),
                  result.lexicon.ToText());
    WriteFileText((dir / (lang.tag + ".lexicon.lang")).string(),
                  result.lexicon.LanguageSidecarToText());
    rejections += RejectionsToText(lang.tag, result.rejected);
    lexicons.push_back(std::move(result.lexicon));
  }
  Lexicon merged = MergeLexicons(lexicons);
  WriteFileText((dir / "lexicon.txt").string(), merged.ToText());
  WriteFileText((dir / "lexicon.lang").string(),
                merged.LanguageSidecarToText());
  MakeWordSymbols(merged).Save((dir / "words.sym").string());
  WriteFileText((dir / "rejected.txt").string(), rejections);
  WriteStageManifest(dir);
  std::cout << "lexicon: " << merged.NumWords() << " merged word(s) -> "
            << dir.generic_string() << "\n";
  return 0;
}

// The decoding vocabulary for the configured mode: the merged lexicon,
// or one language's lexicon carrying the union grapheme set so its
// units line up with the multilingual acoustic model.
Lexicon LoadDecodingLexicon(const StageContext& ctx) {
  GraphemeSet union_set = LoadUnionSet(ctx);
  std::string tag = ctx.config.SpecificLanguage();
  std::string base = tag.empty() ? "lexicon" : tag + ".lexicon";
  fs::path lex = ctx.work / "lexicon" / (base + ".txt");
  fs::path sidecar = ctx.work / "lexicon" / (base + ".lang");
  RequireArtifact(lex, "lexicon");
  RequireArtifact(sidecar, "lexicon");
  return Lexicon::FromText(ReadFileText(lex.string()),
                           ReadFileText(sidecar.string()),
                           std::move(union_set));
}

Lexicon LoadMergedLexicon(const StageContext& ctx) {
  fs::path lex = ctx.work / "lexicon" / "lexicon.txt";
  fs::path sidecar = ctx.work / "lexicon" / "lexicon.lang";
  RequireArtifact(lex, "lexicon");
  RequireArtifact(sidecar, "lexicon");
  return Lexicon::FromText(ReadFileText(lex.string()),
                           ReadFileText(sidecar.string()), LoadUnionSet(ctx));
}

int RunLm(const StageContext& ctx) {
  std::string tag = ctx.config.SpecificLanguage();
  std::vector<TokenSeq> corpus;
  for (const LanguageConfig& lang : ctx.config.languages) {
    if (!tag.empty() && lang.tag != tag) continue;
    for (const std::string& line : CorpusSentences(lang.corpus))
      corpus.push_back(SplitWhitespace(line));
  }
  if (ctx.dry_run) {
    std::cout << "[dry-run] lm: would train order " << ctx.config.lm.order
              << " on " << corpus.size() << " sentence(s)\n";
    return 0;
  }
  fs::path dir = PrepareStageDir(ctx, "lm");
  NgramModel model =
      TrainNgram(corpus, ctx.config.lm.order, ctx.config.lm.discount);
  WriteFileText((dir / "lm.arpa").string(), WriteArpa(model));
  WriteFileText((dir / "lm.meta").string(),
                "mode\t" + ctx.config.mode + "\norder\t" +
                    std::to_string(model.order) + "\ndiscount\t" +
                    FormatDouble(model.discount) + "\n");
  WriteStageManifest(dir);
  std::cout << "lm: " << corpus.size() << " sentence(s), order "
            << model.order << " -> " << dir.generic_string() << "\n";
  return 0;
}

// Synthetic per-token embedding, stable across runs and languages.
VectorX TokenEmbedding(const std::string& token, int dim, uint64_t seed) {
  Rng rng(DeriveSeed(seed, "embed:" + token));
  VectorX v(dim);
  for (int d = 0; d < dim; ++d) v[d] = rng.Uniform(-1.0, 1.0);
  return v;
}

int RunTree(const StageContext& ctx) {
  if (ctx.dry_run) {
    std::cout << "[dry-run] tree: would grow up to "
              << ctx.config.tree.max_leaves << " leaves\n";
    return 0;
  }
  GraphemeSet union_set = LoadUnionSet(ctx);
  std::vector<GraphemeSet> sets;
  for (const LanguageConfig& lang : ctx.config.languages)
    sets.push_back(LoadLanguageSet(ctx, lang.tag));
  fs::path dir = PrepareStageDir(ctx, "tree");

  // Stats come from a deterministic simulation: every utterance is
  // force-aligned uniformly and each frame gets an embedding of its
  // center blended with its neighbors. Real acoustics would drop in at
  // this exact point.
  int dim = ctx.config.tree.feature_dim;
  int topology = ctx.config.tree.topology;
  std::map<std::string, VectorX> embeddings;
  auto embed = [&](const std::string& token) -> const VectorX& {
    auto it = embeddings.find(token);
    if (it == embeddings.end())
      it = embeddings
               .emplace(token, TokenEmbedding(token, dim, ctx.config.seed))
               .first;
    return it->second;
  };

  StatsTable table;
  for (const LanguageConfig& lang : ctx.config.languages) {
    std::vector<std::string> sentences = CorpusSentences(lang.corpus);
    for (size_t idx = 0; idx < sentences.size(); ++idx) {
      std::vector<std::string> tokens = {kSilenceToken};
      bool covered = true;
      for (const std::string& word : SplitWhitespace(sentences[idx])) {
        for (char32_t cp : Utf8Decode(word)) {
          if (!union_set.Contains(cp)) {
            covered = false;
            break;
          }
          tokens.push_back(Utf8Encode(cp));
        }
        if (!covered) break;
      }
      if (!covered) continue;
      tokens.push_back(kSilenceToken);

      int num_frames = static_cast<int>(tokens.size()) * topology *
                       ctx.config.decoder.frames_per_state;
      std::vector<StatsKey> keys = AlignUniform(tokens, topology, num_frames);
      Rng rng(DeriveSeed(ctx.config.seed,
                         "tree:" + lang.tag + ":" + std::to_string(idx)));
      MatrixX features(dim, num_frames);
      for (int t = 0; t < num_frames; ++t) {
        const StatsKey& key = keys[t];
        VectorX f = embed(key.center) + 0.3 * embed(key.left) +
                    0.3 * embed(key.right);
        for (int d = 0; d < dim; ++d) f[d] += 0.1 * rng.Gaussian(0.0, 1.0);
        features.col(t) = f;
      }
      AccumulateStats(keys, features, &table);
    }
  }

  // The tree must map every tri-grapheme over the union inventory, but
  // rare graphemes (the standing extras especially) may never occur in
  // a corpus. Seed one boundary-context frame for each uncovered
  // (center, position) so every center keeps a root.
  for (const std::string& center : CenterTokens(union_set)) {
    for (int pos = 0; pos < topology; ++pos) {
      bool seen = false;
      for (const auto& [key, stats] : table) {
        (void)stats;
        if (key.center == center && key.pos == pos) {
          seen = true;
          break;
        }
      }
      if (seen) continue;
      StatsKey key{kBoundaryToken, center, kBoundaryToken, pos};
      MatrixX features(dim, 1);
      features.col(0) = embed(center);
      AccumulateStats({key}, features, &table);
    }
  }

  WriteFileText((dir / "stats.txt").string(), StatsToText(table));
  DecisionTree tree =
      GrowTree(table, GenerateQuestions(sets), ctx.config.tree.max_leaves,
               ctx.config.tree.min_gain);
  WriteFileText((dir / "tree.txt").string(), TreeToText(tree));
  WriteStageManifest(dir);
  std::cout << "tree: " << table.size() << " context(s), "
            << tree.leaf_count << " tied state(s) -> " << dir.generic_string()
            << "\n";
  return 0;
}

DecisionTree LoadTree(const StageContext& ctx) {
  fs::path path = ctx.work / "tree" / "tree.txt";
  RequireArtifact(path, "tree");
  return TreeFromText(ReadFileText(path.string()));
}

int RunGraph(const StageContext& ctx) {
  if (ctx.dry_run) {
    std::cout << "[dry-run] graph: would build a " << ctx.config.mode
              << " decoding graph\n";
    return 0;
  }
  fs::path meta = ctx.work / "lm" / "lm.meta";
  RequireArtifact(meta, "lm");
  for (const std::string& line : ReadLines(meta.string())) {
    std::vector<std::string> kv = SplitString(line, '\t');
    if (kv.size() == 2 && kv[0] == "mode" && kv[1] != ctx.config.mode)
      throw StageInputError("lm was trained for mode '" + kv[1] +
                            "' but the config wants '" + ctx.config.mode +
                            "'; rerun `gasr lm`");
  }
  fs::path arpa = ctx.work / "lm" / "lm.arpa";
  RequireArtifact(arpa, "lm");

  GraphemeSet union_set = LoadUnionSet(ctx);
  Lexicon lexicon = LoadDecodingLexicon(ctx);
  DecisionTree tree = LoadTree(ctx);
  NgramModel model = ReadArpa(ReadFileText(arpa.string()));

  LexiconFst l = BuildL(lexicon, ctx.config.graph.silence_weight);
  Wfst g = BuildG(model, MakeWordSymbols(lexicon));
  Wfst c = BuildC(union_set);
  Wfst h = BuildH(tree, ctx.config.tree.topology, union_set);
  DecodingGraph graph = BuildDecodingGraph(
      h, c, l, g, ctx.config.mode, ctx.config.graph.max_det_states);

  fs::path dir = PrepareStageDir(ctx, "graph");
  graph.Save(dir.string());
  WriteStageManifest(dir);
  std::cout << "graph: " << graph.graph.NumStates() << " state(s), "
            << graph.tied_state_count << " tied input(s) -> "
            << dir.generic_string() << "\n";
  return 0;
}

struct AugmentArgs {
  std::string manifest_path;
  std::string noise_dir;
  bool materialize = false;
  bool speed_override = false;
  int noise_copies_override = -1;
  bool specaugment_override = false;
};

int RunAugment(const StageContext& ctx, const AugmentArgs& args) {
  Manifest input = Manifest::Load(args.manifest_path);

  ExpandOptions opts;
  opts.speed = args.speed_override || ctx.config.augment.speed;
  opts.noise_copies = args.noise_copies_override >= 0
                          ? args.noise_copies_override
                          : ctx.config.augment.noise_copies;
  opts.specaugment =
      args.specaugment_override || ctx.config.augment.specaugment;
  opts.specaugment_policy.freq_masks = ctx.config.augment.freq_masks;
  opts.specaugment_policy.freq_width = ctx.config.augment.freq_width;
  opts.specaugment_policy.time_masks = ctx.config.augment.time_masks;
  opts.specaugment_policy.time_width = ctx.config.augment.time_width;
  opts.base_seed = ctx.config.seed;
  opts.audio_dir = (ctx.work / "augment" / "audio").generic_string();

  if (ctx.dry_run) {
    Manifest preview = ExpandManifest(input, opts);
    std::cout << "[dry-run] augment: " << input.rows.size() << " -> "
              << preview.rows.size() << " row(s)\n";
    return 0;
  }

  fs::path dir = PrepareStageDir(ctx, "augment");
  Manifest expanded = ExpandManifest(input, opts);
  expanded.Save((dir / "manifest.tsv").string());

  if (args.materialize) {
    NoisePool pool;
    if (opts.noise_copies > 0) {
      if (args.noise_dir.empty())
        throw StageInputError(
            "augment: --materialize with noise copies needs --noise-dir");
      pool = NoisePool::FromDirectory(args.noise_dir);
    }
    NoiseMixPolicy policy;
    policy.snr_mean_db = ctx.config.augment.snr_mean;
    policy.snr_std_db = ctx.config.augment.snr_std;
    policy.copies = opts.noise_copies;

    fs::create_directories(dir / "audio");
    std::vector<const ManifestRow*> derived;
    for (const ManifestRow& row : expanded.rows)
      if (row.provenance != "orig") derived.push_back(&row);
    RunParallel(static_cast<int>(derived.size()), ctx.jobs, [&](int i) {
      const ManifestRow& row = *derived[i];
      WriteWav(MaterializeRow(expanded, row, pool, policy), row.audio_path);
    });
  }

  WriteStageManifest(dir);
  std::cout << "augment: " << input.rows.size() << " -> "
            << expanded.rows.size() << " row(s) -> " << dir.generic_string()
            << "\n";
  return 0;
}

int RunDecode(const StageContext& ctx, const std::string& manifest_path) {
  Manifest manifest = Manifest::Load(manifest_path);
  if (ctx.dry_run) {
    std::cout << "[dry-run] decode: would decode " << manifest.rows.size()
              << " row(s)\n";
    return 0;
  }
  fs::path graph_dir = ctx.work / "graph";
  RequireArtifact(graph_dir / "graph.fst", "graph");
  DecodingGraph graph = DecodingGraph::Load(graph_dir.string());
  if (graph.mode != ctx.config.mode)
    throw StageInputError("decoding graph was built for mode '" + graph.mode +
                          "' but the config wants '" + ctx.config.mode +
                          "'; rerun `gasr graph`");
  Lexicon reference_lexicon = LoadMergedLexicon(ctx);
  DecisionTree tree = LoadTree(ctx);

  int count = static_cast<int>(manifest.rows.size());
  std::vector<Hypothesis> hyps(count);
  DecodeOptions opts;
  opts.beam = ctx.config.decoder.beam;
  opts.acoustic_scale = ctx.config.decoder.acoustic_scale;

  RunParallel(count, ctx.jobs, [&](int i) {
    const ManifestRow& row = manifest.rows[i];
    try {
      std::vector<int> reference = ReferenceTiedAlignment(
          SplitWhitespace(row.transcript), reference_lexicon, tree,
          ctx.config.tree.topology, ctx.config.decoder.frames_per_state);
      Rng rng(DeriveSeed(ctx.config.seed, "decode:" + row.id));
      OracleScorer scorer(reference, graph.tied_state_count,
                          ctx.config.decoder.margin, ctx.config.decoder.noise,
                          &rng);
      hyps[i] = Decode(graph, scorer, scorer.NumFrames(), opts);
    } catch (const SearchFailure& e) {
      throw SearchFailure("row '" + row.id + "': " + e.what());
    } catch (const Error& e) {
      throw Error("row '" + row.id + "': " + e.what());
    }
  });

  fs::path dir = PrepareStageDir(ctx, "decode");
  std::string hyp_text;
  std::string align_text;
  for (int i = 0; i < count; ++i) {
    char score[64];
    std::snprintf(score, sizeof(score), "%.6f", hyps[i].total_score);
    hyp_text += manifest.rows[i].id + "\t" + score + "\t" +
                JoinStrings(hyps[i].words, " ") + "\n";
    std::string states;
    for (size_t t = 0; t < hyps[i].alignment.size(); ++t) {
      if (t > 0) states += " ";
      states += std::to_string(hyps[i].alignment[t]);
    }
    align_text += manifest.rows[i].id + "\t" + states + "\n";
  }
  WriteFileText((dir / "hyps.tsv").string(), hyp_text);
  WriteFileText((dir / "align.tsv").string(), align_text);
  WriteStageManifest(dir);
  std::cout << "decode: " << count << " row(s) -> " << dir.generic_string()
            << "\n";
  return 0;
}

struct ScoreArgs {
  std::string manifest_path;
  double baseline_average = 0.0;
  bool has_baseline = false;
};

int RunScore(const StageContext& ctx, const ScoreArgs& args) {
  Manifest manifest = Manifest::Load(args.manifest_path);
  if (ctx.dry_run) {
    std::cout << "[dry-run] score: would score " << manifest.rows.size()
              << " row(s)\n";
    return 0;
  }
  fs::path hyps_path = ctx.work / "decode" / "hyps.tsv";
  RequireArtifact(hyps_path, "decode");
  std::map<std::string, std::vector<std::string>> hyps;
  for (const std::string& line : ReadLines(hyps_path.string())) {
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitString(line, '\t');
    if (fields.size() != 3)
      throw StageInputError("score: bad hypothesis line '" + line + "'");
    hyps[fields[0]] = SplitWhitespace(fields[2]);
  }

  std::map<std::string, Lexicon> language_lexicons;
  for (const LanguageConfig& lang : ctx.config.languages) {
    fs::path lex = ctx.work / "lexicon" / (lang.tag + ".lexicon.txt");
    fs::path sidecar = ctx.work / "lexicon" / (lang.tag + ".lexicon.lang");
    RequireArtifact(lex, "lexicon");
    language_lexicons.emplace(
        lang.tag, Lexicon::FromText(ReadFileText(lex.string()),
                                    ReadFileText(sidecar.string()),
                                    LoadLanguageSet(ctx, lang.tag)));
  }
  Lexicon decoding_lexicon = LoadDecodingLexicon(ctx);

  std::map<std::string, WerBreakdown> per_category;
  long mismatched = 0;
  long hyp_tokens = 0;
  std::vector<std::string> all_ref_tokens;
  for (const ManifestRow& row : manifest.rows) {
    auto hyp_it = hyps.find(row.id);
    if (hyp_it == hyps.end())
      throw StageInputError("score: no hypothesis for row '" + row.id +
                            "'; rerun `gasr decode`");
    auto lex_it = language_lexicons.find(row.language);
    if (lex_it == language_lexicons.end())
      throw StageInputError("score: row '" + row.id +
                            "' has unknown language '" + row.language + "'");
    std::vector<std::string> ref = SplitWhitespace(row.transcript);
    if (ref.empty())
      throw StageInputError("score: row '" + row.id + "' has an empty "
                            "transcript");
    per_category[row.category].Merge(Wer(ref, hyp_it->second));
    mismatched += MismatchedTokenCount(hyp_it->second, lex_it->second);
    hyp_tokens += static_cast<long>(hyp_it->second.size());
    all_ref_tokens.insert(all_ref_tokens.end(), ref.begin(), ref.end());
  }
  if (per_category.empty())
    throw StageInputError("score: manifest has no rows");

  std::map<std::string, double> category_wer;
  for (const auto& [category, breakdown] : per_category)
    category_wer[category] = 100.0 * breakdown.Wer();

  EvalReport report = args.has_baseline
                          ? Summarize(category_wer, args.baseline_average)
                          : Summarize(category_wer);
  report.mismatched_rate =
      hyp_tokens == 0 ? 0.0
                      : static_cast<double>(mismatched) /
                            static_cast<double>(hyp_tokens);
  report.oov_rate = OovRate(all_ref_tokens, decoding_lexicon);

  fs::path dir = PrepareStageDir(ctx, "score");
  WriteFileText((dir / "report.txt").string(), RenderReportTable(report));
  WriteFileText((dir / "metrics.tsv").string(), RenderMetrics(report));
  WriteStageManifest(dir);
  std::cout << RenderReportTable(report);
  std::cout << "score: " << manifest.rows.size() << " row(s) -> "
            << dir.generic_string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual graphemic ASR pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string work = "work";
  bool dry_run = false;
  int jobs = 1;
  app.add_option("--config", config_path, "Pipeline config file")
      ->required();
  app.add_option("--work", work, "Work directory for stage artifacts");
  app.add_flag("--dry-run", dry_run, "Validate inputs without writing");
  app.add_option("--jobs", jobs, "Worker threads for augment and decode");

  app.add_subcommand("graphemes", "Build per-language grapheme inventories");
  app.add_subcommand("lexicon", "Build graphemic lexicons");
  app.add_subcommand("lm", "Train the n-gram language model");
  app.add_subcommand("tree", "Grow the tri-grapheme state-tying tree");
  app.add_subcommand("graph", "Compose the decoding graph");

  AugmentArgs augment_args;
  CLI::App* augment =
      app.add_subcommand("augment", "Expand a manifest with augmentation");
  augment->add_option("--manifest", augment_args.manifest_path,
                      "Input manifest TSV")
      ->required();
  augment->add_option("--noise-dir", augment_args.noise_dir,
                      "Directory of noise clips");
  augment->add_flag("--materialize", augment_args.materialize,
                    "Write derived audio files");
  augment->add_flag("--speed", augment_args.speed_override,
                    "Force speed perturbation on");
  augment->add_option("--noise-copies", augment_args.noise_copies_override,
                      "Override the configured noisy copy count");
  augment->add_flag("--specaugment", augment_args.specaugment_override,
                    "Force the SpecAugment annotation on");

  std::string decode_manifest;
  CLI::App* decode =
      app.add_subcommand("decode", "Decode a manifest with the oracle scorer");
  decode->add_option("--manifest", decode_manifest, "Test manifest TSV")
      ->required();

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "Score decode hypotheses");
  score->add_option("--manifest", score_args.manifest_path,
                    "Test manifest TSV")
      ->required();
  CLI::Option* baseline =
      score->add_option("--baseline-average", score_args.baseline_average,
                        "Baseline average WER for the gain column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  score_args.has_baseline = baseline->count() > 0;

  try {
    StageContext ctx;
    ctx.config = LoadConfig(config_path);
    ctx.work = work;
    ctx.dry_run = dry_run;
    ctx.jobs = jobs;
    if (!dry_run) fs::create_directories(ctx.work);

    if (app.got_subcommand("graphemes")) return RunGraphemes(ctx);
    if (app.got_subcommand("lexicon")) return RunLexicon(ctx);
    if (app.got_subcommand("lm")) return RunLm(ctx);
    if (app.got_subcommand("tree")) return RunTree(ctx);
    if (app.got_subcommand("graph")) return RunGraph(ctx);
    if (app.got_subcommand("augment")) return RunAugment(ctx, augment_args);
    if (app.got_subcommand("decode")) return RunDecode(ctx, decode_manifest);
    if (app.got_subcommand("score")) return RunScore(ctx, score_args);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const StageInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
