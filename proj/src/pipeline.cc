// Copyright 2026 The cnlg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cnlg/pipeline.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <functional>
#include <set>

#include "cnlg/backends.h"
#include "cnlg/corpus.h"
#include "cnlg/error.h"
#include "cnlg/prompting.h"
#include "cnlg/random.h"
#include "cnlg/text.h"
#include "cnlg/textstats.h"

namespace fs = std::filesystem;

namespace cnlg {
namespace {

void RejectUnknownKeys(const Json& j, std::initializer_list<std::string_view> allowed,
                       std::string_view where) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string CellFileStem(const std::string& arch, Config c, TestSetName s) {
  return fmt::format("{}-{}-{}", arch, ConfigName(c), TestSetNameString(s));
}

bool IsRawExport(const fs::path& p) {
  const std::string ext = ToLower(p.extension().string());
  return ext == ".csv" || ext == ".tsv";
}

// Skips a stage when the manifest already holds its key and every recorded
// artifact still hashes the same.
class StageRunner {
 public:
  StageRunner(fs::path root, Json manifest, bool resume)
      : root_(std::move(root)), manifest_(std::move(manifest)), resume_(resume) {
    if (!manifest_.contains("stages")) manifest_["stages"] = Json::object();
  }

  // Returns the artifact hashes of the stage, keyed by relative path.
  Json Run(const std::string& name, const Json& key_material,
           const std::vector<std::string>& outputs, const std::function<void()>& body) {
    const std::string key = Sha256Hex(key_material.dump());
    Json& stages = manifest_["stages"];
    if (stages.contains(name)) {
      const Json& prev = stages[name];
      const bool same_key = prev.value("key", std::string()) == key;
      bool intact = same_key;
      if (same_key) {
        for (const auto& [rel, hash] : prev.at("artifacts").items()) {
          if (!fs::exists(root_ / rel) || ArtifactHash(root_ / rel) != hash.get<std::string>()) {
            intact = false;
            if (resume_) {
              throw DataError(fmt::format(
                  "cannot resume: artifact {} of stage '{}' changed since it was recorded; "
                  "rerun without --resume to rebuild it",
                  rel, name));
            }
          }
        }
      } else if (resume_) {
        throw DataError(fmt::format(
            "cannot resume: inputs of stage '{}' changed (recorded key {}, now {}); rerun "
            "without --resume or choose a fresh output_dir",
            name, prev.value("key", std::string()).substr(0, 12), key.substr(0, 12)));
      }
      if (intact) {
        ++skipped_;
        spdlog::info("stage {}: unchanged, skipped", name);
        return prev.at("artifacts");
      }
    }
    spdlog::info("stage {}: running", name);
    body();
    Json artifacts = Json::object();
    for (const auto& rel : outputs) {
      if (!fs::exists(root_ / rel)) {
        throw Error(fmt::format("stage '{}' did not produce {}", name, rel));
      }
      artifacts[rel] = ArtifactHash(root_ / rel);
    }
    stages[name] = {{"key", key},
                    {"inputs", key_material},
                    {"artifacts", artifacts},
                    {"completed_at", UtcTimestamp()}};
    ++run_;
    Save();
    return artifacts;
  }

  void Save() {
    manifest_["updated_at"] = UtcTimestamp();
    WriteFileAtomic(root_ / kManifestName, manifest_.dump(2));
  }

  Json& manifest() { return manifest_; }
  std::size_t run() const { return run_; }
  std::size_t skipped() const { return skipped_; }

 private:
  fs::path root_;
  Json manifest_;
  bool resume_;
  std::size_t run_ = 0;
  std::size_t skipped_ = 0;
};

void WriteSplit(const fs::path& dir, const CorpusSplit& split) {
  fs::create_directories(dir);
  WriteRecords(dir / "generator_train.jsonl", split.generator_train);
  WriteRecords(dir / "classifier_train.jsonl", split.classifier_train);
  WriteRecords(dir / "classifier_eval.jsonl", split.classifier_eval);
}

CorpusSplit ReadSplit(const fs::path& dir) {
  CorpusSplit s;
  s.generator_train = ReadRecords(dir / "generator_train.jsonl");
  s.classifier_train = ReadRecords(dir / "classifier_train.jsonl");
  s.classifier_eval = ReadRecords(dir / "classifier_eval.jsonl");
  return s;
}

TestPromptSet BuildSet(TestSetName name, std::span<const EventRecord> corpus,
                       const EfaOptions& efa) {
  switch (name) {
    case TestSetName::kEP:
      return BuildEp();
    case TestSetName::kEfA:
      return BuildEfa(corpus, efa);
    case TestSetName::kEnAP:
      return BuildEnap();
    case TestSetName::kAP:
      return BuildAp();
    case TestSetName::kCustom:
      break;
  }
  throw UsageError("custom prompt sets are not part of the pipeline grid");
}

}  // namespace

std::string ArtifactHash(const fs::path& path) {
  if (!fs::is_directory(path)) return Sha256Hex(ReadFile(path));
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (e.is_regular_file()) {
      files.emplace_back(fs::relative(e.path(), path).generic_string(),
                         Sha256Hex(ReadFile(e.path())));
    }
  }
  std::sort(files.begin(), files.end());
  std::string blob;
  for (const auto& [name, hash] : files) blob += name + "\t" + hash + "\n";
  return Sha256Hex(blob);
}

PipelineConfig PipelineConfig::FromJson(const Json& j, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    RejectUnknownKeys(j,
                      {"run_id", "output_dir", "corpus", "seeds", "backends", "configs", "sets",
                       "cells", "decode", "judges", "split", "efa", "workers"},
                      "pipeline config");
    c.run_id = j.value("run_id", std::string("run"));
    c.output_dir = Resolve(base_dir, j.value("output_dir", std::string("runs/") + c.run_id));
    const Json& corpus = j.at("corpus");
    RejectUnknownKeys(corpus, {"path", "column_map"}, "corpus");
    c.corpus = Resolve(base_dir, corpus.at("path").get<std::string>());
    if (corpus.contains("column_map")) {
      c.column_map = Resolve(base_dir, corpus["column_map"].get<std::string>());
    }
    if (j.contains("seeds")) {
      const Json& s = j["seeds"];
      RejectUnknownKeys(s, {"split", "augment", "train", "decode", "judges"}, "seeds");
      c.split_seed = s.value("split", c.split_seed);
      c.augment_seed = s.value("augment", c.augment_seed);
      c.train_seed = s.value("train", c.train_seed);
      c.decode_seed = s.value("decode", c.decode_seed);
      c.judge_seed = s.value("judges", c.judge_seed);
    }
    for (const auto& b : j.at("backends")) {
      RejectUnknownKeys(b, {"name", "kind", "options", "train"}, "backend");
      PipelineBackend pb;
      pb.kind = b.at("kind").get<std::string>();
      pb.name = b.value("name", pb.kind);
      pb.options = b.value("options", Json::object());
      pb.train = TrainParams::FromJson(b.value("train", Json::object()));
      c.backends.push_back(std::move(pb));
    }
    if (c.backends.empty()) throw UsageError("pipeline config needs at least one backend");
    std::set<std::string> names;
    for (const auto& b : c.backends) {
      if (!names.insert(b.name).second) throw UsageError("duplicate backend name " + b.name);
    }

    const auto grid = EvaluationGrid();
    if (j.contains("cells")) {
      for (const auto& cell : j["cells"]) {
        const auto parts = Split(cell.get<std::string>(), ':');
        const auto config = parts.size() == 2 ? ParseConfig(parts[0]) : std::nullopt;
        const auto set = parts.size() == 2 ? ParseTestSetName(parts[1]) : std::nullopt;
        if (!config || !set) throw UsageError("cell must look like CONFIG:SET");
        c.cells.emplace_back(*config, *set);
      }
    } else {
      std::vector<Config> configs;
      for (const auto& s : j.value("configs", std::vector<std::string>{"E", "EA", "A"})) {
        const auto config = ParseConfig(s);
        if (!config) throw UsageError("unknown config " + s);
        configs.push_back(*config);
      }
      std::vector<TestSetName> sets;
      for (const auto& s : j.value("sets", std::vector<std::string>{"EP", "EfA", "EnAP", "AP"})) {
        const auto set = ParseTestSetName(s);
        if (!set) throw UsageError("unknown prompt set " + s);
        sets.push_back(*set);
      }
      for (const auto& cell : grid) {
        if (std::count(configs.begin(), configs.end(), cell.first) &&
            std::count(sets.begin(), sets.end(), cell.second)) {
          c.cells.push_back(cell);
        }
      }
    }
    for (const auto& cell : c.cells) {
      if (std::find(grid.begin(), grid.end(), cell) == grid.end()) {
        throw UsageError(fmt::format("{}x{} is not an evaluation cell", ConfigName(cell.first),
                                     TestSetNameString(cell.second)));
      }
    }
    if (c.cells.empty()) throw UsageError("pipeline config selects no evaluation cell");
    if (j.contains("decode")) c.decode = DecodeParams::FromJson(j["decode"]);
    c.decode.Validate();
    if (j.contains("judges")) c.judges = ClassifierParams::FromJson(j["judges"]);
    if (j.contains("split")) c.stratified_split = j["split"].value("stratified", false);
    if (j.contains("efa")) {
      c.efa.top_k = j["efa"].value("top_k", c.efa.top_k);
      const std::string ranking = j["efa"].value("ranking", std::string("vectors"));
      if (ranking == "vectors") {
        c.efa.ranking = EfaRanking::kVectors;
      } else if (ranking == "marginal") {
        c.efa.ranking = EfaRanking::kMarginal;
      } else {
        throw UsageError("efa.ranking must be vectors or marginal");
      }
    }
    c.workers = j.value("workers", 1);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("malformed pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::Load(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::parse_error& e) {
    throw UsageError("pipeline config is not JSON: " + std::string(e.what()));
  }
  return FromJson(j, path.parent_path());
}

Json PipelineConfig::ToJson() const {
  Json j;
  j["run_id"] = run_id;
  j["output_dir"] = output_dir.string();
  j["corpus"] = {{"path", corpus.string()}};
  if (column_map) j["corpus"]["column_map"] = column_map->string();
  j["seeds"] = {{"split", split_seed},
                {"augment", augment_seed},
                {"train", train_seed},
                {"decode", decode_seed},
                {"judges", judge_seed}};
  j["backends"] = Json::array();
  for (const auto& b : backends) {
    j["backends"].push_back(
        {{"name", b.name}, {"kind", b.kind}, {"options", b.options}, {"train", b.train.ToJson()}});
  }
  j["cells"] = Json::array();
  for (const auto& [c, s] : cells) {
    j["cells"].push_back(fmt::format("{}:{}", ConfigName(c), TestSetNameString(s)));
  }
  j["decode"] = decode.ToJson();
  j["judges"] = judges.ToJson();
  j["split"] = {{"stratified", stratified_split}};
  j["efa"] = {{"top_k", efa.top_k},
              {"ranking", efa.ranking == EfaRanking::kVectors ? "vectors" : "marginal"}};
  j["workers"] = workers;
  return j;
}

PipelineSummary RunPipeline(const PipelineConfig& config, const PipelineOptions& options) {
  const fs::path root = config.output_dir;
  fs::create_directories(root);
  const fs::path manifest_path = root / kManifestName;

  Json manifest = Json::object();
  if (fs::exists(manifest_path)) {
    try {
      manifest = Json::parse(ReadFile(manifest_path));
    } catch (const Json::parse_error& e) {
      if (options.resume) throw DataError("cannot resume: run manifest is corrupt");
      spdlog::warn("ignoring corrupt run manifest: {}", e.what());
    }
    if (options.resume && manifest.value("run_id", config.run_id) != config.run_id) {
      throw DataError(fmt::format("cannot resume: output_dir holds run '{}', not '{}'",
                                  manifest.value("run_id", std::string()), config.run_id));
    }
  } else if (options.resume) {
    throw DataError("cannot resume: no run manifest in " + root.string());
  }
  if (!manifest.contains("created_at")) manifest["created_at"] = UtcTimestamp();
  manifest["run_id"] = config.run_id;
  manifest["config"] = config.ToJson();
  manifest["config_hash"] = Sha256Hex(config.ToJson().dump());
  manifest["seeds"] = manifest["config"]["seeds"];
  manifest["module_versions"] = {{"cnlg", kVersion},
                                 {"rng", Rng::kAlgorithm},
                                 {"tagger", RuleTagger::kIdentity}};

  StageRunner stages(root, std::move(manifest), options.resume);

  // Corpus.
  Json corpus_key = {{"corpus", Sha256Hex(ReadFile(config.corpus))}};
  const bool raw = IsRawExport(config.corpus);
  if (raw) {
    if (!config.column_map) throw UsageError("a raw corpus export needs corpus.column_map");
    corpus_key["column_map"] = Sha256Hex(ReadFile(*config.column_map));
  }
  const Json corpus_art =
      stages.Run("corpus", corpus_key, {"corpus/records.jsonl", "corpus/statistics.json"}, [&] {
        fs::create_directories(root / "corpus");
        std::vector<EventRecord> records;
        Json stats_extra = Json::object();
        if (raw) {
          const FilterResult filtered =
              FilterCorpus(ReadTable(config.corpus), ColumnMap::Load(*config.column_map));
          records = filtered.records;
          stats_extra["dropped_emotion"] = filtered.dropped_emotion;
          stats_extra["dropped_no_appraisal"] = filtered.dropped_no_appraisal;
          stats_extra["dropped_malformed"] = filtered.dropped_malformed;
        } else {
          records = ReadRecords(config.corpus);
        }
        WriteRecords(root / "corpus/records.jsonl", records);
        Json stats = ComputeStatistics(records).ToJson();
        stats["filter"] = stats_extra;
        stats["reported_total"] = TotalDiscrepancyReport(records.size());
        WriteFileAtomic(root / "corpus/statistics.json", stats.dump(2));
      });
  const std::string records_hash = corpus_art.at("corpus/records.jsonl");
  std::optional<std::vector<EventRecord>> records_cache;
  auto records = [&]() -> const std::vector<EventRecord>& {
    if (!records_cache) records_cache = ReadRecords(root / "corpus/records.jsonl");
    return *records_cache;
  };

  // Split.
  const Json split_art = stages.Run(
      "split",
      {{"records", records_hash},
       {"seed", config.split_seed},
       {"stratified", config.stratified_split}},
      {"split/generator_train.jsonl", "split/classifier_train.jsonl",
       "split/classifier_eval.jsonl"},
      [&] {
        WriteSplit(root / "split",
                   SplitCorpus(records(), config.split_seed, {config.stratified_split}));
      });

  // Judges.
  const Json judges_art = stages.Run(
      "judges",
      {{"classifier_train", split_art.at("split/classifier_train.jsonl")},
       {"classifier_eval", split_art.at("split/classifier_eval.jsonl")},
       {"params", config.judges.ToJson()},
       {"seed", config.judge_seed}},
      {"judges"}, [&] {
        ClassifierParams p = config.judges;
        p.seed = config.judge_seed;
        JudgeMetrics metrics;
        const Judges judges = TrainJudges(ReadSplit(root / "split"), p, &metrics);
        fs::create_directories(root / "judges");
        judges.Save(root / "judges");
        WriteFileAtomic(root / "judges/metrics.json", metrics.ToJson().dump(2));
      });
  const std::string judges_hash = judges_art.at("judges");

  // Test sets.
  std::map<TestSetName, std::string> set_hash;
  for (const auto& [_, set] : config.cells) {
    if (set_hash.count(set)) continue;
    const std::string rel = fmt::format("testsets/{}.jsonl", TestSetNameString(set));
    Json key = {{"set", TestSetNameString(set)}};
    if (set == TestSetName::kEfA) {
      key["records"] = records_hash;
      key["top_k"] = config.efa.top_k;
      key["ranking"] = config.efa.ranking == EfaRanking::kVectors ? "vectors" : "marginal";
    }
    const Json art = stages.Run("testset:" + std::string(TestSetNameString(set)), key, {rel}, [&] {
      fs::create_directories(root / "testsets");
      WriteTestSet(root / rel, BuildSet(set, records(), config.efa));
    });
    set_hash[set] = art.at(rel);
  }

  // Prompts per configuration: training data and a held-out slice for
  // perplexity.
  std::map<Config, std::pair<std::string, std::string>> prompt_hash;
  for (const auto& [config_name, _] : config.cells) {
    if (prompt_hash.count(config_name)) continue;
    const std::string cn(ConfigName(config_name));
    const std::string train_rel = "prompts/" + cn + ".jsonl";
    const std::string held_rel = "prompts/" + cn + ".heldout.jsonl";
    const Json art = stages.Run(
        "prompts:" + cn,
        {{"generator_train", split_art.at("split/generator_train.jsonl")},
         {"classifier_eval", split_art.at("split/classifier_eval.jsonl")},
         {"config", cn},
         {"seed", config.augment_seed}},
        {train_rel, held_rel}, [&] {
          fs::create_directories(root / "prompts");
          const CorpusSplit split = ReadSplit(root / "split");
          WritePromptInstances(root / train_rel,
                               Augment(split.generator_train, config_name, config.augment_seed));
          WritePromptInstances(
              root / held_rel,
              Augment(split.classifier_eval, config_name, DeriveSeed(config.augment_seed, "heldout")));
        });
    prompt_hash[config_name] = {art.at(train_rel), art.at(held_rel)};
  }

  PipelineSummary summary;
  std::vector<std::pair<std::string, TextStats>> stats_rows;

  for (const auto& backend : config.backends) {
    std::map<Config, std::string> checkpoint_hash;
    for (const auto& [config_name, set] : config.cells) {
      const std::string cn(ConfigName(config_name));
      const std::string ckpt_rel = fmt::format("checkpoints/{}-{}", backend.name, cn);
      if (!checkpoint_hash.count(config_name)) {
        TrainParams tp = backend.train;
        tp.seed = config.train_seed;
        const Json art = stages.Run(
            fmt::format("train:{}:{}", backend.name, cn),
            {{"prompts", prompt_hash[config_name].first},
             {"kind", backend.kind},
             {"options", backend.options},
             {"train", tp.ToJson()}},
            {ckpt_rel}, [&] {
              const auto data = ReadPromptInstances(root / "prompts" / (cn + ".jsonl"));
              const auto base = CreateBackend(backend.kind, backend.options, data);
              TrainReport report;
              const auto trained = FineTune(*base, data, tp, &report);
              CheckpointInfo info;
              info.id = fmt::format("{}-{}", backend.name, cn);
              info.architecture = backend.name;
              info.config = config_name;
              info.hparams = {{"options", backend.options}, {"train", tp.ToJson()}};
              info.seed = tp.seed;
              info.data_hash = DataHash(data);
              info.trained_at = UtcTimestamp();
              info.loss_trace = report.epoch_loss;
              fs::remove_all(root / ckpt_rel);
              SaveCheckpoint(*trained, info, root / ckpt_rel);
            });
        checkpoint_hash[config_name] = art.at(ckpt_rel);
      }

      const std::string stem = CellFileStem(backend.name, config_name, set);
      const std::string gen_rel = "generations/" + stem + ".jsonl";
      const std::string set_name(TestSetNameString(set));
      const Json gen_art = stages.Run(
          "generate:" + stem,
          {{"checkpoint", checkpoint_hash[config_name]},
           {"set", set_hash[set]},
           {"decode", config.decode.ToJson()},
           {"seed", config.decode_seed}},
          {gen_rel}, [&] {
            fs::create_directories(root / "generations");
            const LoadedCheckpoint ckpt = LoadCheckpoint(root / ckpt_rel);
            BatchOptions bo;
            bo.output = root / gen_rel;
            bo.resume = options.resume;
            bo.workers = config.workers;
            bo.set_name = set_name;
            bo.config_name = cn;
            BatchGenerate(*ckpt.backend, ReadTestSet(root / "testsets" / (set_name + ".jsonl")),
                          config.decode, config.decode_seed, bo);
          });

      const std::string report_rel = "reports/" + stem + ".json";
      const CellId cell{backend.name, cn, set_name};
      stages.Run("score:" + stem,
                 {{"generations", gen_art.at(gen_rel)},
                  {"judges", judges_hash},
                  {"checkpoint", checkpoint_hash[config_name]},
                  {"heldout", prompt_hash[config_name].second}},
                 {report_rel}, [&] {
                   fs::create_directories(root / "reports");
                   const Judges judges = Judges::Load(root / "judges");
                   const auto results = ReadGenerations(root / gen_rel);
                   EvaluationReport report = ScoreCell(cell, results, judges);
                   const auto held =
                       ReadPromptInstances(root / "prompts" / (cn + ".heldout.jsonl"));
                   if (!held.empty()) {
                     const LoadedCheckpoint ckpt = LoadCheckpoint(root / ckpt_rel);
                     report.perplexity = Perplexity(*ckpt.backend, held);
                   }
                   Json j = report.ToJson();
                   j["run_id"] = config.run_id;
                   j["manifest"] = std::string(kManifestName);
                   WriteFileAtomic(root / report_rel, j.dump(2));
                 });
      summary.reports.push_back(
          EvaluationReport::FromJson(Json::parse(ReadFile(root / report_rel))));

      const std::string stats_rel = "stats/" + stem + ".json";
      stages.Run("stats:" + stem,
                 {{"generations", gen_art.at(gen_rel)}, {"tagger", RuleTagger::kIdentity}},
                 {stats_rel}, [&] {
                   fs::create_directories(root / "stats");
                   std::vector<std::string> texts;
                   for (const auto& r : ReadGenerations(root / gen_rel)) {
                     for (const auto& c : r.candidates) texts.push_back(c.text);
                   }
                   Json j = texts.empty() ? Json{{"n_texts", 0}}
                                          : Analyze(texts, RuleTagger()).ToJson();
                   j["run_id"] = config.run_id;
                   WriteFileAtomic(root / stats_rel, j.dump(2));
                 });
      const Json sj = Json::parse(ReadFile(root / stats_rel));
      if (sj.value("n_texts", 0) > 0) {
        stats_rows.emplace_back(cn + " " + set_name, TextStats::FromJson(sj));
      }
    }
  }

  stages.Run("stats:human", {{"records", records_hash}, {"tagger", RuleTagger::kIdentity}},
             {"stats/human.json"}, [&] {
               fs::create_directories(root / "stats");
               std::vector<std::string> texts;
               for (const auto& r : records()) texts.push_back(r.text);
               Json j = Analyze(texts, RuleTagger()).ToJson();
               j["run_id"] = config.run_id;
               WriteFileAtomic(root / "stats/human.json", j.dump(2));
             });
  stats_rows.insert(stats_rows.begin(),
                    {"Hum. enVent",
                     TextStats::FromJson(Json::parse(ReadFile(root / "stats/human.json")))});

  Json summary_key = Json::object();
  for (const auto& [name, stage] : stages.manifest()["stages"].items()) {
    if (name.rfind("score:", 0) == 0 || name.rfind("stats:", 0) == 0) {
      summary_key[name] = stage["artifacts"];
    }
  }
  stages.Run("summary", summary_key, {"report.json", "table2.txt", "table3.txt"}, [&] {
    Json j;
    j["run_id"] = config.run_id;
    j["manifest"] = std::string(kManifestName);
    j["reports"] = Json::array();
    for (const auto& r : summary.reports) j["reports"].push_back(r.ToJson());
    WriteFileAtomic(root / "report.json", j.dump(2));
    WriteFileAtomic(root / "table2.txt", RenderEmotionTable(summary.reports) + "\n" +
                                             RenderAppraisalTable(summary.reports));
    WriteFileAtomic(root / "table3.txt", RenderStatsTable(stats_rows, true));
  });

  summary.stages_run = stages.run();
  summary.stages_skipped = stages.skipped();
  summary.manifest = manifest_path;
  if (summary.stages_run > 0 || !fs::exists(manifest_path)) stages.Save();
  spdlog::info("pipeline {}: {} stages run, {} skipped", config.run_id, summary.stages_run,
               summary.stages_skipped);
  return summary;
}

}  // namespace cnlg
