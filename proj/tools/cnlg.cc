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

// Command-line entry point. Exit codes: 0 ok, 1 usage, 2 data, 3 backend.

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cnlg/backends.h"
#include "cnlg/corpus.h"
#include "cnlg/error.h"
#include "cnlg/evaluators.h"
#include "cnlg/generator.h"
#include "cnlg/humaneval.h"
#include "cnlg/pipeline.h"
#include "cnlg/prompting.h"
#include "cnlg/service.h"
#include "cnlg/testsets.h"
#include "cnlg/text.h"
#include "cnlg/textstats.h"

namespace fs = std::filesystem;
using namespace cnlg;

namespace {

Config RequireConfig(const std::string& s) {
  const auto c = ParseConfig(s);
  if (!c) throw UsageError("--config must be E, EA or A");
  return *c;
}

Json ReadJsonFile(const fs::path& p) {
  try {
    return Json::parse(ReadFile(p));
  } catch (const Json::parse_error& e) {
    throw DataError(p.string() + " is not JSON: " + e.what());
  }
}

void PrintJson(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<std::string> TextsFromJsonl(const fs::path& path, const std::string& field) {
  std::vector<std::string> texts;
  std::size_t line = 0;
  for (const auto& j : ReadJsonl(path)) {
    ++line;
    if (field == "candidates" && j.contains("candidates")) {
      for (const auto& c : j["candidates"]) texts.push_back(c.at("text").get<std::string>());
      continue;
    }
    if (!j.contains(field) || !j[field].is_string()) {
      throw DataError(fmt::format("{}:{}: no string field '{}'", path.string(), line, field));
    }
    texts.push_back(j[field].get<std::string>());
  }
  return texts;
}

std::unique_ptr<Tagger> MakeTagger(const std::string& spec) {
  if (spec == "rule") return std::make_unique<RuleTagger>();
  if (spec.rfind("conllu:", 0) == 0) {
    return std::make_unique<ConlluTagger>(ConlluTagger::Load(spec.substr(7)));
  }
  throw UsageError("--tagger must be 'rule' or 'conllu:PATH'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional event-description generation toolkit"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");
  app.set_version_flag("--version", std::string(kVersion));

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Filter and split the event corpus");
  corpus->require_subcommand(1);
  auto* filter = corpus->add_subcommand("filter", "Raw export to filtered records");
  fs::path filter_in, filter_out, filter_stats;
  fs::path column_map = fs::path(CNLG_DATA_DIR) / "envent_column_map.json";
  filter->add_option("--in", filter_in, "Raw .csv/.tsv export")->required();
  filter->add_option("--out", filter_out, "Records JSONL")->required();
  filter->add_option("--column-map", column_map, "Column map JSON");
  filter->add_option("--stats", filter_stats, "Write corpus statistics JSON here");

  auto* split = corpus->add_subcommand("split", "Seeded generator/classifier split");
  fs::path split_in, split_out = ".";
  std::uint64_t split_seed = 0;
  bool stratified = false;
  split->add_option("--in", split_in, "Records JSONL")->required();
  split->add_option("--out-dir", split_out, "Directory for the three JSONL parts");
  split->add_option("--seed", split_seed)->required();
  split->add_flag("--stratified", stratified, "Split each emotion separately");

  auto* cstats = corpus->add_subcommand("stats", "Per-emotion counts and co-occurrences");
  fs::path cstats_in;
  cstats->add_option("--in", cstats_in, "Records JSONL")->required();

  // prompts
  auto* prompts = app.add_subcommand("prompts", "Prompt construction");
  prompts->require_subcommand(1);
  auto* pbuild = prompts->add_subcommand("build", "Augment records into prompt instances");
  std::string pconfig;
  std::uint64_t pseed = 0;
  fs::path pin, pout;
  bool literal_guild = false;
  pbuild->add_option("--config", pconfig, "E|EA|A")->required();
  pbuild->add_option("--seed", pseed)->required();
  pbuild->add_option("--in", pin, "Records JSONL")->required();
  pbuild->add_option("--out", pout, "Prompt JSONL")->required();
  pbuild->add_flag("--literal-guild", literal_guild, "Render guilt as 'guild'");

  // testsets
  auto* testsets = app.add_subcommand("testsets", "Frozen evaluation prompt sets");
  testsets->require_subcommand(1);
  auto* tbuild = testsets->add_subcommand("build", "Build one prompt set");
  std::string tset, tranking = "vectors";
  fs::path tcorpus, tout;
  std::size_t ttop_k = 10;
  tbuild->add_option("--set", tset, "EP|EfA|EnAP|AP")->required();
  tbuild->add_option("--corpus", tcorpus, "Records JSONL (needed for EfA)");
  tbuild->add_option("--out", tout, "Test set JSONL")->required();
  tbuild->add_option("--ranking", tranking, "EfA ranking: vectors|marginal");
  tbuild->add_option("--top-k", ttop_k, "EfA vectors per emotion");

  // gen
  auto* gen = app.add_subcommand("gen", "Fine-tune and decode");
  gen->require_subcommand(1);
  auto* gtrain = gen->add_subcommand("train", "Fine-tune a backend on prompt instances");
  std::string gconfig, gbackend = "seq2seq-mini", goptions = "{}";
  fs::path gdata, gout;
  TrainParams tp;
  gtrain->add_option("--config", gconfig, "E|EA|A")->required();
  gtrain->add_option("--backend", gbackend, "Backend kind");
  gtrain->add_option("--backend-options", goptions, "Backend options as JSON");
  gtrain->add_option("--data", gdata, "Prompt JSONL")->required();
  gtrain->add_option("--out", gout, "Checkpoint directory")->required();
  gtrain->add_option("--epochs", tp.epochs);
  gtrain->add_option("--lr", tp.learning_rate);
  gtrain->add_option("--batch-size", tp.batch_size);
  gtrain->add_option("--seed", tp.seed);
  gtrain->add_option("--max-steps", tp.max_steps);

  auto* grun = gen->add_subcommand("run", "Decode a prompt set");
  fs::path gckpt, gset, grun_out;
  DecodeParams dp;
  std::uint64_t gseed = 0;
  bool gresume = false, ggreedy = false;
  int gworkers = 1;
  grun->add_option("--checkpoint", gckpt)->required();
  grun->add_option("--set", gset, "Test set JSONL")->required();
  grun->add_option("--out", grun_out, "Generations JSONL")->required();
  grun->add_option("--beams", dp.beam_size);
  grun->add_option("--top-p", dp.top_p);
  grun->add_option("--temp", dp.temperature);
  grun->add_option("--n", dp.num_return);
  grun->add_option("--max-new-tokens", dp.max_new_tokens);
  grun->add_option("--seed", gseed);
  grun->add_option("--workers", gworkers);
  grun->add_flag("--greedy", ggreedy, "Beam 1, top-p 1, no sampling");
  grun->add_flag("--resume", gresume, "Keep finished prompts already in --out");

  auto* gppl = gen->add_subcommand("perplexity", "Perplexity on held-out prompt instances");
  fs::path ppl_ckpt, ppl_data;
  gppl->add_option("--checkpoint", ppl_ckpt)->required();
  gppl->add_option("--data", ppl_data)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Automatic evaluation");
  eval->require_subcommand(1);
  auto* ejt = eval->add_subcommand("judges-train", "Train emotion and appraisal judges");
  fs::path ej_split, ej_out;
  ClassifierParams cp;
  ejt->add_option("--split-dir", ej_split, "Directory from 'corpus split'")->required();
  ejt->add_option("--out", ej_out, "Judge directory")->required();
  ejt->add_option("--epochs", cp.epochs);
  ejt->add_option("--batch-size", cp.batch_size);
  ejt->add_option("--lr", cp.learning_rate);
  ejt->add_option("--seed", cp.seed);

  auto* escore = eval->add_subcommand("score", "Score one grid cell");
  std::string ecell;
  fs::path egen, eout, ejudges, eckpt, eheld;
  bool etop1 = false;
  escore->add_option("--cell", ecell, "ARCH:CONFIG:SET")->required();
  escore->add_option("--gen", egen, "Generations JSONL")->required();
  escore->add_option("--judges", ejudges, "Judge directory")->required();
  escore->add_option("--out", eout, "Report JSON")->required();
  escore->add_option("--checkpoint", eckpt, "Checkpoint for perplexity");
  escore->add_option("--heldout", eheld, "Held-out prompt JSONL for perplexity");
  escore->add_flag("--top1", etop1, "Score only the best candidate per prompt");

  // report
  auto* report = app.add_subcommand("report", "Render result tables");
  report->require_subcommand(1);
  auto* rt2 = report->add_subcommand("table2", "Emotion F1 grid from cell reports");
  std::vector<fs::path> rt2_in;
  bool rt2_app = false;
  rt2->add_option("reports", rt2_in, "Report JSON files")->required();
  rt2->add_flag("--appraisals", rt2_app, "Render the appraisal grid instead");
  auto* rt3 = report->add_subcommand("table3", "Text statistics rows");
  std::vector<std::string> rt3_in;
  bool rt3_adj = false;
  rt3->add_option("stats", rt3_in, "LABEL=stats.json entries")->required();
  rt3->add_flag("--adjectives", rt3_adj);

  // stats
  auto* stats = app.add_subcommand("stats", "Token, noun, verb, adjective and clause counts");
  fs::path sin, sout;
  std::string sfield = "text", stagger = "rule";
  int sworkers = 1;
  stats->add_option("--in", sin, "JSONL input")->required();
  stats->add_option("--field", sfield, "Text field, or 'candidates' for generations");
  stats->add_option("--out", sout, "Statistics JSON");
  stats->add_option("--tagger", stagger, "rule | conllu:PATH");
  stats->add_option("--workers", sworkers);

  // survey
  auto* survey = app.add_subcommand("survey", "Human evaluation study");
  survey->require_subcommand(1);
  auto* ssample = survey->add_subcommand("sample", "Draw the 330-item study");
  std::vector<std::string> scells;
  fs::path sgold, svalid, sdir;
  std::uint64_t sseed = 0;
  std::size_t sbatch = 30;
  ssample->add_option("--cell", scells, "ORIGIN=generations.jsonl, ORIGIN in E:EP EA:EP EA:EfA")
      ->required();
  ssample->add_option("--gold", sgold, "Corpus records JSONL")->required();
  ssample->add_option("--validations", svalid, "Reader validations JSONL")->required();
  ssample->add_option("--seed", sseed)->required();
  ssample->add_option("--out", sdir, "Study directory")->required();
  ssample->add_option("--batch-size", sbatch);

  auto* sexport = survey->add_subcommand("export", "Rewrite survey CSV batches of a study");
  fs::path sexp_dir;
  std::size_t sexp_batch = 30;
  sexport->add_option("--study", sexp_dir)->required();
  sexport->add_option("--batch-size", sexp_batch);

  auto* sagg = survey->add_subcommand("aggregate", "Majority labels, F1 and quality means");
  fs::path sresp, sagg_study, sagg_out;
  sagg->add_option("--responses", sresp, "Responses CSV")->required();
  sagg->add_option("--study", sagg_study, "Study directory")->required();
  sagg->add_option("--out", sagg_out, "Report JSON")->required();

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "End-to-end runs");
  pipeline->require_subcommand(1);
  auto* prun = pipeline->add_subcommand("run", "Run a declarative pipeline config");
  fs::path pconfig_path;
  bool presume = false;
  prun->add_option("config", pconfig_path, "Pipeline config JSON")->required();
  prun->add_flag("--resume", presume, "Continue a run; refuse on changed inputs");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP generation service");
  std::string bind;
  fs::path serve_ckpt, serve_judges;
  serve->add_option("--bind", bind, "host:port (default CNLG_BIND or 127.0.0.1:8080)");
  serve->add_option("--checkpoints", serve_ckpt, "Checkpoint directory");
  serve->add_option("--judges", serve_judges, "Judge directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto logger = spdlog::stderr_color_mt("cnlg");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*filter) {
      const FilterResult r = FilterCorpus(ReadTable(filter_in), ColumnMap::Load(column_map));
      WriteRecords(filter_out, r.records);
      for (const auto& d : r.diagnostics) spdlog::debug("{}", d);
      spdlog::info("{} records kept; dropped {} by emotion, {} without appraisal, {} malformed",
                   r.records.size(), r.dropped_emotion, r.dropped_no_appraisal,
                   r.dropped_malformed);
      Json s = ComputeStatistics(r.records).ToJson();
      s["reported_total"] = TotalDiscrepancyReport(r.records.size());
      if (!filter_stats.empty()) WriteFileAtomic(filter_stats, s.dump(2));
      PrintJson(s["reported_total"]);
    } else if (*split) {
      const auto records = ReadRecords(split_in);
      const CorpusSplit s = SplitCorpus(records, split_seed, {stratified});
      fs::create_directories(split_out);
      WriteRecords(split_out / "generator_train.jsonl", s.generator_train);
      WriteRecords(split_out / "classifier_train.jsonl", s.classifier_train);
      WriteRecords(split_out / "classifier_eval.jsonl", s.classifier_eval);
      PrintJson({{"generator_train", s.generator_train.size()},
                 {"classifier_train", s.classifier_train.size()},
                 {"classifier_eval", s.classifier_eval.size()},
                 {"seed", split_seed}});
    } else if (*cstats) {
      const auto records = ReadRecords(cstats_in);
      Json s = ComputeStatistics(records).ToJson();
      s["reported_total"] = TotalDiscrepancyReport(records.size());
      PrintJson(s);
    } else if (*pbuild) {
      std::vector<std::string> diagnostics;
      AugmentOptions ao;
      ao.render.literal_guild_token = literal_guild;
      ao.diagnostics = &diagnostics;
      const auto instances = Augment(ReadRecords(pin), RequireConfig(pconfig), pseed, ao);
      for (const auto& d : diagnostics) spdlog::warn("{}", d);
      WritePromptInstances(pout, instances);
      spdlog::info("{} prompt instances written", instances.size());
    } else if (*tbuild) {
      const auto name = ParseTestSetName(tset);
      if (!name || *name == TestSetName::kCustom) throw UsageError("--set must be EP, EfA, EnAP or AP");
      TestPromptSet set;
      if (*name == TestSetName::kEfA) {
        if (tcorpus.empty()) throw UsageError("EfA needs --corpus");
        EfaOptions o;
        o.top_k = ttop_k;
        if (tranking == "marginal") {
          o.ranking = EfaRanking::kMarginal;
        } else if (tranking != "vectors") {
          throw UsageError("--ranking must be vectors or marginal");
        }
        set = BuildEfa(ReadRecords(tcorpus), o);
      } else if (*name == TestSetName::kEP) {
        set = BuildEp();
      } else if (*name == TestSetName::kEnAP) {
        set = BuildEnap();
      } else {
        set = BuildAp();
      }
      WriteTestSet(tout, set);
      spdlog::info("{} prompts in {}", set.prompts.size(), TestSetNameString(*name));
    } else if (*gtrain) {
      const Config config = RequireConfig(gconfig);
      const auto data = ReadPromptInstances(gdata);
      Json options;
      try {
        options = Json::parse(goptions);
      } catch (const Json::parse_error& e) {
        throw UsageError(std::string("--backend-options is not JSON: ") + e.what());
      }
      const auto base = CreateBackend(gbackend, options, data);
      TrainReport tr;
      const auto trained = FineTune(*base, data, tp, &tr);
      CheckpointInfo info;
      info.id = gout.filename().string();
      info.architecture = gbackend;
      info.config = config;
      info.hparams = {{"options", options}, {"train", tp.ToJson()}};
      info.seed = tp.seed;
      info.data_hash = DataHash(data);
      info.trained_at = UtcTimestamp();
      info.loss_trace = tr.epoch_loss;
      info.kind = trained->Kind();
      info.identity = trained->Identity();
      SaveCheckpoint(*trained, info, gout);
      PrintJson(info.ToJson());
    } else if (*grun) {
      if (ggreedy) {
        dp.beam_size = 1;
        dp.num_return = 1;
        dp.top_p = 1.0;
        dp.sample = false;
      }
      const LoadedCheckpoint ckpt = LoadCheckpoint(gckpt);
      BatchOptions bo;
      bo.output = grun_out;
      bo.resume = gresume;
      bo.workers = gworkers;
      const TestPromptSet set = ReadTestSet(gset);
      bo.set_name = std::string(TestSetNameString(set.name));
      bo.config_name = ckpt.info.config ? std::string(ConfigName(*ckpt.info.config)) : "";
      const auto results = BatchGenerate(*ckpt.backend, set, dp, gseed, bo);
      std::size_t failed = 0;
      for (const auto& r : results) failed += r.error ? 1 : 0;
      spdlog::info("{} prompts decoded, {} failed", results.size(), failed);
      if (failed == results.size() && !results.empty()) throw BackendError("every prompt failed");
    } else if (*gppl) {
      const LoadedCheckpoint ckpt = LoadCheckpoint(ppl_ckpt);
      PrintJson({{"perplexity", Perplexity(*ckpt.backend, ReadPromptInstances(ppl_data))}});
    } else if (*ejt) {
      CorpusSplit s;
      s.classifier_train = ReadRecords(ej_split / "classifier_train.jsonl");
      s.classifier_eval = ReadRecords(ej_split / "classifier_eval.jsonl");
      JudgeMetrics m;
      const Judges judges = TrainJudges(s, cp, &m);
      fs::create_directories(ej_out);
      judges.Save(ej_out);
      WriteFileAtomic(ej_out / "metrics.json", m.ToJson().dump(2));
      PrintJson(m.ToJson());
    } else if (*escore) {
      const CellId cell = CellId::Parse(ecell);
      const auto results = ReadGenerations(egen);
      EvaluationReport r = ScoreCell(cell, results, Judges::Load(ejudges), {etop1});
      if (!eckpt.empty() != !eheld.empty()) {
        throw UsageError("perplexity needs both --checkpoint and --heldout");
      }
      if (!eckpt.empty()) {
        r.perplexity = Perplexity(*LoadCheckpoint(eckpt).backend, ReadPromptInstances(eheld));
      }
      for (const auto& w : r.warnings) spdlog::warn("{}", w);
      WriteFileAtomic(eout, r.ToJson().dump(2));
    } else if (*rt2) {
      std::vector<EvaluationReport> reports;
      for (const auto& p : rt2_in) {
        const Json j = ReadJsonFile(p);
        if (j.contains("reports")) {
          for (const auto& r : j["reports"]) reports.push_back(EvaluationReport::FromJson(r));
        } else {
          reports.push_back(EvaluationReport::FromJson(j));
        }
      }
      std::cout << (rt2_app ? RenderAppraisalTable(reports) : RenderEmotionTable(reports));
    } else if (*rt3) {
      std::vector<std::pair<std::string, TextStats>> rows;
      for (const auto& entry : rt3_in) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) throw UsageError("table3 entries must be LABEL=PATH");
        rows.emplace_back(entry.substr(0, eq),
                          TextStats::FromJson(ReadJsonFile(entry.substr(eq + 1))));
      }
      std::cout << RenderStatsTable(rows, rt3_adj);
    } else if (*stats) {
      const auto tagger = MakeTagger(stagger);
      AnalyzeOptions ao;
      ao.workers = sworkers;
      const TextStats s = Analyze(TextsFromJsonl(sin, sfield), *tagger, ao);
      if (s.n_flagged) spdlog::warn("{} texts could not be tagged", s.n_flagged);
      if (sout.empty()) {
        PrintJson(s.ToJson());
      } else {
        WriteFileAtomic(sout, s.ToJson().dump(2));
      }
    } else if (*ssample) {
      std::map<Origin, std::vector<GenerationResult>> cells;
      for (const auto& entry : scells) {
        const auto eq = entry.find('=');
        const auto origin =
            eq == std::string::npos ? std::nullopt : ParseOrigin(entry.substr(0, eq));
        if (!origin || *origin == Origin::kHuman) {
          throw UsageError("--cell must be E:EP=PATH, EA:EP=PATH or EA:EfA=PATH");
        }
        cells[*origin] = ReadGenerations(entry.substr(eq + 1));
      }
      const auto validations = ReadValidations(svalid);
      std::vector<GoldCandidate> gold;
      for (auto& r : ReadRecords(sgold)) {
        auto it = validations.find(r.id);
        gold.push_back({std::move(r), it == validations.end() ? std::vector<Validation>{}
                                                              : it->second});
      }
      const auto items = SampleStudy(cells, gold, sseed);
      ExportSurvey(items, sdir, sbatch);
      spdlog::info("{} survey items written to {}", items.size(), sdir.string());
    } else if (*sexport) {
      ExportSurvey(ReadStudy(sexp_dir), sexp_dir, sexp_batch);
    } else if (*sagg) {
      const auto items = ReadStudy(sagg_study);
      const AggregateResult agg = Aggregate(ReadResponses(sresp));
      const HumanEvalReport hr = HumanF1(agg.items, items);
      Json out;
      out["aggregate"] = agg.ToJson();
      out["report"] = hr.ToJson();
      WriteFileAtomic(sagg_out, out.dump(2));
      std::cout << RenderEmotionTable(hr.emotion) << "\n" << RenderQualityTable(hr);
      if (!agg.excluded_items.empty()) {
        spdlog::warn("{} items excluded for lacking three valid responses",
                     agg.excluded_items.size());
      }
    } else if (*prun) {
      const PipelineSummary s = RunPipeline(PipelineConfig::Load(pconfig_path), {presume});
      PrintJson({{"manifest", s.manifest.string()},
                 {"stages_run", s.stages_run},
                 {"stages_skipped", s.stages_skipped}});
    } else if (*serve) {
      ServiceConfig sc = ServiceConfig::FromEnv();
      if (!bind.empty()) {
        const auto colon = bind.rfind(':');
        if (colon == std::string::npos) throw UsageError("--bind must be host:port");
        sc.host = bind.substr(0, colon);
        sc.port = std::stoi(bind.substr(colon + 1));
      }
      if (!serve_ckpt.empty()) sc.checkpoint_dir = serve_ckpt;
      if (!serve_judges.empty()) sc.judge_dir = serve_judges;
      Service service(sc);
      if (!service.Listen()) throw UsageError(fmt::format("cannot bind {}:{}", sc.host, sc.port));
    }
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const BackendError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
