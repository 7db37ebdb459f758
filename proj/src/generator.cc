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

#include "cnlg/generator.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "cnlg/backends.h"
#include "cnlg/error.h"
#include "cnlg/random.h"
#include "cnlg/text.h"

namespace cnlg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BeamEntry {
  std::vector<int> ids;
  double score = 0;  // model log-probability
  double rank = 0;   // tempered, nucleus-renormalized log-probability
  bool ended = false;
};

}  // namespace

Json TrainParams::ToJson() const {
  Json j;
  j["epochs"] = epochs;
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["max_steps"] = max_steps;
  return j;
}

TrainParams TrainParams::FromJson(const Json& j) {
  TrainParams p;
  p.epochs = j.value("epochs", p.epochs);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.batch_size = j.value("batch_size", p.batch_size);
  p.seed = j.value("seed", p.seed);
  p.max_steps = j.value("max_steps", p.max_steps);
  return p;
}

TrainReport GeneratorBackend::Train(std::span<const PromptInstance> /*data*/,
                                    const TrainParams& /*params*/) {
  throw BackendError("backend " + Identity() + " cannot be fine-tuned");
}

TargetScore ScoreTarget(const GeneratorBackend& backend, std::string_view input,
                        std::string_view target) {
  const std::vector<int> in = backend.Encode(input);
  std::vector<int> out = backend.Encode(target);
  out.push_back(backend.EosId());
  TargetScore s;
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto logp = backend.NextTokenLogProbs(in, std::span(out.data(), t));
    s.log_likelihood += logp[static_cast<std::size_t>(out[t])];
  }
  s.tokens = out.size();
  return s;
}

std::unique_ptr<GeneratorBackend> FineTune(const GeneratorBackend& base,
                                           std::span<const PromptInstance> train,
                                           const TrainParams& params,
                                           TrainReport* report) {
  if (!base.Capabilities().fine_tune) {
    throw BackendError("backend " + base.Identity() + " cannot be fine-tuned");
  }
  if (train.empty()) throw DataError("fine-tuning set is empty");
  for (const auto& p : train) {
    try {
      ParsePrompt(p.input);
    } catch (const UsageError& e) {
      throw DataError("instance from " + p.source_id +
                      " is outside the prompt grammar: " + e.what());
    }
  }
  auto handle = base.Clone();
  TrainReport r = handle->Train(train, params);
  if (report) *report = std::move(r);
  return handle;
}

void DecodeParams::Validate() const {
  if (num_return < 1) throw UsageError("num_return must be >= 1");
  if (beam_size < num_return) throw UsageError("beam_size must be >= num_return");
  if (!(temperature > 0)) throw UsageError("temperature must be > 0");
  if (!(top_p > 0 && top_p <= 1)) throw UsageError("top_p must be in (0, 1]");
  if (max_new_tokens < 1) throw UsageError("max_new_tokens must be >= 1");
}

Json DecodeParams::ToJson() const {
  Json j;
  j["beam_size"] = beam_size;
  j["temperature"] = temperature;
  j["top_p"] = top_p;
  j["num_return"] = num_return;
  j["no_repeat_bigram"] = no_repeat_bigram;
  j["sample"] = sample;
  j["max_new_tokens"] = max_new_tokens;
  return j;
}

DecodeParams DecodeParams::FromJson(const Json& j) {
  DecodeParams p;
  p.beam_size = j.value("beam_size", p.beam_size);
  p.temperature = j.value("temperature", p.temperature);
  p.top_p = j.value("top_p", p.top_p);
  p.num_return = j.value("num_return", p.num_return);
  p.no_repeat_bigram = j.value("no_repeat_bigram", p.no_repeat_bigram);
  p.sample = j.value("sample", p.sample);
  p.max_new_tokens = j.value("max_new_tokens", p.max_new_tokens);
  return p;
}

std::vector<Hypothesis> BeamSearch(const GeneratorBackend& backend,
                                   std::span<const int> input,
                                   std::span<const int> history,
                                   const DecodeParams& params,
                                   std::uint64_t seed) {
  params.Validate();
  const int eos = backend.EosId();
  Rng rng(seed);
  std::vector<BeamEntry> live(1);
  std::vector<BeamEntry> finished;

  while (!live.empty()) {
    std::vector<BeamEntry> expansions;
    for (auto& beam : live) {
      if (static_cast<int>(beam.ids.size()) >= params.max_new_tokens) {
        finished.push_back(std::move(beam));
        continue;
      }
      const std::vector<double> logp = backend.NextTokenLogProbs(input, beam.ids);

      // Tempered distribution and its nucleus.
      double max = kNegInf;
      for (double lp : logp) max = std::max(max, lp);
      if (max == kNegInf) continue;
      std::vector<double> tempered(logp.size(), kNegInf);
      double z = 0;
      for (std::size_t i = 0; i < logp.size(); ++i) {
        if (logp[i] == kNegInf) continue;
        tempered[i] = (logp[i] - max) / params.temperature;
        z += std::exp(tempered[i]);
      }
      const double log_z = std::log(z);
      std::vector<int> order;
      for (std::size_t i = 0; i < logp.size(); ++i) {
        if (logp[i] != kNegInf) {
          tempered[i] -= log_z;
          order.push_back(static_cast<int>(i));
        }
      }
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return tempered[static_cast<std::size_t>(a)] > tempered[static_cast<std::size_t>(b)];
      });
      std::size_t nucleus = 0;
      double mass = 0;
      while (nucleus < order.size()) {
        mass += std::exp(tempered[static_cast<std::size_t>(order[nucleus])]);
        ++nucleus;
        if (mass >= params.top_p) break;
      }
      const double log_mass = std::log(mass);

      // Bigrams already used by trigger + prefix.
      std::set<std::pair<int, int>> used;
      int prev = -1;
      auto note = [&](int id) {
        if (prev >= 0) used.emplace(prev, id);
        prev = id;
      };
      for (int id : history) note(id);
      for (int id : beam.ids) note(id);

      for (std::size_t k = 0; k < nucleus; ++k) {
        const int tok = order[k];
        if (params.no_repeat_bigram && tok != eos && prev >= 0 &&
            used.contains({prev, tok})) {
          continue;
        }
        BeamEntry next;
        next.ids = beam.ids;
        next.ids.push_back(tok);
        next.score = beam.score + logp[static_cast<std::size_t>(tok)];
        next.rank = beam.rank + tempered[static_cast<std::size_t>(tok)] - log_mass;
        next.ended = tok == eos;
        expansions.push_back(std::move(next));
      }
    }
    if (expansions.empty()) break;

    std::vector<double> keys(expansions.size());
    for (std::size_t i = 0; i < expansions.size(); ++i) {
      keys[i] = expansions[i].rank + (params.sample ? rng.Gumbel() : 0.0);
    }
    std::vector<std::size_t> idx(expansions.size());
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t keep =
        std::min<std::size_t>(idx.size(), static_cast<std::size_t>(params.beam_size));
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep),
                      idx.end(), [&](std::size_t a, std::size_t b) {
                        if (keys[a] != keys[b]) return keys[a] > keys[b];
                        if (expansions[a].score != expansions[b].score) {
                          return expansions[a].score > expansions[b].score;
                        }
                        return expansions[a].ids < expansions[b].ids;
                      });
    live.clear();
    for (std::size_t k = 0; k < keep; ++k) {
      BeamEntry& e = expansions[idx[k]];
      if (e.ended) {
        finished.push_back(std::move(e));
      } else {
        live.push_back(std::move(e));
      }
    }
  }

  std::vector<Hypothesis> out;
  out.reserve(finished.size());
  for (auto& f : finished) {
    if (f.ended) f.ids.pop_back();
    out.push_back({std::move(f.ids), f.score, f.ended});
  }
  std::stable_sort(out.begin(), out.end(), [](const Hypothesis& a, const Hypothesis& b) {
    return a.score > b.score;
  });
  return out;
}

GenerationResult Generate(const GeneratorBackend& backend,
                          std::string_view prompt, const DecodeParams& params,
                          std::uint64_t seed) {
  params.Validate();
  if (!backend.Capabilities().generate) {
    throw BackendError("backend " + backend.Identity() + " cannot generate");
  }
  ParsedPrompt parsed = ParsePrompt(prompt);
  const std::vector<int> input = backend.Encode(prompt);
  if (input.size() > backend.MaxInputLength()) {
    throw UsageError("prompt has " + std::to_string(input.size()) +
                     " tokens, backend accepts " +
                     std::to_string(backend.MaxInputLength()));
  }
  const std::vector<int> history = backend.Encode(parsed.trigger);

  GenerationResult result;
  result.prompt = std::string(prompt);
  result.condition = parsed.condition;
  result.trigger = parsed.trigger;
  result.seed = seed;

  std::set<std::string> seen;
  for (const auto& hyp : BeamSearch(backend, input, history, params, seed)) {
    const std::string continuation = backend.Decode(hyp.ids);
    std::string text = parsed.trigger;
    if (!continuation.empty()) text += " " + continuation;
    if (params.no_repeat_bigram && HasRepeatedBigram(SplitWords(text))) continue;
    if (!seen.insert(text).second) continue;
    result.candidates.push_back({std::move(text), hyp.score});
    if (static_cast<int>(result.candidates.size()) == params.num_return) break;
  }
  result.exhausted = static_cast<int>(result.candidates.size()) < params.num_return;
  return result;
}

Json ToJson(const GenerationResult& r, std::string_view set_name,
            std::string_view config_name, const DecodeParams& params) {
  Json cands = Json::array();
  for (const auto& c : r.candidates) {
    Json cj;
    cj["text"] = c.text;
    cj["score"] = c.score;
    cands.push_back(std::move(cj));
  }
  Json j;
  j["index"] = r.index;
  j["prompt"] = r.prompt;
  j["set"] = std::string(set_name);
  j["config"] = std::string(config_name);
  j["condition"] = ToJson(r.condition);
  j["trigger"] = r.trigger;
  j["candidates"] = std::move(cands);
  j["exhausted"] = r.exhausted;
  j["error"] = r.error ? Json(*r.error) : Json(nullptr);
  j["seed"] = r.seed;
  j["params"] = params.ToJson();
  return j;
}

GenerationResult GenerationResultFromJson(const Json& j) {
  GenerationResult r;
  try {
    r.index = j.value("index", std::size_t{0});
    r.prompt = j.at("prompt").get<std::string>();
    if (j.contains("condition") && !j["condition"].is_null()) {
      r.condition = ConditionFromJson(j["condition"]);
      r.trigger = j.value("trigger", std::string());
    } else {
      ParsedPrompt parsed = ParsePrompt(r.prompt);
      r.condition = parsed.condition;
      r.trigger = parsed.trigger;
    }
    for (const auto& c : j.at("candidates")) {
      r.candidates.push_back({c.at("text").get<std::string>(), c.value("score", 0.0)});
    }
    r.exhausted = j.value("exhausted", false);
    if (j.contains("error") && !j["error"].is_null()) {
      r.error = j["error"].get<std::string>();
    }
    r.seed = j.value("seed", std::uint64_t{0});
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed generation line: ") + e.what());
  }
  return r;
}

std::vector<GenerationResult> ReadGenerations(const std::filesystem::path& path) {
  std::vector<GenerationResult> out;
  for (const auto& j : ReadJsonl(path)) out.push_back(GenerationResultFromJson(j));
  return out;
}

std::vector<GenerationResult> BatchGenerate(const GeneratorBackend& backend,
                                            const TestPromptSet& set,
                                            const DecodeParams& params,
                                            std::uint64_t seed,
                                            const BatchOptions& options) {
  params.Validate();
  const std::size_t n = set.prompts.size();
  std::vector<std::optional<GenerationResult>> results(n);
  const std::string set_name = options.set_name.empty()
                                   ? std::string(TestSetNameString(set.name))
                                   : options.set_name;

  if (options.output && options.resume && std::filesystem::exists(*options.output)) {
    for (const auto& line : ReadJsonl(*options.output)) {
      GenerationResult r = GenerationResultFromJson(line);
      if (r.index < n && r.prompt == set.prompts[r.index].PromptString()) {
        results[r.index] = std::move(r);
      }
    }
  }

  std::ofstream progress;
  if (options.output) {
    if (options.output->has_parent_path()) {
      std::filesystem::create_directories(options.output->parent_path());
    }
    progress.open(*options.output, options.resume ? std::ios::app : std::ios::trunc);
    if (!progress) throw DataError("cannot write " + options.output->string());
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      if (results[i]) continue;
      const TestPrompt& tp = set.prompts[i];
      const std::string prompt = tp.PromptString();
      const std::uint64_t prompt_seed = DeriveSeed(seed, std::to_string(i) + "\t" + prompt);
      GenerationResult r;
      try {
        r = Generate(backend, prompt, params, prompt_seed);
      } catch (const std::exception& e) {
        r.prompt = prompt;
        r.condition = tp.condition;
        r.trigger = tp.trigger;
        r.seed = prompt_seed;
        r.exhausted = true;
        r.error = e.what();
        spdlog::warn("prompt {} failed: {}", i, e.what());
      }
      r.index = i;
      std::lock_guard lock(mu);
      if (progress.is_open()) {
        progress << ToJson(r, set_name, options.config_name, params).dump() << '\n';
        progress.flush();
      }
      results[i] = std::move(r);
    }
  };
  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<GenerationResult> out;
  out.reserve(n);
  for (auto& r : results) out.push_back(std::move(*r));
  if (options.output) {
    progress.close();
    std::vector<Json> rows;
    for (const auto& r : out) rows.push_back(ToJson(r, set_name, options.config_name, params));
    WriteJsonl(*options.output, rows);
  }
  return out;
}

double Perplexity(const GeneratorBackend& backend,
                  std::span<const PromptInstance> held_out) {
  if (held_out.empty()) throw DataError("perplexity needs a non-empty held-out set");
  if (!backend.Capabilities().score) {
    throw BackendError("backend " + backend.Identity() + " cannot score");
  }
  double total = 0;
  std::size_t tokens = 0;
  for (const auto& p : held_out) {
    const TargetScore s = ScoreTarget(backend, p.input, p.target);
    total += s.log_likelihood;
    tokens += s.tokens;
  }
  if (tokens == 0) throw DataError("held-out set has no target tokens");
  return std::exp(-total / static_cast<double>(tokens));
}

Json CheckpointInfo::ToJson() const {
  Json j;
  j["schema_version"] = 1;
  j["id"] = id;
  j["kind"] = kind;
  j["identity"] = identity;
  j["architecture"] = architecture;
  j["config"] = config ? Json(std::string(ConfigName(*config))) : Json(nullptr);
  j["hparams"] = hparams;
  j["seed"] = seed;
  j["data_hash"] = data_hash;
  j["trained_at"] = trained_at;
  j["loss_trace"] = loss_trace;
  return j;
}

CheckpointInfo CheckpointInfo::FromJson(const Json& j) {
  CheckpointInfo info;
  try {
    info.id = j.at("id").get<std::string>();
    info.kind = j.at("kind").get<std::string>();
    info.identity = j.value("identity", std::string());
    info.architecture = j.value("architecture", std::string());
    if (j.contains("config") && !j["config"].is_null()) {
      info.config = ParseConfig(j["config"].get<std::string>());
      if (!info.config) throw DataError("unknown config in manifest");
    }
    info.hparams = j.value("hparams", Json::object());
    info.seed = j.value("seed", std::uint64_t{0});
    info.data_hash = j.value("data_hash", std::string());
    info.trained_at = j.value("trained_at", std::string());
    info.loss_trace = j.value("loss_trace", std::vector<double>{});
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed checkpoint manifest: ") + e.what());
  }
  return info;
}

void SaveCheckpoint(const GeneratorBackend& backend, const CheckpointInfo& info,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  backend.SaveWeights(dir);
  CheckpointInfo full = info;
  full.kind = backend.Kind();
  full.identity = backend.Identity();
  WriteFileAtomic(dir / "manifest.json", full.ToJson().dump(2));
}

LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& dir) {
  Json j;
  try {
    j = Json::parse(ReadFile(dir / "manifest.json"));
  } catch (const Json::parse_error& e) {
    throw DataError("corrupt manifest in " + dir.string() + ": " + e.what());
  }
  LoadedCheckpoint loaded;
  loaded.info = CheckpointInfo::FromJson(j);
  loaded.backend = LoadBackend(loaded.info.kind, dir);
  return loaded;
}

std::string DataHash(std::span<const PromptInstance> data) {
  std::string blob;
  for (const auto& p : data) {
    blob += ToJson(p).dump();
    blob += '\n';
  }
  return Sha256Hex(blob);
}

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace cnlg
