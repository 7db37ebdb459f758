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

#include "cnlg/service.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <random>

#include "cnlg/error.h"
#include "cnlg/prompting.h"
#include "cnlg/text.h"
#include "httplib.h"

namespace cnlg {
namespace {

HttpReply ErrorReply(int status, std::string message) {
  HttpReply r;
  r.status = status;
  r.body = {{"schema_version", kServiceSchemaVersion}, {"error", std::move(message)}};
  return r;
}

void RejectUnknown(const Json& j, std::initializer_list<std::string_view> allowed,
                   std::string_view where) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError(fmt::format("unknown field '{}' in {}", key, where));
    }
  }
}

std::string GetString(const Json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(fmt::format("missing field '{}'", key));
  if (!j[key].is_string()) throw UsageError(fmt::format("field '{}' must be a string", key));
  return j[key].get<std::string>();
}

Json AppraisalMap(const AppraisalVector& v) {
  Json m = Json::object();
  for (Appraisal a : kAllAppraisals) m[std::string(AppraisalName(a))] = v[Index(a)];
  return m;
}

struct GenerateRequest {
  Condition condition;
  std::string trigger;
  DecodeParams params;
  std::string checkpoint;
  std::uint64_t seed = 0;
  bool judge = true;
};

GenerateRequest ParseRequest(std::string_view body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("request is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("request must be a JSON object");
  RejectUnknown(j,
                {"schema_version", "config", "emotion", "appraisals", "trigger", "params",
                 "checkpoint", "seed", "judge"},
                "request");
  if (j.contains("schema_version") &&
      (!j["schema_version"].is_number_integer() ||
       j["schema_version"].get<int>() != kServiceSchemaVersion)) {
    throw UsageError(fmt::format("unsupported schema_version; this server speaks {}",
                                 kServiceSchemaVersion));
  }
  GenerateRequest req;
  const auto config = ParseConfig(GetString(j, "config"));
  if (!config) throw UsageError("config must be E, EA or A");
  req.condition.config = *config;
  if (j.contains("emotion") && !j["emotion"].is_null()) {
    const auto e = ParseEmotion(GetString(j, "emotion"));
    if (!e) throw UsageError("unknown emotion '" + j["emotion"].get<std::string>() + "'");
    req.condition.emotion = e;
  }
  if (j.contains("appraisals") && !j["appraisals"].is_null()) {
    if (!j["appraisals"].is_object()) throw UsageError("appraisals must be an object");
    AppraisalVector v{};
    for (const auto& [name, value] : j["appraisals"].items()) {
      const auto a = ParseAppraisal(name);
      if (!a) throw UsageError("unknown appraisal '" + name + "'");
      if (!value.is_boolean()) throw UsageError("appraisal '" + name + "' must be boolean");
      v[Index(*a)] = value.get<bool>();
    }
    req.condition.appraisals = v;
  }
  req.condition.Validate();
  req.trigger = NormalizeWhitespace(GetString(j, "trigger"));
  if (SplitWords(req.trigger).empty()) throw UsageError("trigger needs at least one word");
  req.checkpoint = GetString(j, "checkpoint");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw UsageError("params must be an object");
    RejectUnknown(j["params"],
                  {"beam_size", "temperature", "top_p", "num_return", "no_repeat_bigram",
                   "sample", "max_new_tokens"},
                  "params");
    req.params = DecodeParams::FromJson(j["params"]);
  }
  req.params.Validate();
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_unsigned()) throw UsageError("seed must be a non-negative integer");
    req.seed = j["seed"].get<std::uint64_t>();
  } else {
    static std::mutex mu;
    static std::random_device rd;
    std::lock_guard lock(mu);
    req.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  if (j.contains("judge")) {
    if (!j["judge"].is_boolean()) throw UsageError("judge must be boolean");
    req.judge = j["judge"].get<bool>();
  }
  return req;
}

}  // namespace

ServiceConfig ServiceConfig::FromEnv() {
  ServiceConfig c;
  if (const char* bind = std::getenv("CNLG_BIND"); bind && *bind) {
    const std::string b = bind;
    const auto colon = b.rfind(':');
    if (colon == std::string::npos) {
      c.host = b;
    } else {
      c.host = b.substr(0, colon);
      try {
        c.port = std::stoi(b.substr(colon + 1));
      } catch (const std::exception&) {
        throw UsageError("CNLG_BIND must look like host:port");
      }
    }
  }
  if (const char* d = std::getenv("CNLG_CHECKPOINT_DIR"); d && *d) c.checkpoint_dir = d;
  if (const char* d = std::getenv("CNLG_JUDGE_DIR"); d && *d) c.judge_dir = d;
  if (const char* d = std::getenv("CNLG_UI_DIR"); d && *d) c.ui_dir = d;
  return c;
}

CheckpointStore::Listing CheckpointStore::List() const {
  Listing out;
  std::error_code ec;
  if (!std::filesystem::is_directory(root_, ec)) return out;
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root_, ec)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.json")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    try {
      out.entries.push_back(CheckpointInfo::FromJson(Json::parse(ReadFile(d / "manifest.json"))));
      out.ids.push_back(d.filename().string());
    } catch (const std::exception& e) {
      out.warnings.push_back("skipped " + d.filename().string() + ": corrupt manifest");
      spdlog::warn("skipping checkpoint {}: {}", d.string(), e.what());
    }
  }
  return out;
}

CheckpointStore::Handle CheckpointStore::Acquire(const std::string& id) {
  if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos) {
    return {Status::kNotFound, nullptr};
  }
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(id); it != cache_.end()) return {Status::kReady, it->second};
    if (loading_.count(id)) return {Status::kLoading, nullptr};
    if (!std::filesystem::exists(root_ / id / "manifest.json")) {
      return {Status::kNotFound, nullptr};
    }
    loading_.insert(id);
  }
  std::shared_ptr<const LoadedCheckpoint> loaded;
  try {
    loaded = std::make_shared<const LoadedCheckpoint>(LoadCheckpoint(root_ / id));
  } catch (...) {
    std::lock_guard lock(mu_);
    loading_.erase(id);
    throw;
  }
  std::lock_guard lock(mu_);
  loading_.erase(id);
  cache_[id] = loaded;
  spdlog::info("loaded checkpoint {} ({})", id, loaded->info.identity);
  return {Status::kReady, loaded};
}

std::size_t CheckpointStore::loaded() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)), store_(config_.checkpoint_dir) {
  if (config_.judge_dir) {
    judges_ = std::make_unique<Judges>(Judges::Load(*config_.judge_dir));
    spdlog::info("judges loaded from {}", config_.judge_dir->string());
  }
}

HttpReply Service::Generate(std::string_view body) {
  const auto start = std::chrono::steady_clock::now();
  GenerateRequest req;
  try {
    req = ParseRequest(body);
  } catch (const UsageError& e) {
    return ErrorReply(400, e.what());
  } catch (const Json::exception& e) {
    return ErrorReply(400, e.what());
  }

  CheckpointStore::Handle handle;
  try {
    handle = store_.Acquire(req.checkpoint);
  } catch (const std::exception& e) {
    return ErrorReply(500, "checkpoint failed to load: " + std::string(e.what()));
  }
  if (handle.status == CheckpointStore::Status::kNotFound) {
    return ErrorReply(404, "unknown checkpoint '" + req.checkpoint + "'");
  }
  if (handle.status == CheckpointStore::Status::kLoading) {
    HttpReply r = ErrorReply(503, "checkpoint '" + req.checkpoint + "' is loading");
    r.headers["Retry-After"] = "1";
    return r;
  }
  const auto& info = handle.checkpoint->info;
  if (info.config && *info.config != req.condition.config) {
    return ErrorReply(400, fmt::format("checkpoint '{}' was trained for config {}",
                                       req.checkpoint, ConfigName(*info.config)));
  }

  const std::string prompt = BuildPrompt(req.condition, req.trigger);
  GenerationResult result;
  try {
    result = cnlg::Generate(*handle.checkpoint->backend, prompt, req.params, req.seed);
  } catch (const std::exception& e) {
    return ErrorReply(500, std::string("generation failed: ") + e.what());
  }

  std::vector<Judgment> judged;
  const bool judge = judges_ && req.judge;
  if (judge) {
    std::vector<std::string> texts;
    for (const auto& c : result.candidates) texts.push_back(c.text);
    judged = JudgeTexts(*judges_, texts);
  }

  Json echo;
  echo["config"] = ConfigName(req.condition.config);
  echo["emotion"] = req.condition.emotion ? Json(EmotionName(*req.condition.emotion)) : Json(nullptr);
  echo["appraisals"] =
      req.condition.appraisals ? AppraisalMap(*req.condition.appraisals) : Json(nullptr);
  echo["trigger"] = req.trigger;
  echo["checkpoint"] = req.checkpoint;
  echo["params"] = req.params.ToJson();
  echo["seed"] = req.seed;

  Json candidates = Json::array();
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    Json c;
    c["text"] = result.candidates[i].text;
    c["score"] = result.candidates[i].score;
    if (judge) {
      if (judged[i].valid) {
        c["judged_emotion"] = EmotionName(judged[i].emotion);
        c["judged_appraisals"] = AppraisalMap(judged[i].appraisals);
      } else {
        c["judged_emotion"] = nullptr;
        c["judged_appraisals"] = nullptr;
      }
    }
    candidates.push_back(std::move(c));
  }

  HttpReply r;
  r.body["schema_version"] = kServiceSchemaVersion;
  r.body["request"] = std::move(echo);
  r.body["prompt"] = prompt;
  r.body["candidates"] = std::move(candidates);
  r.body["exhausted"] = result.exhausted;
  r.body["latency_ms"] = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  return r;
}

HttpReply Service::Checkpoints() const {
  const auto listing = store_.List();
  HttpReply r;
  r.body = Json::array();
  for (std::size_t i = 0; i < listing.entries.size(); ++i) {
    const auto& e = listing.entries[i];
    r.body.push_back({{"id", listing.ids[i]},
                      {"config", e.config ? Json(ConfigName(*e.config)) : Json(nullptr)},
                      {"architecture", e.architecture},
                      {"trained_at", e.trained_at}});
  }
  if (!listing.warnings.empty()) r.headers["X-Warning"] = Join(listing.warnings, "; ");
  return r;
}

HttpReply Service::Health() const {
  HttpReply r;
  r.body = {{"status", "ok"},
            {"schema_version", kServiceSchemaVersion},
            {"checkpoints_loaded", store_.loaded()},
            {"judges", judges_ != nullptr}};
  return r;
}

namespace {

void Send(httplib::Response& res, const HttpReply& reply) {
  res.status = reply.status;
  for (const auto& [k, v] : reply.headers) res.set_header(k, v);
  res.set_content(reply.body.dump(), "application/json");
}

}  // namespace

void Service::Attach(httplib::Server& server) {
  server.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
    Send(res, Generate(req.body));
  });
  server.Get("/checkpoints", [this](const httplib::Request&, httplib::Response& res) {
    Send(res, Checkpoints());
  });
  server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    Send(res, Health());
  });
  if (config_.ui_dir && !server.set_mount_point("/", config_.ui_dir->string())) {
    spdlog::warn("ui directory {} not mounted", config_.ui_dir->string());
  }
}

bool Service::Listen() {
  httplib::Server server;
  Attach(server);
  spdlog::info("listening on {}:{}", config_.host, config_.port);
  return server.listen(config_.host, config_.port);
}

}  // namespace cnlg
