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

#include "cnlg/prompting.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>

#include "cnlg/error.h"
#include "cnlg/random.h"
#include "cnlg/text.h"

namespace cnlg {
namespace {

constexpr std::string_view kPrefix = "generate ";

// Slot of an appraisal token (on or off) and its value, or nullopt.
std::optional<std::pair<Appraisal, bool>> ParseAppraisalToken(
    std::string_view token) {
  for (Appraisal a : kAllAppraisals) {
    if (token == AppraisalName(a)) return std::pair{a, true};
    if (token == AppraisalOffToken(a)) return std::pair{a, false};
  }
  return std::nullopt;
}

Json AppraisalsToJson(const AppraisalVector& v) {
  Json j = Json::object();
  for (Appraisal a : kAllAppraisals) {
    j[std::string(AppraisalName(a))] = v[Index(a)];
  }
  return j;
}

AppraisalVector AppraisalsFromJson(const Json& j) {
  AppraisalVector v{};
  if (j.is_string()) {
    auto bits = ParseBitString(j.get<std::string>());
    if (!bits) throw DataError("bad appraisal bit string");
    return *bits;
  }
  for (Appraisal a : kAllAppraisals) {
    v[Index(a)] = j.at(std::string(AppraisalName(a))).get<bool>();
  }
  return v;
}

}  // namespace

void Condition::Validate() const {
  switch (config) {
    case Config::kE:
      if (!emotion || appraisals) {
        throw UsageError("E condition needs an emotion and no appraisals");
      }
      break;
    case Config::kEA:
      if (!emotion || !appraisals) {
        throw UsageError("EA condition needs an emotion and appraisals");
      }
      break;
    case Config::kA:
      if (emotion || !appraisals) {
        throw UsageError("A condition needs appraisals and no emotion");
      }
      break;
  }
}

Json ToJson(const Condition& c) {
  Json j;
  j["config"] = std::string(ConfigName(c.config));
  j["emotion"] = c.emotion ? Json(std::string(EmotionName(*c.emotion)))
                           : Json(nullptr);
  j["appraisals"] = c.appraisals ? AppraisalsToJson(*c.appraisals)
                                 : Json(nullptr);
  return j;
}

Condition ConditionFromJson(const Json& j) {
  Condition c;
  try {
    const auto config = ParseConfig(j.at("config").get<std::string>());
    if (!config) throw DataError("unknown config");
    c.config = *config;
    if (j.contains("emotion") && !j["emotion"].is_null()) {
      c.emotion = ParseEmotion(j["emotion"].get<std::string>());
      if (!c.emotion) throw DataError("unknown emotion");
    }
    if (j.contains("appraisals") && !j["appraisals"].is_null()) {
      c.appraisals = AppraisalsFromJson(j["appraisals"]);
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed condition: ") + e.what());
  }
  c.Validate();
  return c;
}

std::string RenderAppraisalTokens(std::span<const bool> appraisals) {
  if (appraisals.size() != kNumAppraisals) {
    throw UsageError("appraisal vector must have 7 slots, got " +
                     std::to_string(appraisals.size()));
  }
  std::string out;
  for (Appraisal a : kAllAppraisals) {
    if (!out.empty()) out += ' ';
    out += appraisals[Index(a)] ? AppraisalName(a) : AppraisalOffToken(a);
  }
  return out;
}

std::string RenderCondition(const Condition& c, RenderOptions options) {
  c.Validate();
  std::string out;
  if (c.emotion) {
    out += (options.literal_guild_token && *c.emotion == Emotion::kGuilt)
               ? std::string_view("guild")
               : EmotionName(*c.emotion);
  }
  if (c.appraisals) {
    if (!out.empty()) out += ' ';
    out += RenderAppraisalTokens(*c.appraisals);
  }
  return out;
}

std::string BuildPrompt(const Condition& c, std::string_view trigger,
                        RenderOptions options) {
  const std::string normalized = NormalizeWhitespace(trigger);
  if (normalized.empty()) throw UsageError("trigger phrase is empty");
  std::string out(kPrefix);
  out += RenderCondition(c, options);
  out += ": ";
  out += normalized;
  return out;
}

ParsedPrompt ParsePrompt(std::string_view prompt) {
  if (prompt.substr(0, kPrefix.size()) != kPrefix) {
    throw UsageError("prompt does not start with 'generate '");
  }
  const std::string_view rest = prompt.substr(kPrefix.size());
  const std::size_t colon = rest.find(": ");
  if (colon == std::string_view::npos) {
    throw UsageError("prompt lacks the ': ' separator");
  }
  const auto tokens = SplitWords(rest.substr(0, colon));
  ParsedPrompt parsed;
  parsed.trigger = std::string(rest.substr(colon + 2));
  if (parsed.trigger.empty() || parsed.trigger != NormalizeWhitespace(parsed.trigger)) {
    throw UsageError("trigger phrase is empty or not whitespace-normalized");
  }

  std::size_t i = 0;
  std::optional<Emotion> emotion;
  if (!tokens.empty()) {
    // Emotion names are lowercase; appraisal names never parse as emotions.
    const std::string& first = tokens[0];
    if (first == ToLower(first)) emotion = ParseEmotion(first);
    if (emotion) ++i;
  }
  std::optional<AppraisalVector> appraisals;
  if (i < tokens.size()) {
    if (tokens.size() - i != kNumAppraisals) {
      throw UsageError("condition must carry 0 or 7 appraisal tokens");
    }
    AppraisalVector v{};
    for (Appraisal a : kAllAppraisals) {
      const auto tok = ParseAppraisalToken(tokens[i + Index(a)]);
      if (!tok || tok->first != a) {
        throw UsageError("unexpected condition token '" + tokens[i + Index(a)] +
                         "'");
      }
      v[Index(a)] = tok->second;
    }
    appraisals = v;
  }
  if (emotion && appraisals) {
    parsed.condition = Condition::EA(*emotion, *appraisals);
  } else if (emotion) {
    parsed.condition = Condition::E(*emotion);
  } else if (appraisals) {
    parsed.condition = Condition::A(*appraisals);
  } else {
    throw UsageError("prompt carries no condition tokens");
  }
  return parsed;
}

TriggerSlice SliceTrigger(std::string_view text, int n) {
  const auto words = SplitWords(text);
  if (n < 1 || static_cast<std::size_t>(n) >= words.size()) {
    throw UsageError("trigger length " + std::to_string(n) +
                     " leaves no target in a " + std::to_string(words.size()) +
                     "-word text");
  }
  const auto split = words.begin() + n;
  TriggerSlice slice;
  slice.trigger = Join(std::span(words.begin(), split), " ");
  slice.target = Join(std::span(split, words.end()), " ");
  return slice;
}

Json ToJson(const PromptInstance& p) {
  const Json cond = ToJson(p.condition);
  Json j;
  j["input"] = p.input;
  j["target"] = p.target;
  j["source_id"] = p.source_id;
  j["n"] = p.n;
  j["config"] = cond["config"];
  j["emotion"] = cond["emotion"];
  j["appraisals"] = cond["appraisals"];
  return j;
}

PromptInstance PromptInstanceFromJson(const Json& j) {
  PromptInstance p;
  try {
    p.input = j.at("input").get<std::string>();
    p.target = j.at("target").get<std::string>();
    p.source_id = j.value("source_id", std::string());
    p.n = j.value("n", 0);
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed prompt instance: ") + e.what());
  }
  p.condition = j.contains("config") ? ConditionFromJson(j)
                                     : ParsePrompt(p.input).condition;
  return p;
}

std::vector<PromptInstance> ReadPromptInstances(const std::filesystem::path& path) {
  std::vector<PromptInstance> out;
  for (const auto& j : ReadJsonl(path)) out.push_back(PromptInstanceFromJson(j));
  return out;
}

void WritePromptInstances(const std::filesystem::path& path,
                          std::span<const PromptInstance> instances) {
  std::vector<Json> rows;
  rows.reserve(instances.size());
  for (const auto& p : instances) rows.push_back(ToJson(p));
  WriteJsonl(path, rows);
}

Condition ConditionFor(const EventRecord& record, Config config) {
  switch (config) {
    case Config::kE:
      return Condition::E(record.emotion);
    case Config::kEA:
      return Condition::EA(record.emotion, record.appraisals);
    case Config::kA:
      return Condition::A(record.appraisals);
  }
  throw UsageError("unknown config");
}

std::vector<PromptInstance> Augment(std::span<const EventRecord> records,
                                    Config config, std::uint64_t seed,
                                    const AugmentOptions& options) {
  std::vector<PromptInstance> out;
  for (const auto& record : records) {
    const auto words = SplitWords(record.text);
    if (words.size() < 2) {
      const std::string msg =
          record.id + ": fewer than 2 words, no trigger/target slice exists";
      spdlog::debug("{}", msg);
      if (options.diagnostics) options.diagnostics->push_back(msg);
      continue;
    }
    Rng rng(DeriveSeed(seed, record.id));
    const int max_n =
        std::min<int>(kMaxTriggerWords, static_cast<int>(words.size()) - 1);
    const int drawn = static_cast<int>(rng.UniformInt(kMinDuplicates, kMaxDuplicates));
    const int t = std::min(drawn, max_n);

    // Partial Fisher-Yates over {1..max_n}: the first t entries are the
    // distinct trigger lengths, in draw order.
    std::vector<int> lengths(static_cast<std::size_t>(max_n));
    std::iota(lengths.begin(), lengths.end(), 1);
    for (int k = 0; k < t; ++k) {
      const auto j = static_cast<std::size_t>(rng.UniformInt(k, max_n - 1));
      std::swap(lengths[static_cast<std::size_t>(k)], lengths[j]);
    }

    const Condition condition = ConditionFor(record, config);
    for (int k = 0; k < t; ++k) {
      const int n = lengths[static_cast<std::size_t>(k)];
      PromptInstance p;
      p.n = n;
      p.source_id = record.id;
      p.condition = condition;
      p.input = BuildPrompt(condition,
                            Join(std::span(words.begin(), words.begin() + n), " "),
                            options.render);
      p.target = Join(std::span(words.begin() + n, words.end()), " ");
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace cnlg
