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

#include "cnlg/testsets.h"

#include <algorithm>
#include <map>

#include "cnlg/error.h"

namespace cnlg {

std::string_view TestSetNameString(TestSetName name) {
  switch (name) {
    case TestSetName::kEP:
      return "EP";
    case TestSetName::kEfA:
      return "EfA";
    case TestSetName::kEnAP:
      return "EnAP";
    case TestSetName::kAP:
      return "AP";
    case TestSetName::kCustom:
      return "custom";
  }
  return "?";
}

std::optional<TestSetName> ParseTestSetName(std::string_view name) {
  for (auto n : {TestSetName::kEP, TestSetName::kEfA, TestSetName::kEnAP,
                 TestSetName::kAP, TestSetName::kCustom}) {
    if (name == TestSetNameString(n)) return n;
  }
  return std::nullopt;
}

TestPromptSet BuildEp() {
  TestPromptSet set{TestSetName::kEP, {},
                    "13 triggers x 7 emotions, emotion-only conditions"};
  for (auto trigger : kTriggerPhrases) {
    for (Emotion e : kAllEmotions) {
      set.prompts.push_back({Condition::E(e), std::string(trigger)});
    }
  }
  return set;
}

std::vector<std::pair<AppraisalVector, std::size_t>> RankAppraisalVectors(
    std::span<const EventRecord> corpus, Emotion emotion) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : corpus) {
    if (r.emotion == emotion) ++counts[BitString(r.appraisals)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  // std::map iteration is already in ascending bit-string order, so a stable
  // sort by count keeps the tie order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::pair<AppraisalVector, std::size_t>> out;
  out.reserve(ranked.size());
  for (const auto& [bits, count] : ranked) {
    out.emplace_back(*ParseBitString(bits), count);
  }
  return out;
}

namespace {

std::vector<AppraisalVector> MarginalOneHots(std::span<const EventRecord> corpus,
                                             Emotion emotion) {
  std::array<std::size_t, kNumAppraisals> counts{};
  for (const auto& r : corpus) {
    if (r.emotion != emotion) continue;
    for (Appraisal a : kAllAppraisals) {
      if (r.appraisals[Index(a)]) ++counts[Index(a)];
    }
  }
  std::vector<Appraisal> order;
  for (Appraisal a : kAllAppraisals) {
    if (counts[Index(a)] > 0) order.push_back(a);
  }
  std::stable_sort(order.begin(), order.end(), [&](Appraisal x, Appraisal y) {
    return counts[Index(x)] > counts[Index(y)];
  });
  std::vector<AppraisalVector> out;
  for (Appraisal a : order) {
    AppraisalVector v{};
    v[Index(a)] = true;
    out.push_back(v);
  }
  return out;
}

}  // namespace

TestPromptSet BuildEfa(std::span<const EventRecord> corpus, EfaOptions options) {
  std::array<std::vector<AppraisalVector>, kNumEmotions> chosen;
  std::string shortfall;
  for (Emotion e : kAllEmotions) {
    std::vector<AppraisalVector> vectors;
    if (options.ranking == EfaRanking::kVectors) {
      for (const auto& [v, count] : RankAppraisalVectors(corpus, e)) {
        vectors.push_back(v);
      }
    } else {
      vectors = MarginalOneHots(corpus, e);
    }
    if (vectors.size() < options.top_k) {
      shortfall += " " + std::string(EmotionName(e)) + "=" +
                   std::to_string(vectors.size());
    }
    vectors.resize(std::min(vectors.size(), options.top_k));
    chosen[Index(e)] = std::move(vectors);
  }
  if (!shortfall.empty()) {
    throw DataError("EfA needs " + std::to_string(options.top_k) +
                    " appraisal vectors per emotion; available:" + shortfall);
  }
  TestPromptSet set{
      TestSetName::kEfA,
      {},
      std::string("13 triggers x 7 emotions x top-") +
          std::to_string(options.top_k) +
          (options.ranking == EfaRanking::kVectors
               ? " co-occurring appraisal vectors (ties: ascending bit string)"
               : " marginal appraisals as one-hot vectors")};
  for (auto trigger : kTriggerPhrases) {
    for (Emotion e : kAllEmotions) {
      for (const auto& v : chosen[Index(e)]) {
        set.prompts.push_back({Condition::EA(e, v), std::string(trigger)});
      }
    }
  }
  return set;
}

TestPromptSet BuildEnap() {
  TestPromptSet set{TestSetName::kEnAP, {},
                    "13 triggers x 7 emotions, every appraisal off"};
  for (auto trigger : kTriggerPhrases) {
    for (Emotion e : kAllEmotions) {
      set.prompts.push_back({Condition::EA(e, AppraisalVector{}), std::string(trigger)});
    }
  }
  return set;
}

TestPromptSet BuildAp() {
  TestPromptSet set{TestSetName::kAP, {},
                    "13 triggers x (7 one-hot appraisal vectors + all off)"};
  for (auto trigger : kTriggerPhrases) {
    for (Appraisal a : kAllAppraisals) {
      AppraisalVector v{};
      v[Index(a)] = true;
      set.prompts.push_back({Condition::A(v), std::string(trigger)});
    }
    set.prompts.push_back({Condition::A(AppraisalVector{}), std::string(trigger)});
  }
  return set;
}

TestPromptSet BuildCustom(std::span<const std::string> triggers,
                          std::span<const Condition> conditions) {
  TestPromptSet set{TestSetName::kCustom, {}, "user supplied"};
  for (const auto& trigger : triggers) {
    for (const auto& c : conditions) {
      c.Validate();
      set.prompts.push_back({c, trigger});
    }
  }
  return set;
}

std::vector<std::pair<Config, TestSetName>> EvaluationGrid() {
  return {{Config::kE, TestSetName::kEP},   {Config::kEA, TestSetName::kEP},
          {Config::kEA, TestSetName::kEfA}, {Config::kEA, TestSetName::kEnAP},
          {Config::kEA, TestSetName::kAP},  {Config::kA, TestSetName::kAP}};
}

Json ToJson(TestSetName set, const TestPrompt& p) {
  const Json cond = ToJson(p.condition);
  Json j;
  j["set"] = std::string(TestSetNameString(set));
  j["config"] = cond["config"];
  j["emotion"] = cond["emotion"];
  j["appraisals"] = cond["appraisals"];
  j["trigger"] = p.trigger;
  j["prompt_string"] = p.PromptString();
  return j;
}

TestPrompt TestPromptFromJson(const Json& j) {
  TestPrompt p;
  p.condition = ConditionFromJson(j);
  try {
    p.trigger = j.at("trigger").get<std::string>();
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed test prompt: ") + e.what());
  }
  return p;
}

void WriteTestSet(const std::filesystem::path& path, const TestPromptSet& set) {
  std::vector<Json> rows;
  rows.reserve(set.prompts.size());
  for (const auto& p : set.prompts) rows.push_back(ToJson(set.name, p));
  WriteJsonl(path, rows);
}

TestPromptSet ReadTestSet(const std::filesystem::path& path) {
  TestPromptSet set;
  const auto rows = ReadJsonl(path);
  for (const auto& j : rows) {
    if (j.contains("set")) {
      if (auto name = ParseTestSetName(j["set"].get<std::string>())) set.name = *name;
    }
    set.prompts.push_back(TestPromptFromJson(j));
  }
  set.provenance = "read from " + path.string();
  return set;
}

}  // namespace cnlg
