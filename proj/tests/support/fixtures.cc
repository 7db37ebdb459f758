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

#include "fixtures.h"

#include <fmt/format.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "cnlg/random.h"
#include "cnlg/testsets.h"
#include "cnlg/text.h"

namespace cnlg::testing {
namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 12> kOpenings = {
    "When I", "I felt", "I was", "When my", "I had", "I got",
    "When a", "I found", "I went", "I saw", "I did", "When someone"};
constexpr std::array<const char*, 16> kVerbs = {
    "lost", "found", "missed", "broke", "heard", "watched", "forgot", "cleaned",
    "won", "failed", "received", "opened", "finished", "dropped", "visited", "saw"};
constexpr std::array<const char*, 16> kObjects = {
    "the train",  "my wallet", "an old letter", "the exam",   "a small dog",
    "the keys",   "my phone",  "a new job",     "the window", "our garden",
    "the dinner", "a friend",  "the meeting",   "my bike",    "the concert",
    "a parcel"};
constexpr std::array<const char*, 8> kTails = {
    "at work", "yesterday", "after school", "in the morning",
    "at home", "on holiday", "last week",   "with my brother"};

std::string RandomSentence(Rng& rng) {
  auto pick = [&rng](const auto& arr) {
    return std::string(arr[static_cast<std::size_t>(
        rng.UniformInt(0, static_cast<std::int64_t>(arr.size()) - 1))]);
  };
  std::string s = pick(kOpenings) + " " + pick(kVerbs) + " " + pick(kObjects);
  if (rng.UniformInt(0, 1)) s += " " + pick(kTails);
  if (rng.UniformInt(0, 2) == 0) s += " and " + pick(kVerbs) + " " + pick(kObjects);
  return s + ".";
}

const std::vector<std::string>& RatingColumns() {
  static const std::vector<std::string> cols = DefaultColumnMap().rating_columns;
  return cols;
}

std::vector<std::string> MakeRow(const std::string& id, const std::string& text,
                                 const std::string& emotion, const ColumnMap& map,
                                 const std::array<int, kNumAppraisals>& scores,
                                 const std::vector<std::string>& header) {
  std::vector<std::string> row(header.size(), "3");
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == map.id_column) row[c] = id;
    if (header[c] == map.text_column) row[c] = text;
    if (header[c] == map.emotion_column) row[c] = emotion;
    for (Appraisal a : kAllAppraisals) {
      if (header[c] == map.appraisal_columns[Index(a)]) {
        row[c] = std::to_string(scores[Index(a)]);
      }
    }
  }
  return row;
}

}  // namespace

ColumnMap DefaultColumnMap() {
  return ColumnMap::Load(fs::path(CNLG_DATA_DIR) / "envent_column_map.json");
}

Table SyntheticEnventExport(std::uint64_t seed, SyntheticExportCounts* counts) {
  const ColumnMap map = DefaultColumnMap();
  Table t;
  t.header = {map.id_column, map.text_column, map.emotion_column};
  for (const auto& c : RatingColumns()) t.header.push_back(c);

  Rng rng(seed);
  SyntheticExportCounts local;
  std::size_t next_id = 0;
  auto id = [&next_id] { return fmt::format("syn{:05d}", next_id++); };

  for (Emotion e : kAllEmotions) {
    const std::size_t n = kTable8Docs[Index(e)];
    // Random subsets of the prescribed sizes, then move appraisals from
    // multi-appraisal documents onto empty ones. Column sums are preserved.
    std::vector<AppraisalVector> v(n, AppraisalVector{});
    for (Appraisal a : kAllAppraisals) {
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      rng.Shuffle(std::span<std::size_t>(idx));
      for (std::size_t k = 0; k < kTable8Cooccurrence[Index(e)][Index(a)]; ++k) {
        v[idx[k]][Index(a)] = true;
      }
    }
    auto count = [](const AppraisalVector& x) { return std::count(x.begin(), x.end(), true); };
    for (std::size_t i = 0; i < n; ++i) {
      if (count(v[i]) > 0) continue;
      bool moved = false;
      for (std::size_t j = 0; j < n && !moved; ++j) {
        if (count(v[j]) < 2) continue;
        for (std::size_t a = 0; a < kNumAppraisals; ++a) {
          if (v[j][a]) {
            v[j][a] = false;
            v[i][a] = true;
            moved = true;
            break;
          }
        }
      }
      if (!moved) throw std::logic_error("cannot place appraisals");
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::array<int, kNumAppraisals> scores{};
      for (std::size_t a = 0; a < kNumAppraisals; ++a) {
        scores[a] = static_cast<int>(v[i][a] ? rng.UniformInt(4, 5) : rng.UniformInt(1, 3));
      }
      t.rows.push_back(
          MakeRow(id(), RandomSentence(rng), std::string(EmotionName(e)), map, scores, t.header));
      ++local.kept;
    }
  }

  // Rows the filter must drop.
  for (const char* other : {"no-emotion", "pride", "relief", "surprise", "trust", "boredom"}) {
    for (int k = 0; k < 5; ++k) {
      std::array<int, kNumAppraisals> scores;
      scores.fill(5);
      t.rows.push_back(MakeRow(id(), RandomSentence(rng), other, map, scores, t.header));
      ++local.other_emotion;
    }
  }
  for (int k = 0; k < 4; ++k) {
    std::array<int, kNumAppraisals> scores;
    scores.fill(k % 3 + 1);
    t.rows.push_back(MakeRow(id(), RandomSentence(rng), "joy", map, scores, t.header));
    ++local.no_appraisal;
  }
  {
    std::array<int, kNumAppraisals> scores;
    scores.fill(4);
    auto row = MakeRow(id(), RandomSentence(rng), "fear", map, scores, t.header);
    row[static_cast<std::size_t>(t.ColumnIndex(map.appraisal_columns[0]))] = "seven";
    t.rows.push_back(std::move(row));
    ++local.malformed;
  }

  // Shuffle so the filter cannot depend on grouping.
  rng.Shuffle(std::span<std::vector<std::string>>(t.rows));
  if (counts) *counts = local;
  return t;
}

std::string ToCsv(const Table& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += CsvEscape(cells[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

std::vector<EventRecord> SyntheticCorpus(std::uint64_t seed) {
  return FilterCorpus(SyntheticEnventExport(seed), DefaultColumnMap()).records;
}

std::vector<EventRecord> RandomRecords(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EventRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    EventRecord r;
    r.id = fmt::format("r{}", i);
    r.emotion = kAllEmotions[static_cast<std::size_t>(rng.UniformInt(0, kNumEmotions - 1))];
    const auto words = rng.UniformInt(1, 25);
    for (std::int64_t w = 0; w < words; ++w) {
      if (w) r.text += ' ';
      const auto& pool = (w % 2) ? kObjects : kVerbs;
      std::string word = pool[static_cast<std::size_t>(rng.UniformInt(0, 15))];
      // Keep one word per slot so word counts stay exact.
      r.text += word.substr(0, word.find(' ') == std::string::npos ? word.size() : word.find(' '));
      if (rng.UniformInt(0, 9) == 0) r.text += std::to_string(rng.UniformInt(0, 99));
    }
    bool any = false;
    for (std::size_t a = 0; a < kNumAppraisals; ++a) {
      const int s = static_cast<int>(rng.UniformInt(1, 5));
      r.appraisal_scores[a] = s;
      r.appraisals[a] = Discretize(s);
      any = any || r.appraisals[a];
    }
    if (!any) {
      r.appraisal_scores[0] = 5;
      r.appraisals[0] = true;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ToyExample> ToyConditionalCorpus() {
  static const std::array<const char*, kNumEmotions> kContinuations = {
      "someone shouted at me in the street",
      "I found a rotten apple in my bag",
      "a stranger followed me home at night",
      "I lied to my best friend about money",
      "I passed my driving test on the first try",
      "my grandmother passed away last winter",
      "I tripped on stage in front of everyone"};
  std::vector<ToyExample> out;
  for (Emotion e : kAllEmotions) {
    for (std::string_view trig : kTriggerPhrases) {
      out.push_back({Condition::E(e), std::string(trig), kContinuations[Index(e)]});
    }
  }
  return out;
}

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "cnlg-test-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path TestDataDir() { return fs::path(CNLG_TEST_DATA_DIR); }

}  // namespace cnlg::testing
