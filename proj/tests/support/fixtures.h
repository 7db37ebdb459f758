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

// Shared fixtures for the unit, integration and acceptance suites.

#ifndef CNLG_TESTS_SUPPORT_FIXTURES_H_
#define CNLG_TESTS_SUPPORT_FIXTURES_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cnlg/corpus.h"
#include "cnlg/io.h"
#include "cnlg/prompting.h"
#include "cnlg/types.h"

namespace cnlg::testing {

// Filtered crowd-enVENT statistics: documents per emotion and, per emotion,
// how many documents carry each appraisal. Emotion and appraisal order
// follow kAllEmotions / kAllAppraisals.
inline constexpr std::array<std::size_t, kNumEmotions> kTable8Docs = {450, 450, 450, 225,
                                                                       450, 450, 225};
inline constexpr std::array<std::array<std::size_t, kNumAppraisals>, kNumEmotions>
    kTable8Cooccurrence = {{
        {305, 55, 86, 72, 15, 309, 184},     // anger
        {228, 66, 90, 103, 6, 193, 155},     // disgust
        {378, 119, 100, 157, 17, 345, 148},  // fear
        {129, 168, 119, 33, 16, 119, 109},   // guilt
        {292, 274, 240, 77, 417, 192, 241},  // joy
        {290, 94, 65, 200, 5, 336, 189},     // sadness
        {140, 163, 93, 37, 9, 125, 100},     // shame
    }};
inline constexpr std::array<std::size_t, kNumAppraisals> kTable8AppraisalTotals = {
    1762, 939, 793, 679, 485, 1619, 1126};

struct SyntheticExportCounts {
  std::size_t kept = 0;
  std::size_t other_emotion = 0;
  std::size_t no_appraisal = 0;
  std::size_t malformed = 0;
};

// Raw export in the crowd-enVENT column layout whose filtered records hit
// the Table 8 counts exactly, plus rows the filter has to drop.
Table SyntheticEnventExport(std::uint64_t seed = 7, SyntheticExportCounts* counts = nullptr);

std::string ToCsv(const Table& table);

ColumnMap DefaultColumnMap();

// Filtered synthetic corpus (2700 records).
std::vector<EventRecord> SyntheticCorpus(std::uint64_t seed = 7);

// Random records with 1..25-word texts for property tests.
std::vector<EventRecord> RandomRecords(std::size_t n, std::uint64_t seed);

// Condition whose emotion fixes the continuation, for the toy oracle.
struct ToyExample {
  Condition condition;
  std::string trigger;
  std::string continuation;
};
std::vector<ToyExample> ToyConditionalCorpus();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Directory holding frozen golden files.
std::filesystem::path TestDataDir();

}  // namespace cnlg::testing

#endif  // CNLG_TESTS_SUPPORT_FIXTURES_H_
