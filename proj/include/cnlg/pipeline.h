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

#ifndef CNLG_PIPELINE_H_
#define CNLG_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cnlg/evaluators.h"
#include "cnlg/generator.h"
#include "cnlg/io.h"
#include "cnlg/testsets.h"

namespace cnlg {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kManifestName = "run_manifest.json";

struct PipelineBackend {
  // Architecture label used in cell ids and file names.
  std::string name;
  std::string kind;
  Json options = Json::object();
  TrainParams train;
};

struct PipelineConfig {
  std::string run_id;
  std::filesystem::path output_dir;
  // Filtered records (.jsonl) or a raw export (.csv/.tsv) with column map.
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> column_map;
  std::uint64_t split_seed = 1;
  std::uint64_t augment_seed = 2;
  std::uint64_t train_seed = 3;
  std::uint64_t decode_seed = 4;
  std::uint64_t judge_seed = 5;
  bool stratified_split = false;
  EfaOptions efa;
  std::vector<PipelineBackend> backends;
  std::vector<std::pair<Config, TestSetName>> cells;
  DecodeParams decode;
  ClassifierParams judges;
  int workers = 1;

  // Relative paths are resolved against `base_dir`. Unknown keys and cells
  // outside the evaluation grid are rejected with UsageError.
  static PipelineConfig FromJson(const Json& j, const std::filesystem::path& base_dir);
  static PipelineConfig Load(const std::filesystem::path& path);
  Json ToJson() const;
};

struct PipelineOptions {
  // Continue an existing run; refuse when any recorded stage no longer
  // matches its inputs.
  bool resume = false;
};

struct PipelineSummary {
  std::size_t stages_run = 0;
  std::size_t stages_skipped = 0;
  std::filesystem::path manifest;
  std::vector<EvaluationReport> reports;
};

PipelineSummary RunPipeline(const PipelineConfig& config, const PipelineOptions& options = {});

// SHA-256 of a file, or of the sorted (relative name, file hash) list of a
// directory.
std::string ArtifactHash(const std::filesystem::path& path);

}  // namespace cnlg

#endif  // CNLG_PIPELINE_H_
