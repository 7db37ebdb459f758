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

#ifndef CNLG_GENERATOR_H_
#define CNLG_GENERATOR_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cnlg/io.h"
#include "cnlg/prompting.h"
#include "cnlg/testsets.h"

namespace cnlg {

struct BackendCapabilities {
  bool fine_tune = false;
  bool score = false;
  bool generate = false;
};

struct TrainParams {
  int epochs = 30;
  double learning_rate = 0.01;
  int batch_size = 16;
  std::uint64_t seed = 0;
  // Stop after this many optimizer steps; -1 for no limit.
  int max_steps = -1;

  Json ToJson() const;
  static TrainParams FromJson(const Json& j);
};

struct TrainReport {
  // Mean per-token cross-entropy of each completed epoch.
  std::vector<double> epoch_loss;
  int steps = 0;
};

// Contract every sequence-to-sequence model adapter implements. Text is
// handled as whitespace words; subword models tokenize internally and map
// back. NextTokenLogProbs must be callable concurrently once training is
// over.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;

  // Architecture family and checkpoint, e.g. "seq2seq-mini/d32-h64".
  virtual std::string Identity() const = 0;
  // Registry key used to reload a checkpoint.
  virtual std::string Kind() const = 0;
  virtual std::size_t MaxInputLength() const = 0;
  virtual BackendCapabilities Capabilities() const = 0;

  virtual std::vector<int> Encode(std::string_view text) const = 0;
  virtual std::string Decode(std::span<const int> ids) const = 0;
  virtual int EosId() const = 0;
  virtual std::size_t VocabSize() const = 0;

  // log p(next | input, prefix) for every vocabulary id. Ids the model never
  // emits carry -infinity.
  virtual std::vector<double> NextTokenLogProbs(
      std::span<const int> input, std::span<const int> prefix) const = 0;

  // Trains in place. Backends without the capability throw BackendError.
  virtual TrainReport Train(std::span<const PromptInstance> data,
                            const TrainParams& params);

  virtual std::unique_ptr<GeneratorBackend> Clone() const = 0;

  // Writes backend-native files into `dir`.
  virtual void SaveWeights(const std::filesystem::path& dir) const = 0;
};

// Total log-likelihood of `target` followed by end-of-sequence, and the
// number of scored tokens.
struct TargetScore {
  double log_likelihood = 0;
  std::size_t tokens = 0;
};
TargetScore ScoreTarget(const GeneratorBackend& backend, std::string_view input,
                        std::string_view target);

// Returns a trained copy of `base`; `base` is left untouched. Throws
// DataError for an empty set or inputs outside the prompt grammar, and
// BackendError when the backend cannot be fine-tuned.
std::unique_ptr<GeneratorBackend> FineTune(const GeneratorBackend& base,
                                           std::span<const PromptInstance> train,
                                           const TrainParams& params,
                                           TrainReport* report = nullptr);

struct DecodeParams {
  int beam_size = 30;
  double temperature = 0.7;
  double top_p = 0.7;
  int num_return = 5;
  bool no_repeat_bigram = true;
  // false turns off the stochastic perturbation; with beam_size 1 and
  // top_p 1 this is greedy decoding.
  bool sample = true;
  int max_new_tokens = 50;

  // Throws UsageError unless beam_size >= num_return >= 1, temperature > 0,
  // 0 < top_p <= 1 and max_new_tokens >= 1.
  void Validate() const;
  Json ToJson() const;
  static DecodeParams FromJson(const Json& j);
};

struct Candidate {
  std::string text;
  double score = 0;
};

struct GenerationResult {
  std::size_t index = 0;
  std::string prompt;
  Condition condition;
  std::string trigger;
  // Score-descending, distinct, at most num_return.
  std::vector<Candidate> candidates;
  // Fewer than num_return valid candidates were found.
  bool exhausted = false;
  std::optional<std::string> error;
  std::uint64_t seed = 0;
};

// Raw hypothesis from the beam search: continuation ids (without the
// end-of-sequence id) and their summed model log-probability.
struct Hypothesis {
  std::vector<int> ids;
  double score = 0;
  bool ended = false;
};

// Sampled beam search. Each live beam is expanded with the tokens of its
// nucleus (smallest set whose tempered probability reaches top_p); when
// sampling, the tempered cumulative log-probabilities are perturbed with
// Gumbel noise before the top beam_size are kept. Extensions that would
// repeat a bigram of `history` + prefix are never proposed.
std::vector<Hypothesis> BeamSearch(const GeneratorBackend& backend,
                                   std::span<const int> input,
                                   std::span<const int> history,
                                   const DecodeParams& params,
                                   std::uint64_t seed);

// Decodes `prompt` and returns candidates whose text is the trigger phrase
// followed by the continuation.
GenerationResult Generate(const GeneratorBackend& backend,
                          std::string_view prompt, const DecodeParams& params,
                          std::uint64_t seed);

struct BatchOptions {
  // When set, every finished prompt is appended as one JSONL line and the
  // file is rewritten in input order at the end.
  std::optional<std::filesystem::path> output;
  // Skip prompts that already have a line in `output`.
  bool resume = false;
  int workers = 1;
  std::string set_name;
  std::string config_name;
};

std::vector<GenerationResult> BatchGenerate(const GeneratorBackend& backend,
                                            const TestPromptSet& set,
                                            const DecodeParams& params,
                                            std::uint64_t seed,
                                            const BatchOptions& options = {});

Json ToJson(const GenerationResult& r, std::string_view set_name,
            std::string_view config_name, const DecodeParams& params);
GenerationResult GenerationResultFromJson(const Json& j);
std::vector<GenerationResult> ReadGenerations(const std::filesystem::path& path);

// exp(-sum log p / tokens) over the targets, each conditioned on its input.
double Perplexity(const GeneratorBackend& backend,
                  std::span<const PromptInstance> held_out);

// Checkpoint directory: manifest.json plus backend-native files.
struct CheckpointInfo {
  std::string id;
  std::string kind;
  std::string identity;
  std::string architecture;
  std::optional<Config> config;
  Json hparams = Json::object();
  std::uint64_t seed = 0;
  std::string data_hash;
  std::string trained_at;
  std::vector<double> loss_trace;

  Json ToJson() const;
  static CheckpointInfo FromJson(const Json& j);
};

void SaveCheckpoint(const GeneratorBackend& backend, const CheckpointInfo& info,
                    const std::filesystem::path& dir);

struct LoadedCheckpoint {
  CheckpointInfo info;
  std::unique_ptr<GeneratorBackend> backend;
};

LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& dir);

// SHA-256 over the JSONL rendering of the instances.
std::string DataHash(std::span<const PromptInstance> data);

std::string UtcTimestamp();

}  // namespace cnlg

#endif  // CNLG_GENERATOR_H_
