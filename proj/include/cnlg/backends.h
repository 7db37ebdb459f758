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

#ifndef CNLG_BACKENDS_H_
#define CNLG_BACKENDS_H_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cnlg/generator.h"

namespace cnlg {

// Word vocabulary with four reserved ids.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kEos = 2;
  static constexpr int kBos = 3;

  Vocabulary();
  // Reserved ids first, then `words` in first-seen order without repeats.
  explicit Vocabulary(std::span<const std::string> words);

  // Every whitespace word of every text, first-seen order.
  static Vocabulary FromTexts(std::span<const std::string> texts);

  int Id(std::string_view word) const;
  const std::string& Word(int id) const { return words_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  std::vector<int> Encode(std::string_view text) const;
  std::string Decode(std::span<const int> ids) const;

 private:
  void Add(const std::string& word);

  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

// Small trainable encoder-decoder. The encoder mean-pools input embeddings
// and projects them through a tanh layer; the decoder predicts each token
// from that context, the two previous target tokens and the position with
// one tanh hidden layer. Trained with Adam on token cross-entropy.
class MiniSeq2Seq : public GeneratorBackend {
 public:
  struct Options {
    int embedding_dim = 32;
    int hidden_dim = 64;
    int max_positions = 64;
    std::size_t max_input_length = 128;
    std::uint64_t init_seed = 1;
  };

  static constexpr std::string_view kKind = "seq2seq-mini";

  MiniSeq2Seq(Vocabulary vocab, const Options& options);

  std::string Identity() const override;
  std::string Kind() const override { return std::string(kKind); }
  std::size_t MaxInputLength() const override { return options_.max_input_length; }
  BackendCapabilities Capabilities() const override { return {true, true, true}; }
  std::vector<int> Encode(std::string_view text) const override {
    return vocab_.Encode(text);
  }
  std::string Decode(std::span<const int> ids) const override {
    return vocab_.Decode(ids);
  }
  int EosId() const override { return Vocabulary::kEos; }
  std::size_t VocabSize() const override { return vocab_.size(); }
  std::vector<double> NextTokenLogProbs(std::span<const int> input,
                                        std::span<const int> prefix) const override;
  TrainReport Train(std::span<const PromptInstance> data,
                    const TrainParams& params) override;
  std::unique_ptr<GeneratorBackend> Clone() const override;
  void SaveWeights(const std::filesystem::path& dir) const override;

  static std::unique_ptr<MiniSeq2Seq> Load(const std::filesystem::path& dir);

  const Vocabulary& vocab() const { return vocab_; }

 private:
  struct Params {
    Eigen::MatrixXf input_embed;   // V x d
    Eigen::MatrixXf enc_w;         // d x d
    Eigen::VectorXf enc_b;         // d
    Eigen::MatrixXf output_embed;  // V x d
    Eigen::MatrixXf pos_embed;     // P x d
    Eigen::MatrixXf hid_w;         // H x 4d
    Eigen::VectorXf hid_b;         // H
    Eigen::MatrixXf out_w;         // V x H
    Eigen::VectorXf out_b;         // V

    void SetZeroLike(const Params& other);
  };

  Eigen::VectorXf EncodeContext(std::span<const int> input,
                                Eigen::VectorXf* pooled) const;
  Eigen::VectorXf DecoderInput(const Eigen::VectorXf& context,
                               std::span<const int> prefix) const;
  int PositionIndex(std::size_t t) const;

  Vocabulary vocab_;
  Options options_;
  Params params_;
};

// Hand-specified next-token table keyed by the previous token ("<s>" at the
// start). Contexts without an entry fall back to a uniform distribution over
// the non-reserved vocabulary plus end-of-sequence. Inputs are ignored.
class TableBackend : public GeneratorBackend {
 public:
  static constexpr std::string_view kKind = "table";

  // `table[prev][next]` is a probability; each row is renormalized.
  TableBackend(std::vector<std::string> words,
               std::map<std::string, std::map<std::string, double>> table);

  // Uniform over `size` emittable tokens (size - 1 words plus "</s>").
  static std::unique_ptr<TableBackend> Uniform(std::size_t size);

  static std::unique_ptr<TableBackend> FromJson(const Json& j);
  Json ToJson() const;

  std::string Identity() const override { return "table/" + std::to_string(VocabSize()); }
  std::string Kind() const override { return std::string(kKind); }
  std::size_t MaxInputLength() const override { return 1024; }
  BackendCapabilities Capabilities() const override { return {false, true, true}; }
  std::vector<int> Encode(std::string_view text) const override {
    return vocab_.Encode(text);
  }
  std::string Decode(std::span<const int> ids) const override {
    return vocab_.Decode(ids);
  }
  int EosId() const override { return Vocabulary::kEos; }
  // Emittable tokens: the listed words plus end-of-sequence.
  std::size_t VocabSize() const override { return vocab_.size() - 3; }
  std::vector<double> NextTokenLogProbs(std::span<const int> input,
                                        std::span<const int> prefix) const override;
  std::unique_ptr<GeneratorBackend> Clone() const override;
  void SaveWeights(const std::filesystem::path& dir) const override;

 private:
  std::vector<std::string> words_;
  std::map<std::string, std::map<std::string, double>> table_;
  Vocabulary vocab_;
};

// Instantiates a backend of registry kind `kind` from checkpoint files.
std::unique_ptr<GeneratorBackend> LoadBackend(std::string_view kind,
                                              const std::filesystem::path& dir);

// Untrained backend of `kind` whose vocabulary covers `data`. `options`
// holds backend-specific settings; unknown keys are rejected.
std::unique_ptr<GeneratorBackend> CreateBackend(std::string_view kind, const Json& options,
                                                std::span<const PromptInstance> data);

}  // namespace cnlg

#endif  // CNLG_BACKENDS_H_
