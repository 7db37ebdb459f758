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

#include "cnlg/backends.h"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "cnlg/error.h"
#include "cnlg/random.h"
#include "cnlg/text.h"

namespace cnlg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-softmax of `logits` restricted to the entries with allowed[i].
std::vector<double> LogSoftmax(const Eigen::VectorXf& logits,
                               const std::vector<bool>& allowed) {
  double max = kNegInf;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (allowed[static_cast<std::size_t>(i)]) max = std::max(max, double(logits[i]));
  }
  double sum = 0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (allowed[static_cast<std::size_t>(i)]) sum += std::exp(double(logits[i]) - max);
  }
  const double log_z = max + std::log(sum);
  std::vector<double> out(static_cast<std::size_t>(logits.size()), kNegInf);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (allowed[static_cast<std::size_t>(i)]) {
      out[static_cast<std::size_t>(i)] = double(logits[i]) - log_z;
    }
  }
  return out;
}

void WriteMatrix(std::ofstream& out, const Eigen::MatrixXf& m) {
  const std::int32_t rows = static_cast<std::int32_t>(m.rows());
  const std::int32_t cols = static_cast<std::int32_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(float) * m.size()));
}

Eigen::MatrixXf ReadMatrix(std::ifstream& in) {
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || rows < 0 || cols < 0) throw DataError("corrupt weight file");
  Eigen::MatrixXf m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(float) * m.size()));
  if (!in) throw DataError("truncated weight file");
  return m;
}

Eigen::MatrixXf RandomMatrix(Rng& rng, int rows, int cols, double scale) {
  Eigen::MatrixXf m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = static_cast<float>((2.0 * rng.UniformReal() - 1.0) * scale);
    }
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  for (const char* w : {"<pad>", "<unk>", "</s>", "<s>"}) Add(w);
}

Vocabulary::Vocabulary(std::span<const std::string> words) : Vocabulary() {
  for (const auto& w : words) Add(w);
}

Vocabulary Vocabulary::FromTexts(std::span<const std::string> texts) {
  std::vector<std::string> words;
  for (const auto& t : texts) {
    for (auto& w : SplitWords(t)) words.push_back(std::move(w));
  }
  return Vocabulary(words);
}

void Vocabulary::Add(const std::string& word) {
  if (index_.emplace(word, static_cast<int>(words_.size())).second) {
    words_.push_back(word);
  }
}

int Vocabulary::Id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::Encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& w : SplitWords(text)) ids.push_back(Id(w));
  return ids;
}

std::string Vocabulary::Decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (id == kEos || id == kPad || id == kBos) continue;
    if (!out.empty()) out += ' ';
    out += Word(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MiniSeq2Seq

template <typename F>
void ForEachTensor(F&& f, auto&... params) {
  f(params.input_embed...);
  f(params.enc_w...);
  f(params.enc_b...);
  f(params.output_embed...);
  f(params.pos_embed...);
  f(params.hid_w...);
  f(params.hid_b...);
  f(params.out_w...);
  f(params.out_b...);
}

void MiniSeq2Seq::Params::SetZeroLike(const Params& other) {
  input_embed = Eigen::MatrixXf::Zero(other.input_embed.rows(), other.input_embed.cols());
  enc_w = Eigen::MatrixXf::Zero(other.enc_w.rows(), other.enc_w.cols());
  enc_b = Eigen::VectorXf::Zero(other.enc_b.size());
  output_embed = Eigen::MatrixXf::Zero(other.output_embed.rows(), other.output_embed.cols());
  pos_embed = Eigen::MatrixXf::Zero(other.pos_embed.rows(), other.pos_embed.cols());
  hid_w = Eigen::MatrixXf::Zero(other.hid_w.rows(), other.hid_w.cols());
  hid_b = Eigen::VectorXf::Zero(other.hid_b.size());
  out_w = Eigen::MatrixXf::Zero(other.out_w.rows(), other.out_w.cols());
  out_b = Eigen::VectorXf::Zero(other.out_b.size());
}

MiniSeq2Seq::MiniSeq2Seq(Vocabulary vocab, const Options& options)
    : vocab_(std::move(vocab)), options_(options) {
  const int v = static_cast<int>(vocab_.size());
  const int d = options_.embedding_dim;
  const int h = options_.hidden_dim;
  Rng rng(options_.init_seed);
  params_.input_embed = RandomMatrix(rng, v, d, 0.1);
  params_.enc_w = RandomMatrix(rng, d, d, 1.0 / std::sqrt(d));
  params_.enc_b = Eigen::VectorXf::Zero(d);
  params_.output_embed = RandomMatrix(rng, v, d, 0.1);
  params_.pos_embed = RandomMatrix(rng, options_.max_positions, d, 0.1);
  params_.hid_w = RandomMatrix(rng, h, 4 * d, 1.0 / std::sqrt(4.0 * d));
  params_.hid_b = Eigen::VectorXf::Zero(h);
  params_.out_w = RandomMatrix(rng, v, h, 1.0 / std::sqrt(h));
  params_.out_b = Eigen::VectorXf::Zero(v);
}

std::string MiniSeq2Seq::Identity() const {
  return std::string(kKind) + "/d" + std::to_string(options_.embedding_dim) +
         "-h" + std::to_string(options_.hidden_dim) + "-v" +
         std::to_string(vocab_.size());
}

int MiniSeq2Seq::PositionIndex(std::size_t t) const {
  return static_cast<int>(std::min<std::size_t>(t, options_.max_positions - 1));
}

Eigen::VectorXf MiniSeq2Seq::EncodeContext(std::span<const int> input,
                                           Eigen::VectorXf* pooled) const {
  Eigen::VectorXf mean = Eigen::VectorXf::Zero(options_.embedding_dim);
  for (int id : input) mean += params_.input_embed.row(id).transpose();
  if (!input.empty()) mean /= static_cast<float>(input.size());
  if (pooled) *pooled = mean;
  return (params_.enc_w * mean + params_.enc_b).array().tanh();
}

Eigen::VectorXf MiniSeq2Seq::DecoderInput(const Eigen::VectorXf& context,
                                          std::span<const int> prefix) const {
  const int d = options_.embedding_dim;
  const std::size_t t = prefix.size();
  const int prev1 = t >= 1 ? prefix[t - 1] : Vocabulary::kBos;
  const int prev2 = t >= 2 ? prefix[t - 2] : Vocabulary::kBos;
  Eigen::VectorXf z(4 * d);
  z.segment(0, d) = context;
  z.segment(d, d) = params_.output_embed.row(prev1).transpose();
  z.segment(2 * d, d) = params_.output_embed.row(prev2).transpose();
  z.segment(3 * d, d) = params_.pos_embed.row(PositionIndex(t)).transpose();
  return z;
}

std::vector<double> MiniSeq2Seq::NextTokenLogProbs(
    std::span<const int> input, std::span<const int> prefix) const {
  const Eigen::VectorXf context = EncodeContext(input, nullptr);
  const Eigen::VectorXf z = DecoderInput(context, prefix);
  const Eigen::VectorXf hidden = (params_.hid_w * z + params_.hid_b).array().tanh();
  const Eigen::VectorXf logits = params_.out_w * hidden + params_.out_b;
  std::vector<bool> allowed(vocab_.size(), true);
  allowed[Vocabulary::kPad] = false;
  allowed[Vocabulary::kBos] = false;
  return LogSoftmax(logits, allowed);
}

TrainReport MiniSeq2Seq::Train(std::span<const PromptInstance> data,
                               const TrainParams& params) {
  struct Example {
    std::vector<int> input;
    std::vector<int> target;  // ends with </s>
  };
  std::vector<Example> examples;
  examples.reserve(data.size());
  for (const auto& p : data) {
    Example ex{vocab_.Encode(p.input), vocab_.Encode(p.target)};
    if (ex.input.size() > options_.max_input_length) {
      ex.input.resize(options_.max_input_length);
    }
    ex.target.push_back(Vocabulary::kEos);
    examples.push_back(std::move(ex));
  }

  const int d = options_.embedding_dim;
  const float beta1 = 0.9f;
  const float beta2 = 0.999f;
  const float eps = 1e-8f;
  Params grad;
  Params m;
  Params v;
  grad.SetZeroLike(params_);
  m.SetZeroLike(params_);
  v.SetZeroLike(params_);

  std::vector<bool> allowed(vocab_.size(), true);
  allowed[Vocabulary::kPad] = false;
  allowed[Vocabulary::kBos] = false;

  Rng rng(params.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, params.batch_size));

  TrainReport report;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    if (params.max_steps >= 0 && report.steps >= params.max_steps) break;
    rng.Shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      if (params.max_steps >= 0 && report.steps >= params.max_steps) break;
      const std::size_t end = std::min(order.size(), start + batch);
      ForEachTensor([](auto& g) { g.setZero(); }, grad);
      std::size_t batch_tokens = 0;
      for (std::size_t k = start; k < end; ++k) batch_tokens += examples[order[k]].target.size();
      const float scale = 1.0f / static_cast<float>(batch_tokens);

      for (std::size_t k = start; k < end; ++k) {
        const Example& ex = examples[order[k]];
        Eigen::VectorXf pooled;
        const Eigen::VectorXf context = EncodeContext(ex.input, &pooled);
        Eigen::VectorXf d_context = Eigen::VectorXf::Zero(d);
        for (std::size_t t = 0; t < ex.target.size(); ++t) {
          const std::span<const int> prefix(ex.target.data(), t);
          const Eigen::VectorXf z = DecoderInput(context, prefix);
          const Eigen::VectorXf hidden =
              (params_.hid_w * z + params_.hid_b).array().tanh();
          const Eigen::VectorXf logits = params_.out_w * hidden + params_.out_b;
          const std::vector<double> logp = LogSoftmax(logits, allowed);
          const int gold = ex.target[t];
          epoch_loss -= logp[static_cast<std::size_t>(gold)];

          Eigen::VectorXf d_logits(logits.size());
          for (Eigen::Index i = 0; i < logits.size(); ++i) {
            d_logits[i] = static_cast<float>(std::exp(logp[static_cast<std::size_t>(i)]));
          }
          d_logits[gold] -= 1.0f;
          d_logits *= scale;

          grad.out_w.noalias() += d_logits * hidden.transpose();
          grad.out_b += d_logits;
          const Eigen::VectorXf d_hidden = params_.out_w.transpose() * d_logits;
          const Eigen::VectorXf d_pre =
              d_hidden.array() * (1.0f - hidden.array().square());
          grad.hid_w.noalias() += d_pre * z.transpose();
          grad.hid_b += d_pre;
          const Eigen::VectorXf d_z = params_.hid_w.transpose() * d_pre;

          d_context += d_z.segment(0, d);
          const int prev1 = t >= 1 ? ex.target[t - 1] : Vocabulary::kBos;
          const int prev2 = t >= 2 ? ex.target[t - 2] : Vocabulary::kBos;
          grad.output_embed.row(prev1) += d_z.segment(d, d).transpose();
          grad.output_embed.row(prev2) += d_z.segment(2 * d, d).transpose();
          grad.pos_embed.row(PositionIndex(t)) += d_z.segment(3 * d, d).transpose();
        }
        const Eigen::VectorXf d_enc_pre =
            d_context.array() * (1.0f - context.array().square());
        grad.enc_w.noalias() += d_enc_pre * pooled.transpose();
        grad.enc_b += d_enc_pre;
        if (!ex.input.empty()) {
          const Eigen::VectorXf d_pooled =
              params_.enc_w.transpose() * d_enc_pre / static_cast<float>(ex.input.size());
          for (int id : ex.input) grad.input_embed.row(id) += d_pooled.transpose();
        }
        epoch_tokens += ex.target.size();
      }

      ++report.steps;
      const float lr_t = static_cast<float>(
          params.learning_rate *
          std::sqrt(1.0 - std::pow(beta2, report.steps)) /
          (1.0 - std::pow(beta1, report.steps)));
      ForEachTensor(
          [&](auto& p, auto& g, auto& mm, auto& vv) {
            mm = beta1 * mm + (1.0f - beta1) * g;
            vv = beta2 * vv + (1.0f - beta2) * g.cwiseProduct(g);
            p.array() -= lr_t * mm.array() / (vv.array().sqrt() + eps);
          },
          params_, grad, m, v);
    }
    if (epoch_tokens > 0) {
      report.epoch_loss.push_back(epoch_loss / static_cast<double>(epoch_tokens));
      spdlog::debug("epoch {} loss {:.4f}", epoch + 1, report.epoch_loss.back());
    }
  }
  return report;
}

std::unique_ptr<GeneratorBackend> MiniSeq2Seq::Clone() const {
  return std::make_unique<MiniSeq2Seq>(*this);
}

void MiniSeq2Seq::SaveWeights(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  Json meta;
  meta["words"] = vocab_.words();
  meta["embedding_dim"] = options_.embedding_dim;
  meta["hidden_dim"] = options_.hidden_dim;
  meta["max_positions"] = options_.max_positions;
  meta["max_input_length"] = options_.max_input_length;
  meta["init_seed"] = options_.init_seed;
  WriteFileAtomic(dir / "vocab.json", meta.dump());
  const auto tmp = dir / "weights.bin.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    ForEachTensor([&](const auto& t) { WriteMatrix(out, t); }, params_);
  }
  std::filesystem::rename(tmp, dir / "weights.bin");
}

std::unique_ptr<MiniSeq2Seq> MiniSeq2Seq::Load(const std::filesystem::path& dir) {
  Json meta;
  try {
    meta = Json::parse(ReadFile(dir / "vocab.json"));
  } catch (const Json::exception& e) {
    throw DataError("corrupt vocab.json: " + std::string(e.what()));
  }
  const auto words = meta.at("words").get<std::vector<std::string>>();
  if (words.size() < 4) throw DataError("vocabulary lacks reserved ids");
  Options options;
  options.embedding_dim = meta.at("embedding_dim").get<int>();
  options.hidden_dim = meta.at("hidden_dim").get<int>();
  options.max_positions = meta.at("max_positions").get<int>();
  options.max_input_length = meta.at("max_input_length").get<std::size_t>();
  options.init_seed = meta.at("init_seed").get<std::uint64_t>();
  auto model = std::make_unique<MiniSeq2Seq>(
      Vocabulary(std::span(words.begin() + 4, words.end())), options);
  std::ifstream in(dir / "weights.bin", std::ios::binary);
  if (!in) throw DataError("missing weights.bin in " + dir.string());
  ForEachTensor(
      [&](auto& t) {
        Eigen::MatrixXf loaded = ReadMatrix(in);
        if (loaded.rows() != t.rows() || loaded.cols() != t.cols()) {
          throw DataError("weight shape mismatch in " + dir.string());
        }
        t = loaded;
      },
      model->params_);
  return model;
}

// ---------------------------------------------------------------------------
// TableBackend

TableBackend::TableBackend(std::vector<std::string> words,
                           std::map<std::string, std::map<std::string, double>> table)
    : words_(std::move(words)), table_(std::move(table)), vocab_(words_) {
  for (auto& [prev, row] : table_) {
    double sum = 0;
    for (const auto& [next, p] : row) {
      if (p < 0) throw UsageError("negative probability in table row " + prev);
      if (next != "</s>" && vocab_.Id(next) == Vocabulary::kUnk) {
        throw UsageError("table row " + prev + " names unknown word " + next);
      }
      sum += p;
    }
    if (sum <= 0) throw UsageError("empty table row " + prev);
    for (auto& [next, p] : row) p /= sum;
  }
}

std::unique_ptr<TableBackend> TableBackend::Uniform(std::size_t size) {
  if (size < 2) throw UsageError("uniform table needs at least 2 tokens");
  std::vector<std::string> words;
  for (std::size_t i = 1; i < size; ++i) words.push_back("w" + std::to_string(i));
  return std::make_unique<TableBackend>(std::move(words),
                                        std::map<std::string, std::map<std::string, double>>{});
}

std::unique_ptr<TableBackend> TableBackend::FromJson(const Json& j) {
  try {
    return std::make_unique<TableBackend>(
        j.at("words").get<std::vector<std::string>>(),
        j.at("table").get<std::map<std::string, std::map<std::string, double>>>());
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed table backend: ") + e.what());
  }
}

Json TableBackend::ToJson() const {
  Json j;
  j["words"] = words_;
  j["table"] = table_;
  return j;
}

std::vector<double> TableBackend::NextTokenLogProbs(
    std::span<const int> /*input*/, std::span<const int> prefix) const {
  std::vector<double> out(vocab_.size(), kNegInf);
  const std::string prev = prefix.empty() ? "<s>" : vocab_.Word(prefix.back());
  auto it = table_.find(prev);
  if (it == table_.end()) {
    const double lp = -std::log(static_cast<double>(VocabSize()));
    out[Vocabulary::kEos] = lp;
    for (std::size_t id = 4; id < vocab_.size(); ++id) out[id] = lp;
    return out;
  }
  for (const auto& [next, p] : it->second) {
    if (p <= 0) continue;
    const int id = next == "</s>" ? Vocabulary::kEos : vocab_.Id(next);
    out[static_cast<std::size_t>(id)] = std::log(p);
  }
  return out;
}

std::unique_ptr<GeneratorBackend> TableBackend::Clone() const {
  return std::make_unique<TableBackend>(*this);
}

void TableBackend::SaveWeights(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  WriteFileAtomic(dir / "table.json", ToJson().dump(2));
}

std::unique_ptr<GeneratorBackend> LoadBackend(std::string_view kind,
                                              const std::filesystem::path& dir) {
  if (kind == MiniSeq2Seq::kKind) return MiniSeq2Seq::Load(dir);
  if (kind == TableBackend::kKind) {
    try {
      return TableBackend::FromJson(Json::parse(ReadFile(dir / "table.json")));
    } catch (const Json::parse_error& e) {
      throw DataError("corrupt table.json: " + std::string(e.what()));
    }
  }
  throw BackendError("unknown backend kind '" + std::string(kind) + "'");
}

std::unique_ptr<GeneratorBackend> CreateBackend(std::string_view kind, const Json& options,
                                                std::span<const PromptInstance> data) {
  if (kind != MiniSeq2Seq::kKind) {
    throw BackendError("backend '" + std::string(kind) + "' cannot be created for training");
  }
  MiniSeq2Seq::Options o;
  for (const auto& [key, value] : options.items()) {
    if (key == "embedding_dim") {
      o.embedding_dim = value.get<int>();
    } else if (key == "hidden_dim") {
      o.hidden_dim = value.get<int>();
    } else if (key == "max_positions") {
      o.max_positions = value.get<int>();
    } else if (key == "max_input_length") {
      o.max_input_length = value.get<std::size_t>();
    } else if (key == "init_seed") {
      o.init_seed = value.get<std::uint64_t>();
    } else {
      throw UsageError("unknown " + std::string(kind) + " option '" + key + "'");
    }
  }
  std::vector<std::string> texts;
  texts.reserve(2 * data.size());
  for (const auto& p : data) {
    texts.push_back(p.input);
    texts.push_back(p.target);
  }
  return std::make_unique<MiniSeq2Seq>(Vocabulary::FromTexts(texts), o);
}

}  // namespace cnlg
