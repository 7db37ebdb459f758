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

#ifndef CNLG_TEXTSTATS_H_
#define CNLG_TEXTSTATS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cnlg/io.h"

namespace cnlg {

// One token with a universal POS tag and a universal dependency label.
struct TaggedToken {
  std::string form;
  std::string upos;
  std::string deprel;
};

class Tagger {
 public:
  virtual ~Tagger() = default;
  // Name and version, recorded next to every statistic.
  virtual std::string Identity() const = 0;
  // nullopt when the text cannot be tagged. Must be safe to call concurrently.
  virtual std::optional<std::vector<TaggedToken>> Tag(std::string_view text) const = 0;
};

// Deterministic lexicon and suffix tagger with shallow clause detection.
// Always available; output is frozen per version.
class RuleTagger : public Tagger {
 public:
  static constexpr std::string_view kIdentity = "cnlg-rule-tagger 1";

  std::string Identity() const override { return std::string(kIdentity); }
  std::optional<std::vector<TaggedToken>> Tag(std::string_view text) const override;

  // Whitespace split, then punctuation and English clitics come off.
  static std::vector<std::string> Tokenize(std::string_view text);
};

// Replays parses produced offline by an external parser. Each sentence block
// must carry a "# text = ..." comment; consecutive blocks sharing a
// "# text_id = ..." comment form one text. Lookup is by exact text.
class ConlluTagger : public Tagger {
 public:
  static ConlluTagger Load(const std::filesystem::path& path);
  static ConlluTagger Parse(std::string_view content, std::string identity);

  std::string Identity() const override { return identity_; }
  std::optional<std::vector<TaggedToken>> Tag(std::string_view text) const override;
  std::size_t size() const { return parses_.size(); }

 private:
  std::string identity_;
  std::map<std::string, std::vector<TaggedToken>, std::less<>> parses_;
};

struct TextCounts {
  std::size_t tokens = 0;
  std::size_t nouns = 0;
  std::size_t verbs = 0;
  std::size_t adjectives = 0;
  std::size_t clauses = 0;
  bool flagged = false;

  Json ToJson() const;
};

// Counts on one tagged text. Clauses are 1 plus the clausal dependents
// (ccomp, xcomp, advcl, acl, relcl and their subtypes).
TextCounts CountTokens(std::span<const TaggedToken> tokens);
bool IsClausalDeprel(std::string_view deprel);

struct Moments {
  double mean = 0;
  // Population standard deviation.
  double std = 0;
};

struct TextStats {
  Moments tokens;
  Moments nouns;
  Moments verbs;
  Moments adjectives;
  Moments clauses;
  std::size_t n_texts = 0;
  // Untaggable texts, counted with zeros.
  std::size_t n_flagged = 0;
  std::string tagger;

  Json ToJson() const;
  static TextStats FromJson(const Json& j);
};

struct AnalyzeOptions {
  int workers = 1;
  // Receives per-text counts in input order when set.
  std::vector<TextCounts>* per_text = nullptr;
};

// Throws UsageError on an empty list.
TextStats Analyze(std::span<const std::string> texts, const Tagger& tagger,
                  const AnalyzeOptions& options = {});

// Moments over precomputed counts. Sums are exact integers, so the result
// does not depend on text order.
TextStats Summarize(std::span<const TextCounts> counts, std::string tagger);

// Rows of "Tokens (std.) Nouns (std.) Verbs (std.) [Adjectives (std.)]
// Clauses (std.)".
std::string RenderStatsTable(
    std::span<const std::pair<std::string, TextStats>> rows, bool adjectives);

}  // namespace cnlg

#endif  // CNLG_TEXTSTATS_H_
