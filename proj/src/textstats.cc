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

#include "cnlg/textstats.h"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "cnlg/error.h"
#include "cnlg/text.h"

namespace cnlg {
namespace {

using WordSet = std::unordered_set<std::string_view>;

const WordSet& SubjectPronouns() {
  static const WordSet s = {"i", "you", "he", "she", "we", "they", "it", "someone",
                            "somebody", "everyone", "everybody", "nobody", "people"};
  return s;
}

const std::unordered_map<std::string_view, std::string_view>& ClosedClass() {
  static const std::unordered_map<std::string_view, std::string_view> m = [] {
    std::unordered_map<std::string_view, std::string_view> out;
    auto add = [&out](std::string_view tag, std::initializer_list<std::string_view> words) {
      for (auto w : words) out.emplace(w, tag);
    };
    add("PRON", {"i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself",
                 "he", "him", "his", "himself", "she", "her", "hers", "herself", "it",
                 "its", "itself", "we", "us", "our", "ours", "ourselves", "they", "them",
                 "their", "theirs", "themselves", "someone", "somebody", "something",
                 "anyone", "anybody", "anything", "everyone", "everybody", "everything",
                 "nobody", "nothing", "who", "whom", "whose", "what", "which"});
    add("DET", {"the", "a", "an", "this", "these", "those", "some", "any", "no", "every",
                "each", "all", "both", "another", "either", "neither", "such", "many",
                "much", "few", "several"});
    add("ADP", {"in", "on", "at", "of", "for", "with", "about", "from", "by", "into",
                "onto", "over", "under", "during", "through", "between", "among",
                "against", "without", "within", "around", "near", "behind", "across",
                "along", "upon", "like", "towards", "toward", "despite", "off", "out",
                "up", "down"});
    add("SCONJ", {"when", "because", "if", "while", "although", "though", "whereas",
                  "unless", "whenever", "whether", "once"});
    add("CCONJ", {"and", "but", "or", "nor"});
    add("AUX", {"am", "is", "are", "was", "were", "be", "been", "being", "will",
                "would", "shall", "should", "can", "could", "may", "might", "must",
                "'m", "'re", "'ll", "'d", "ca", "wo"});
    add("PART", {"not", "n't"});
    add("ADV", {"very", "really", "so", "too", "also", "just", "never", "always", "often",
                "still", "even", "then", "there", "here", "now", "again", "already", "ago",
                "soon", "quite", "rather", "almost", "only", "ever", "back", "away",
                "finally", "suddenly", "how", "why", "where", "later", "yesterday",
                "today", "tonight", "together", "enough", "instead", "maybe", "perhaps",
                "sometimes", "once", "more", "most", "less", "home"});
    add("INTJ", {"oh", "wow", "yes", "hey", "ok", "okay"});
    add("NUM", {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
                "ten", "hundred", "thousand", "million"});
    return out;
  }();
  return m;
}

// Auxiliaries that also work as main verbs.
const WordSet& HaveDo() {
  static const WordSet s = {"have", "has", "had", "having", "'ve", "do", "does", "did"};
  return s;
}

// Verbs and adjectives that take a "to" infinitive.
const WordSet& ControlWords() {
  static const WordSet s = {
      "want", "wants", "wanted", "need", "needs", "needed", "try", "tries", "tried",
      "decide", "decided", "forget", "forgot", "begin", "began", "start", "started",
      "going", "used", "have", "has", "had", "hope", "hoped", "plan", "planned",
      "refuse", "refused", "promise", "promised", "manage", "managed", "ask", "asked",
      "tell", "told", "learn", "learned", "like", "liked", "love", "loved", "hate",
      "hated", "afraid", "able", "happy", "sad", "glad", "sorry", "ready", "scared",
      "time", "chance", "way"};
  return s;
}

const WordSet& IndefinitePronouns() {
  static const WordSet s = {"someone", "everyone", "anyone", "somebody", "everybody",
                            "anybody", "nobody", "one"};
  return s;
}

const WordSet& Possessives() {
  static const WordSet s = {"my", "your", "his", "her", "its", "our", "their"};
  return s;
}

const WordSet& ClauseIntroducers() {
  static const WordSet s = {"after", "before", "since", "until", "as", "till"};
  return s;
}

const WordSet& Verbs() {
  static const WordSet s = {
      "feel", "feels", "felt", "feeling", "go", "goes", "went", "gone", "going", "get",
      "gets", "got", "gotten", "see", "sees", "saw", "seen", "find", "finds", "found",
      "make", "makes", "made", "take", "takes", "took", "taken", "come", "comes", "came",
      "give", "gives", "gave", "given", "tell", "tells", "told", "say", "says", "said",
      "know", "knows", "knew", "known", "think", "thinks", "thought", "leave", "leaves",
      "left", "lose", "loses", "lost", "win", "wins", "won", "run", "runs", "ran",
      "hear", "hears", "heard", "keep", "keeps", "kept", "begin", "began", "begun",
      "break", "breaks", "broke", "broken", "buy", "bought", "bring", "brought",
      "catch", "caught", "fall", "fell", "fallen", "fight", "fought", "forget", "forgot",
      "forgotten", "hold", "held", "hurt", "let", "meet", "met", "pay", "paid", "put",
      "read", "sit", "sat", "send", "sent", "sleep", "slept", "spend", "spent", "stand",
      "stood", "teach", "taught", "throw", "threw", "thrown", "understand", "understood",
      "wear", "wore", "write", "wrote", "written", "become", "became", "eat", "ate",
      "eaten", "drive", "drove", "driven", "want", "wants", "need", "needs", "like",
      "likes", "love", "loves", "hate", "hates", "try", "tries", "die", "dies", "pass",
      "help", "helps", "ask", "asks", "call", "calls", "work", "works", "play", "plays",
      "move", "live", "lives", "believe", "bring", "happen", "happens", "look", "looks",
      "seem", "seems", "show", "shows", "start", "starts", "stop", "stops", "turn",
      "open", "close", "cry", "cries", "cried", "lie", "lied", "steal", "stole",
      "stolen", "choose", "chose", "chosen", "grow", "grew", "grown", "forgive",
      "forgave", "shout", "yell", "scream", "laugh", "smile", "kill", "killed", "hit",
      "cut", "shut", "spill", "spilled", "spilt", "fail", "fails", "finish", "learn",
      "learnt", "learned", "realize", "realise", "remember", "miss", "wait", "watch",
      "visit", "cheat", "cheats", "blame", "blamed", "treat", "receive", "accept",
      "graduate", "marry", "married", "born", "bear", "bore", "have", "do", "swim",
      "swam", "sing", "sang", "sung", "fly", "flew", "flown", "drink", "drank", "drunk",
      "speak", "spoke", "spoken", "wake", "woke", "woken", "ride", "rode", "ridden",
      "shake", "shook", "bite", "bit", "bitten", "hide", "hid", "hidden", "mean",
      "meant", "lend", "lent", "build", "built", "feed", "fed", "lead", "led", "deal",
      "dealt", "sell", "sold", "seek", "sought", "slide", "slid", "stick", "stuck",
      "strike", "struck", "swear", "swore", "sworn", "tear", "tore", "torn", "vomit",
      "smell", "smelled", "smelt", "step", "stepped", "trip", "tripped", "drop",
      "dropped", "rob", "robbed", "beat", "beaten", "cancel", "invite", "abuse",
      "attack", "insult", "ignore", "pick", "notice", "decide", "manage", "hope",
      "wish", "expect", "enjoy", "deserve", "apologize", "apologise", "embarrass",
      "disappoint", "upset", "scare", "annoy", "bother", "threaten", "betray", "study",
      "studied", "quit", "arrive", "return", "travel", "change", "save", "stay", "talk",
      "walk", "listen", "answer", "fix", "push", "pull", "kiss", "hug", "touch", "fear",
      "worry", "care", "agree", "refuse", "promise", "plan", "join", "share", "check",
      "order", "prepare", "protect", "recover", "reach", "remove", "rescue"};
  return s;
}

const WordSet& Adjectives() {
  static const WordSet s = {
      "happy", "sad", "angry", "afraid", "scared", "ashamed", "guilty", "proud", "glad",
      "upset", "good", "bad", "great", "terrible", "horrible", "awful", "nice", "new",
      "old", "big", "small", "little", "young", "long", "short", "first", "last",
      "whole", "best", "worst", "better", "worse", "able", "sure", "sick", "ill",
      "alone", "late", "early", "hard", "difficult", "easy", "important", "beautiful",
      "excited", "nervous", "worried", "anxious", "disgusted", "embarrassed", "lonely",
      "tired", "bored", "free", "full", "empty", "dead", "alive", "own", "other",
      "same", "different", "rude", "unfair", "cruel", "dirty", "clean", "dangerous",
      "safe", "poor", "rich", "strong", "weak", "high", "low", "hot", "cold", "close",
      "far", "wrong", "right", "real", "true", "false", "certain", "ready", "busy",
      "quiet", "loud", "lovely", "ugly", "friendly", "silly", "stupid", "smart",
      "funny", "kind", "mad", "frightened", "terrified", "shocked", "surprised",
      "pleased", "delighted", "disappointed", "annoyed", "frustrated", "furious",
      "jealous", "hurt", "sorry", "unhappy", "depressed", "miserable", "gross", "sweet",
      "huge", "tiny", "next", "previous", "public", "personal", "whole", "entire",
      "best", "final", "local", "main", "single", "special", "serious", "simple",
      "fine", "fair", "calm", "dark", "bright", "heavy", "fat", "thin", "drunk",
      "naked", "wicked", "sacred", "several", "black", "white", "red", "blue", "green",
      "fancy"};
  return s;
}

const WordSet& NounExceptions() {
  static const WordSet s = {
      "thing", "things", "morning", "evening", "king", "ring", "spring", "wedding",
      "building", "ceiling", "ding", "sibling", "siblings", "bed", "shed", "hundred",
      "family", "july", "italy", "reply", "supply", "bully", "ally", "belly", "jelly",
      "festival", "animal", "hospital", "meal", "deal", "husband", "friend", "friends",
      "birthday", "girlfriend", "boyfriend", "nothing", "cousin", "seed", "speed",
      "feed", "music", "traffic", "panic", "clinic", "picnic", "topic", "logic",
      "mechanic", "attic"};
  return s;
}

const std::string_view kAdjSuffixes[] = {"ful", "ous", "ive", "able", "ible", "less",
                                         "ish", "ic"};

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

bool IsPunctToken(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c));
  });
}

bool IsNumber(std::string_view s) {
  bool digit = false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',' && c != ':' && c != '/') {
      return false;
    }
  }
  return digit;
}

bool IsSentenceEnd(std::string_view s) { return s == "." || s == "!" || s == "?"; }

std::string NormalizeQuotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2019 and U+2018 as apostrophes, U+201C/D as straight quotes.
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
      const auto c = static_cast<unsigned char>(text[i + 2]);
      if (c == 0x98 || c == 0x99) {
        out += '\'';
        i += 2;
        continue;
      }
      if (c == 0x9C || c == 0x9D) {
        out += '"';
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

struct Work {
  std::string form;
  std::string lower;
  std::string upos;
  std::string deprel = "dep";
};

bool VerbLike(const Work& w) {
  if (NounExceptions().count(w.lower)) return false;
  return Verbs().count(w.lower) || HaveDo().count(w.lower) || EndsWith(w.lower, "ed") ||
         EndsWith(w.lower, "ing");
}

void LexicalPass(std::vector<Work>& ws) {
  const auto& closed = ClosedClass();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    Work& w = ws[i];
    if (IsPunctToken(w.form)) {
      w.upos = "PUNCT";
    } else if (IsNumber(w.form)) {
      w.upos = "NUM";
    } else if (w.lower == "'s") {
      w.upos = "?s";
    } else if (auto it = closed.find(w.lower); it != closed.end()) {
      w.upos = std::string(it->second);
    }
  }
}

std::string_view Prev(const std::vector<Work>& ws, std::size_t i) {
  return i == 0 ? std::string_view() : std::string_view(ws[i - 1].upos);
}

void ContextPass(std::vector<Work>& ws) {
  for (std::size_t i = 0; i < ws.size(); ++i) {
    Work& w = ws[i];
    const Work* next = i + 1 < ws.size() ? &ws[i + 1] : nullptr;
    const std::string_view prev = Prev(ws, i);
    const std::string prev_lower = i == 0 ? std::string() : ws[i - 1].lower;
    const bool sentence_start = i == 0 || IsSentenceEnd(ws[i - 1].form) ||
                                ws[i - 1].form == "\"";
    if (w.upos == "?s") {
      // Possessive after nominals, contracted "is" elsewhere.
      w.upos = (prev == "NOUN" || prev == "PROPN" || IndefinitePronouns().count(prev_lower))
                   ? "PART"
                   : "AUX";
      continue;
    }
    if (!w.upos.empty()) continue;

    if (w.lower == "that") {
      if (prev == "NOUN" || prev == "PROPN") {
        w.upos = "PRON";
      } else if ((prev == "VERB" || prev == "ADJ") && next &&
                 (next->upos == "PRON" || next->upos == "DET")) {
        w.upos = "SCONJ";
      } else if (next && (next->upos.empty() || next->upos == "ADJ")) {
        w.upos = "DET";
      } else {
        w.upos = "PRON";
      }
      continue;
    }
    if (w.lower == "to") {
      const bool verb_next = next && next->upos.empty() &&
                             (Verbs().count(next->lower) || HaveDo().count(next->lower));
      const bool open_next = next && next->upos.empty() &&
                             !(std::isupper(static_cast<unsigned char>(next->form[0])));
      const bool infinitive = verb_next || (next && next->lower == "be") ||
                              (ControlWords().count(prev_lower) && open_next);
      w.upos = infinitive ? "PART" : "ADP";
      continue;
    }
    if (ClauseIntroducers().count(w.lower)) {
      const bool subject_next = next && (SubjectPronouns().count(next->lower) ||
                                         next->lower == "my" || next->lower == "the");
      w.upos = subject_next ? "SCONJ" : "ADP";
      continue;
    }
    if (HaveDo().count(w.lower)) {
      std::size_t j = i + 1;
      while (j < ws.size() && (ws[j].lower == "not" || ws[j].lower == "n't" ||
                               ws[j].upos == "ADV")) {
        ++j;
      }
      const bool aux = j < ws.size() && ws[j].upos.empty() && VerbLike(ws[j]) &&
                       !EndsWith(ws[j].lower, "ing");
      w.upos = aux ? "AUX" : "VERB";
      continue;
    }
    if (!sentence_start && std::isupper(static_cast<unsigned char>(w.form[0]))) {
      w.upos = "PROPN";
      continue;
    }
    if (Adjectives().count(w.lower)) {
      w.upos = "ADJ";
      continue;
    }
    if (NounExceptions().count(w.lower)) {
      w.upos = "NOUN";
      continue;
    }
    if (Verbs().count(w.lower)) {
      // Nominal slot: after a determiner, possessive, adjective or preposition.
      const bool nominal = prev == "DET" || prev == "ADJ" || prev == "ADP" ||
                           Possessives().count(prev_lower);
      const bool participle = EndsWith(w.lower, "ed") || EndsWith(w.lower, "en");
      if (nominal && participle) {
        w.upos = prev == "ADP" ? "VERB" : "ADJ";
      } else {
        w.upos = nominal ? "NOUN" : "VERB";
      }
      continue;
    }
    if (EndsWith(w.lower, "ing")) {
      const bool nominal = prev == "DET" || prev == "ADJ" ||
                           (prev == "PRON" && prev_lower != "i" &&
                            !SubjectPronouns().count(prev_lower));
      w.upos = nominal ? "NOUN" : "VERB";
      continue;
    }
    if (EndsWith(w.lower, "ed")) {
      w.upos = (prev == "DET" || prev == "ADJ") ? "ADJ" : "VERB";
      continue;
    }
    if (EndsWith(w.lower, "ly")) {
      w.upos = "ADV";
      continue;
    }
    bool adj = false;
    for (auto suffix : kAdjSuffixes) adj = adj || EndsWith(w.lower, suffix);
    if (adj) {
      w.upos = "ADJ";
      continue;
    }
    const bool verb_slot = (SubjectPronouns().count(prev_lower) && prev == "PRON") ||
                           (prev == "PART" && prev_lower != "'s") || prev_lower == "can" || prev_lower == "could" ||
                           prev_lower == "will" || prev_lower == "would" ||
                           prev_lower == "should" || prev_lower == "must" ||
                           prev_lower == "might" || prev_lower == "may" ||
                           (prev == "AUX" && HaveDo().count(prev_lower));
    w.upos = verb_slot ? "VERB" : "NOUN";
  }
}

bool IsPredicate(const std::vector<Work>& ws, std::size_t i) {
  if (ws[i].upos == "VERB") return true;
  if (ws[i].upos != "AUX") return false;
  // Copular auxiliaries head their clause unless a verb group follows.
  std::size_t j = i + 1;
  while (j < ws.size() && (ws[j].upos == "ADV" || ws[j].upos == "AUX" ||
                           (ws[j].upos == "PART" && ws[j].lower != "to"))) {
    ++j;
  }
  return !(j < ws.size() && ws[j].upos == "VERB");
}

void DependencyPass(std::vector<Work>& ws) {
  static const std::set<std::string_view> kSpan = {"PRON", "DET", "NOUN", "PROPN", "ADJ",
                                                   "ADV", "AUX", "NUM"};
  bool have_root = false;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (ws[i].upos == "PUNCT") {
      ws[i].deprel = "punct";
      continue;
    }
    if (!IsPredicate(ws, i)) continue;
    if (ws[i].upos == "AUX" && i + 1 < ws.size() && ws[i + 1].upos == "AUX") continue;
    if (i > 0 && ws[i - 1].upos == "PART" && ws[i - 1].lower == "to") {
      ws[i].deprel = have_root ? "xcomp" : "ROOT";
      have_root = true;
      continue;
    }
    std::size_t j = i;
    bool subject = false;
    while (j > 0 && (kSpan.count(ws[j - 1].upos) ||
                     (ws[j - 1].upos == "PART" && ws[j - 1].lower != "to"))) {
      if (SubjectPronouns().count(ws[j - 1].lower)) subject = true;
      const std::string_view l = ws[j - 1].lower;
      if (l == "who" || l == "which" || l == "whom" || l == "whose" ||
          (l == "that" && ws[j - 1].upos == "PRON")) {
        break;
      }
      --j;
    }
    const Work* intro = j > 0 ? &ws[j - 1] : nullptr;
    std::string rel = "dep";
    if (intro && intro->upos == "SCONJ") {
      rel = intro->lower == "that" ? "ccomp" : "advcl";
    } else if (intro && (intro->lower == "who" || intro->lower == "which" ||
                         intro->lower == "whom" || intro->lower == "whose" ||
                         (intro->lower == "that" && intro->upos == "PRON"))) {
      rel = "relcl";
    } else if (have_root && intro && intro->upos == "CCONJ") {
      rel = "conj";
    } else if (have_root && intro && intro->upos == "VERB" && subject) {
      rel = "ccomp";
    } else if (intro && intro->upos == "ADP" && EndsWith(ws[i].lower, "ing")) {
      rel = "pcomp";
    } else if (!have_root) {
      rel = "ROOT";
      have_root = true;
    }
    ws[i].deprel = rel;
  }
  if (!have_root) {
    for (auto& w : ws) {
      if (w.upos != "PUNCT" && w.deprel == "dep") {
        w.deprel = "ROOT";
        break;
      }
    }
  }
}

}  // namespace

std::vector<std::string> RuleTagger::Tokenize(std::string_view text) {
  static constexpr std::string_view kClitics[] = {"n't", "'s", "'m", "'re", "'ve", "'ll",
                                                  "'d"};
  std::vector<std::string> out;
  for (const auto& raw : SplitWords(NormalizeQuotes(text))) {
    std::string_view w = raw;
    std::vector<std::string> lead;
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.front()))) {
      lead.emplace_back(1, w.front());
      w.remove_prefix(1);
    }
    std::vector<std::string> trail;
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back()))) {
      // Runs of the same mark ("...", "!!") stay together.
      std::size_t n = 1;
      while (n < w.size() && w[w.size() - 1 - n] == w.back()) ++n;
      trail.insert(trail.begin(), std::string(w.substr(w.size() - n)));
      w.remove_suffix(n);
    }
    for (auto& t : lead) out.push_back(std::move(t));
    if (!w.empty()) {
      const std::string lower = ToLower(w);
      bool split = false;
      for (auto clitic : kClitics) {
        if (lower.size() > clitic.size() &&
            std::string_view(lower).substr(lower.size() - clitic.size()) == clitic) {
          out.emplace_back(w.substr(0, w.size() - clitic.size()));
          out.emplace_back(w.substr(w.size() - clitic.size()));
          split = true;
          break;
        }
      }
      if (!split) out.emplace_back(w);
    }
    for (auto& t : trail) out.push_back(std::move(t));
  }
  return out;
}

std::optional<std::vector<TaggedToken>> RuleTagger::Tag(std::string_view text) const {
  const auto tokens = Tokenize(text);
  if (tokens.empty()) return std::nullopt;
  std::vector<Work> ws;
  ws.reserve(tokens.size());
  for (const auto& t : tokens) ws.push_back({t, ToLower(t), "", "dep"});
  LexicalPass(ws);
  ContextPass(ws);
  DependencyPass(ws);
  std::vector<TaggedToken> out;
  out.reserve(ws.size());
  for (auto& w : ws) out.push_back({std::move(w.form), std::move(w.upos), std::move(w.deprel)});
  return out;
}

ConlluTagger ConlluTagger::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), "conllu:" + path.filename().string());
}

ConlluTagger ConlluTagger::Parse(std::string_view content, std::string identity) {
  ConlluTagger tagger;
  tagger.identity_ = std::move(identity);
  std::string text;
  std::string text_id;
  std::string group_id;
  std::string group_text;
  std::vector<TaggedToken> group;
  std::size_t line_no = 0;
  auto flush_group = [&] {
    if (!group.empty() || !group_text.empty()) {
      tagger.parses_.emplace(group_text, std::move(group));
    }
    group.clear();
    group_text.clear();
    group_id.clear();
  };
  bool in_sentence = false;
  for (const auto& raw : Split(content, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      in_sentence = false;
      continue;
    }
    if (line[0] == '#') {
      if (line.rfind("# text_id = ", 0) == 0) {
        text_id = line.substr(12);
      } else if (line.rfind("# text = ", 0) == 0) {
        text = line.substr(9);
      }
      continue;
    }
    if (!in_sentence) {
      // First token line of a new sentence decides its text group.
      in_sentence = true;
      if (text.empty()) {
        throw DataError(fmt::format("CoNLL-U line {}: sentence without '# text ='", line_no));
      }
      if (text_id.empty() || text_id != group_id) {
        flush_group();
        group_id = text_id;
        group_text = text;
      } else {
        group_text += " " + text;
      }
      text.clear();
      text_id.clear();
    }
    const auto cols = Split(line, '\t');
    if (cols.size() != 10) {
      throw DataError(fmt::format("CoNLL-U line {}: expected 10 columns, got {}", line_no,
                                  cols.size()));
    }
    // Multiword ranges and empty nodes are not tokens.
    if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos) {
      continue;
    }
    group.push_back({cols[1], cols[3], cols[7]});
  }
  flush_group();
  return tagger;
}

std::optional<std::vector<TaggedToken>> ConlluTagger::Tag(std::string_view text) const {
  auto it = parses_.find(text);
  if (it == parses_.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

bool IsClausalDeprel(std::string_view deprel) {
  const std::string_view base = deprel.substr(0, deprel.find(':'));
  return base == "ccomp" || base == "xcomp" || base == "advcl" || base == "acl" ||
         base == "relcl";
}

TextCounts CountTokens(std::span<const TaggedToken> tokens) {
  TextCounts c;
  c.tokens = tokens.size();
  c.clauses = 1;
  for (const auto& t : tokens) {
    if (t.upos == "NOUN") ++c.nouns;
    if (t.upos == "VERB") ++c.verbs;
    if (t.upos == "ADJ") ++c.adjectives;
    if (IsClausalDeprel(ToLower(t.deprel))) ++c.clauses;
  }
  return c;
}

Json TextCounts::ToJson() const {
  Json j;
  j["tokens"] = tokens;
  j["nouns"] = nouns;
  j["verbs"] = verbs;
  j["adjectives"] = adjectives;
  j["clauses"] = clauses;
  j["flagged"] = flagged;
  return j;
}

namespace {

Moments MomentsOf(std::span<const TextCounts> counts, std::size_t TextCounts::*field) {
  unsigned __int128 sum = 0;
  unsigned __int128 sq = 0;
  for (const auto& c : counts) {
    const auto v = static_cast<unsigned __int128>(c.*field);
    sum += v;
    sq += v * v;
  }
  const auto n = static_cast<unsigned __int128>(counts.size());
  Moments m;
  m.mean = static_cast<double>(sum) / static_cast<double>(n);
  // n * sum(x^2) - (sum x)^2 is exact and never negative.
  const auto num = n * sq - sum * sum;
  m.std = std::sqrt(static_cast<double>(num)) / static_cast<double>(n);
  return m;
}

Json MomentsJson(const Moments& m) { return Json{{"mean", m.mean}, {"std", m.std}}; }

Moments MomentsFromJson(const Json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>()};
}

}  // namespace

TextStats Summarize(std::span<const TextCounts> counts, std::string tagger) {
  if (counts.empty()) throw UsageError("text statistics need at least one text");
  TextStats s;
  s.tokens = MomentsOf(counts, &TextCounts::tokens);
  s.nouns = MomentsOf(counts, &TextCounts::nouns);
  s.verbs = MomentsOf(counts, &TextCounts::verbs);
  s.adjectives = MomentsOf(counts, &TextCounts::adjectives);
  s.clauses = MomentsOf(counts, &TextCounts::clauses);
  s.n_texts = counts.size();
  s.n_flagged = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](const auto& c) { return c.flagged; }));
  s.tagger = std::move(tagger);
  return s;
}

TextStats Analyze(std::span<const std::string> texts, const Tagger& tagger,
                  const AnalyzeOptions& options) {
  if (texts.empty()) throw UsageError("text statistics need at least one text");
  std::vector<TextCounts> counts(texts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < texts.size(); i = next++) {
      const auto tagged = tagger.Tag(texts[i]);
      if (!tagged) {
        counts[i] = TextCounts{};
        counts[i].flagged = true;
      } else {
        counts[i] = CountTokens(*tagged);
      }
    }
  };
  const int workers = std::clamp(options.workers, 1, 64);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  TextStats s = Summarize(counts, tagger.Identity());
  if (options.per_text) *options.per_text = std::move(counts);
  return s;
}

Json TextStats::ToJson() const {
  Json j;
  j["tokens"] = MomentsJson(tokens);
  j["nouns"] = MomentsJson(nouns);
  j["verbs"] = MomentsJson(verbs);
  j["adjectives"] = MomentsJson(adjectives);
  j["clauses"] = MomentsJson(clauses);
  j["n_texts"] = n_texts;
  j["n_flagged"] = n_flagged;
  j["tagger"] = tagger;
  return j;
}

TextStats TextStats::FromJson(const Json& j) {
  try {
    TextStats s;
    s.tokens = MomentsFromJson(j.at("tokens"));
    s.nouns = MomentsFromJson(j.at("nouns"));
    s.verbs = MomentsFromJson(j.at("verbs"));
    s.adjectives = MomentsFromJson(j.at("adjectives"));
    s.clauses = MomentsFromJson(j.at("clauses"));
    s.n_texts = j.at("n_texts").get<std::size_t>();
    s.n_flagged = j.value("n_flagged", std::size_t{0});
    s.tagger = j.value("tagger", std::string());
    return s;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed text statistics: ") + e.what());
  }
}

std::string RenderStatsTable(std::span<const std::pair<std::string, TextStats>> rows,
                             bool adjectives) {
  std::string out = fmt::format("{:<16}{:>16}{:>16}{:>16}", "", "Tokens (std.)",
                                "Nouns (std.)", "Verbs (std.)");
  if (adjectives) out += fmt::format("{:>18}", "Adjectives (std.)");
  out += fmt::format("{:>16}\n", "Clauses (std.)");
  auto cell = [](const Moments& m) { return fmt::format("{:.1f} ({:.1f})", m.mean, m.std); };
  for (const auto& [label, s] : rows) {
    out += fmt::format("{:<16}{:>16}{:>16}{:>16}", label, cell(s.tokens), cell(s.nouns),
                       cell(s.verbs));
    if (adjectives) out += fmt::format("{:>18}", cell(s.adjectives));
    out += fmt::format("{:>16}\n", cell(s.clauses));
  }
  return out;
}

}  // namespace cnlg
