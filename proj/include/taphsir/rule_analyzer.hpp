#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "taphsir/annotations.hpp"
#include "taphsir/nlpcore.hpp"
#include "taphsir/strutil.hpp"

namespace taphsir {

inline constexpr const char* kRuleAnalyzerIdentity = "rule-en/v1";

namespace rules {

inline const std::unordered_set<std::string>& determiners() {
  static const std::unordered_set<std::string> s = {
      "the", "a", "an", "each", "every", "all", "some", "any", "no",
      "both", "either", "neither", "such", "another", "other"};
  return s;
}

inline const std::unordered_set<std::string>& adpositions() {
  static const std::unordered_set<std::string> s = {
      "of", "in", "on", "at", "by", "for", "with", "from", "into", "onto",
      "over", "under", "within", "without", "between", "among", "through",
      "during", "before", "after", "against", "about", "per", "via", "upon",
      "across", "toward", "towards", "until", "behind", "below", "above",
      "near", "around", "beyond", "besides", "despite", "except", "like"};
  return s;
}

inline const std::unordered_set<std::string>& coordinators() {
  static const std::unordered_set<std::string> s = {"and", "or", "nor", "and/or"};
  return s;
}

inline const std::unordered_set<std::string>& subordinators() {
  static const std::unordered_set<std::string> s = {
      "if", "because", "although", "though", "while", "when", "whenever",
      "unless", "since", "whereas", "wherever", "whether", "so"};
  return s;
}

inline const std::unordered_set<std::string>& modals() {
  static const std::unordered_set<std::string> s = {
      "shall", "should", "must", "will", "would", "may", "might", "can", "could"};
  return s;
}

inline const std::unordered_set<std::string>& be_forms() {
  static const std::unordered_set<std::string> s = {"be", "is", "are", "was",
                                                    "were", "been", "being", "am"};
  return s;
}

inline const std::unordered_set<std::string>& pronouns() {
  static const std::unordered_set<std::string> s = {
      "it", "they", "them", "he", "him", "she", "her", "its", "their",
      "theirs", "his", "hers", "itself", "themselves", "themself", "himself",
      "herself", "i", "you", "we", "me", "us", "my", "your", "our", "mine",
      "yours", "ours", "who", "whom", "whose", "what", "something",
      "anything", "everything", "nothing", "someone", "anyone", "everyone"};
  return s;
}

inline const std::unordered_set<std::string>& adverbs() {
  static const std::unordered_set<std::string> s = {
      "not", "also", "only", "always", "never", "often", "immediately",
      "automatically", "manually", "then", "thus", "therefore", "however",
      "moreover", "further", "already", "again", "too", "very", "more",
      "most", "less", "least", "accordingly", "respectively", "otherwise",
      "subsequently", "currently", "first", "once", "twice", "instead",
      "alternatively", "additionally", "yet", "still", "here", "there"};
  return s;
}

inline const std::unordered_set<std::string>& number_words() {
  static const std::unordered_set<std::string> s = {
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
      "nine", "ten", "eleven", "twelve", "hundred", "thousand", "million"};
  return s;
}

// Base forms of verbs common in requirements prose. Used to disambiguate
// "The system records ..." (verb) from "... protect records" (noun).
inline const std::unordered_set<std::string>& verb_stems() {
  static const std::unordered_set<std::string> s = {
      "provide", "ensure", "support", "allow", "enable", "require", "perform",
      "process", "store", "record", "log", "display", "send", "receive",
      "transmit", "update", "delete", "create", "modify", "maintain",
      "protect", "verify", "validate", "generate", "handle", "manage",
      "monitor", "control", "use", "execute", "run", "read", "write",
      "report", "notify", "alert", "archive", "encrypt", "decrypt",
      "authenticate", "authorize", "configure", "include", "contain",
      "consist", "comply", "operate", "respond", "return", "accept",
      "reject", "retain", "retrieve", "save", "load", "export", "import",
      "print", "schedule", "track", "detect", "prevent", "recover",
      "restart", "start", "stop", "terminate", "initiate", "complete",
      "check", "review", "approve", "assign", "define", "specify",
      "describe", "implement", "test", "deploy", "gain", "grant", "deny",
      "limit", "restrict", "apply", "remove", "add", "open", "close",
      "select", "submit", "cancel", "confirm", "resolve", "parse", "make",
      "take", "give", "keep", "hold", "need", "fail", "pass", "produce"};
  return s;
}

inline const std::unordered_set<std::string>& adjectives() {
  static const std::unordered_set<std::string> s = {
      "fast", "slow", "secure", "safe", "available", "unavailable",
      "reliable", "robust", "accurate", "complete", "consistent", "correct",
      "incorrect", "valid", "invalid", "unique", "ready", "active",
      "inactive", "enabled", "disabled", "visible", "possible", "impossible",
      "responsible", "new", "old", "current", "previous", "next", "last",
      "authorized", "unauthorized", "encrypted", "additional", "appropriate",
      "relevant", "necessary", "sufficient", "maximum", "minimum", "normal",
      "internal", "external", "public", "private", "digital", "electronic",
      "main", "primary", "secondary", "full", "empty", "high", "low",
      "required", "important", "essential", "mandatory", "recommended",
      "desirable", "critical", "acceptable", "permissible", "single",
      "multiple", "separate", "same", "different", "following", "applicable",
      "wrong", "good", "bad", "large", "small", "write-once"};
  return s;
}

inline const std::unordered_set<std::string>& animate_lemmas() {
  static const std::unordered_set<std::string> s = {
      "user", "administrator", "admin", "operator", "engineer", "developer",
      "manager", "person", "customer", "stakeholder", "annotator",
      "reviewer", "author", "member", "supervisor", "technician", "analyst",
      "officer", "employee", "contractor", "pilot", "student", "teacher",
      "man", "woman", "child", "boy", "girl", "father", "mother", "driver",
      "inspector", "owner", "actor", "tester", "maintainer", "people"};
  return s;
}

inline const std::unordered_set<std::string>& collective_lemmas() {
  static const std::unordered_set<std::string> s = {
      "group", "set", "team", "committee", "collection", "list", "series",
      "batch", "family", "staff", "crew", "panel", "board", "cluster",
      "array", "suite", "bundle", "pool", "stack", "queue"};
  return s;
}

inline const std::unordered_set<std::string>& concrete_lemmas() {
  static const std::unordered_set<std::string> s = {
      "device", "machine", "disk", "file", "folder", "server", "terminal",
      "screen", "button", "cable", "sensor", "printer", "keyboard", "door",
      "vehicle", "card", "document", "paper", "box", "room", "building",
      "record", "database", "table", "network", "computer", "processor",
      "memory", "battery", "display", "antenna", "satellite", "wire"};
  return s;
}

inline const std::unordered_map<std::string, std::string>& irregular_lemmas() {
  static const std::unordered_map<std::string, std::string> m = {
      {"is", "be"},       {"are", "be"},      {"was", "be"},
      {"were", "be"},     {"been", "be"},     {"being", "be"},
      {"am", "be"},       {"has", "have"},    {"had", "have"},
      {"having", "have"}, {"does", "do"},     {"did", "do"},
      {"done", "do"},     {"doing", "do"},    {"goes", "go"},
      {"went", "go"},     {"made", "make"},   {"took", "take"},
      {"taken", "take"},  {"gave", "give"},   {"given", "give"},
      {"wrote", "write"}, {"written", "write"}, {"sent", "send"},
      {"kept", "keep"},   {"left", "leave"},  {"held", "hold"},
      {"met", "meet"},    {"ran", "run"},     {"children", "child"},
      {"men", "man"},     {"women", "woman"}, {"criteria", "criterion"},
      {"indices", "index"}, {"matrices", "matrix"}, {"analyses", "analysis"},
      {"statuses", "status"}, {"processes", "process"}, {"accesses", "access"},
      {"data", "data"},   {"media", "media"}, {"feet", "foot"},
      {"lost", "lose"},   {"found", "find"},  {"built", "build"},
      {"rains", "rain"},  {"snows", "snow"}};
  return m;
}

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

inline bool has_adjective_suffix(const std::string& lower) {
  for (std::string_view suf : {"al", "ous", "ive", "able", "ible", "ic",
                               "ical", "ary", "less", "ful", "ent", "ant"})
    if (ends_with(lower, suf) && lower.size() > suf.size() + 2) return true;
  return false;
}

inline bool has_abstract_suffix(const std::string& lower) {
  for (std::string_view suf : {"tion", "sion", "ment", "ness", "ity", "ance",
                               "ence", "ship", "ism", "ancy", "ency"})
    if (ends_with(lower, suf) && lower.size() > suf.size() + 2) return true;
  return false;
}

}  // namespace rules

// Deterministic rule-based English analyzer. No model files, no I/O; the
// same text always yields the same annotations. Tuned for the register of
// requirements specifications.
class RuleAnalyzer final : public LinguisticAnalyzer {
 public:
  std::string identity() const override { return kRuleAnalyzerIdentity; }

  TokenAnnotations analyze_text(const std::string& text) const override {
    TokenAnnotations ann;
    tokenize(text, ann.tokens);
    split_sentences(ann);
    for (const TokenSpan& s : ann.sentences) tag_sentence(ann.tokens, s);
    for (Token& t : ann.tokens) lemmatize(t);
    for (const TokenSpan& s : ann.sentences) chunk_sentence(ann, s);
    for (const TokenSpan& s : ann.sentences) parse_dependencies(ann, s);
    attach_semantics(ann);
    return ann;
  }

 private:
  // -- stage i: tokenizer ---------------------------------------------------

  static void tokenize(const std::string& text, std::vector<Token>& out) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto emit = [&](std::size_t from, std::size_t to) {
      Token t;
      t.surface = text.substr(from, to - from);
      t.char_start = from;
      t.char_end = to;
      out.push_back(std::move(t));
    };

    while (i < n) {
      if (is_space(text[i])) {
        ++i;
        continue;
      }
      if (rules::is_word_char(text[i])) {
        std::size_t start = i;
        while (i < n) {
          if (rules::is_word_char(text[i])) {
            ++i;
          } else if ((text[i] == '-' || text[i] == '/') && i > start && i + 1 < n &&
                     rules::is_word_char(text[i + 1])) {
            ++i;  // hyphen/slash joining word parts: write-once, and/or
          } else if (text[i] == '.' && i > start && i + 1 < n &&
                     std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                     std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
            ++i;  // decimal point
          } else {
            break;
          }
        }
        emit(start, i);
        if (i < n && text[i] == '\'' && i + 1 < n && rules::is_word_char(text[i + 1])) {
          std::size_t start2 = i;  // possessive or contraction clitic
          ++i;
          while (i < n && rules::is_word_char(text[i])) ++i;
          emit(start2, i);
        }
        continue;
      }
      emit(i, i + 1);  // punctuation, one char per token
      ++i;
    }
  }

  // -- stage ii: sentence splitter -------------------------------------------

  static void split_sentences(TokenAnnotations& ann) {
    const auto& tokens = ann.tokens;
    std::size_t start = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string& s = tokens[i].surface;
      bool terminal = (s == "." || s == "?" || s == "!");
      if (!terminal) continue;
      bool boundary = i + 1 == tokens.size();
      if (!boundary) {
        char c = tokens[i + 1].surface[0];
        boundary = std::isupper(static_cast<unsigned char>(c)) ||
                   std::isdigit(static_cast<unsigned char>(c));
      }
      if (boundary) {
        ann.sentences.push_back({start, i + 1});
        start = i + 1;
      }
    }
    if (start < tokens.size()) ann.sentences.push_back({start, tokens.size()});
    if (ann.sentences.empty() && !tokens.empty())
      ann.sentences.push_back({0, tokens.size()});
  }

  // -- stage iii: POS tagger --------------------------------------------------

  static bool is_punct(const std::string& s) {
    return s.size() == 1 && std::ispunct(static_cast<unsigned char>(s[0])) &&
           s[0] != '-' && s[0] != '/';
  }

  static bool all_digits(const std::string& s) {
    bool any = false;
    for (char c : s) {
      if (std::isdigit(static_cast<unsigned char>(c)))
        any = true;
      else if (c != '.' && c != ',')
        return false;
    }
    return any;
  }

  static void tag_sentence(std::vector<Token>& tokens, const TokenSpan& sent) {
    using namespace rules;

    // pass 1: closed classes and word shape
    for (std::size_t i = sent.begin; i < sent.end; ++i) {
      Token& t = tokens[i];
      const std::string lower = to_lower(t.surface);
      if (is_punct(t.surface)) {
        t.pos = pos::kPunct;
      } else if (all_digits(t.surface) || number_words().count(lower)) {
        t.pos = pos::kNum;
      } else if (lower == "that") {
        bool before_nominal = i + 1 < sent.end &&
                              (determiners().count(to_lower(tokens[i + 1].surface)) == 0) &&
                              !is_punct(tokens[i + 1].surface) &&
                              !verb_like_next(tokens, i + 1, sent);
        if (i == sent.begin && before_nominal)
          t.pos = pos::kDet;
        else if (i > sent.begin && !is_punct(tokens[i - 1].surface))
          t.pos = pos::kSconj;
        else
          t.pos = pos::kPron;
      } else if (lower == "this" || lower == "these" || lower == "those") {
        bool before_nominal = i + 1 < sent.end && !is_punct(tokens[i + 1].surface) &&
                              !coordinators().count(to_lower(tokens[i + 1].surface)) &&
                              !modals().count(to_lower(tokens[i + 1].surface)) &&
                              !be_forms().count(to_lower(tokens[i + 1].surface));
        t.pos = before_nominal ? pos::kDet : pos::kPron;
      } else if (lower == "which") {
        bool before_nominal = i + 1 < sent.end && !is_punct(tokens[i + 1].surface) &&
                              !verb_like_next(tokens, i + 1, sent);
        t.pos = before_nominal ? pos::kDet : pos::kPron;
      } else if (lower == "to") {
        bool infinitive = i + 1 < sent.end &&
                          verb_stems().count(to_lower(tokens[i + 1].surface));
        t.pos = infinitive ? pos::kPart : pos::kAdp;
      } else if (lower == "her") {
        t.pos = pos::kPron;
      } else if (determiners().count(lower)) {
        t.pos = pos::kDet;
      } else if (adpositions().count(lower)) {
        t.pos = pos::kAdp;
      } else if (coordinators().count(lower)) {
        t.pos = pos::kCconj;
      } else if (subordinators().count(lower)) {
        t.pos = pos::kSconj;
      } else if (modals().count(lower) || be_forms().count(lower)) {
        t.pos = pos::kAux;
      } else if (lower == "have" || lower == "has" || lower == "had") {
        bool aux = i + 1 < sent.end && ends_with(to_lower(tokens[i + 1].surface), "ed");
        t.pos = aux ? pos::kAux : pos::kVerb;
      } else if (lower == "do" || lower == "does" || lower == "did") {
        t.pos = pos::kAux;
      } else if (pronouns().count(lower)) {
        t.pos = pos::kPron;
      } else if (adverbs().count(lower)) {
        t.pos = pos::kAdv;
      }
    }

    // pass 2: verbs after auxiliaries and the infinitive marker;
    // predicative adjectives after a form of "be"
    for (std::size_t i = sent.begin + 1; i < sent.end; ++i) {
      Token& t = tokens[i];
      if (!t.pos.empty()) continue;
      const std::string& prev_pos = tokens[i - 1].pos;
      if (prev_pos == pos::kAux || prev_pos == pos::kPart) {
        const std::string lower = to_lower(t.surface);
        bool after_be = be_forms().count(to_lower(tokens[i - 1].surface)) > 0;
        if (after_be && (adjectives().count(lower) || has_adjective_suffix(lower)))
          t.pos = pos::kAdj;
        else
          t.pos = pos::kVerb;
      }
    }

    // pass 3: the rest, left to right; a SCONJ opens a new clause
    bool clause_has_verb = false;
    for (std::size_t i = sent.begin; i < sent.end; ++i) {
      Token& t = tokens[i];
      if (t.pos == pos::kVerb || t.pos == pos::kAux) clause_has_verb = true;
      if (t.pos == pos::kSconj) clause_has_verb = false;
      if (!t.pos.empty()) continue;

      const std::string lower = to_lower(t.surface);
      const std::string prev_pos = i > sent.begin ? tokens[i - 1].pos : std::string();
      bool prev_nominal = prev_pos == pos::kNoun || prev_pos == pos::kPropn ||
                          prev_pos == pos::kPron;
      bool next_wordlike = i + 1 < sent.end && !is_punct(tokens[i + 1].surface);

      if (ends_with(lower, "ly") && lower.size() > 3) {
        t.pos = pos::kAdv;
      } else if (i > sent.begin &&
                 std::isupper(static_cast<unsigned char>(t.surface[0]))) {
        t.pos = pos::kPropn;
      } else if (t.surface.find('-') != std::string::npos && next_wordlike) {
        t.pos = pos::kAdj;
      } else if (adjectives().count(lower)) {
        t.pos = pos::kAdj;
      } else if (has_adjective_suffix(lower) && next_wordlike &&
                 tokens[i + 1].pos.empty()) {
        t.pos = pos::kAdj;
      } else if (ends_with(lower, "ing") && lower.size() > 4) {
        t.pos = next_wordlike && tokens[i + 1].pos.empty() ? pos::kAdj : pos::kNoun;
      } else if (ends_with(lower, "ed") && lower.size() > 3 && prev_nominal &&
                 !clause_has_verb) {
        t.pos = pos::kVerb;
        clause_has_verb = true;
      } else if (!clause_has_verb && prev_nominal && verb_3sg(lower)) {
        t.pos = pos::kVerb;
        clause_has_verb = true;
      } else if (!clause_has_verb && prev_nominal && verb_stems().count(lower) &&
                 tokens[i - 1].plural_guess()) {
        t.pos = pos::kVerb;
        clause_has_verb = true;
      } else {
        t.pos = pos::kNoun;
      }
    }
  }

  static bool verb_like_next(const std::vector<Token>& tokens, std::size_t i,
                             const TokenSpan& sent) {
    if (i >= sent.end) return false;
    const std::string lower = to_lower(tokens[i].surface);
    return rules::modals().count(lower) || rules::be_forms().count(lower) ||
           rules::verb_stems().count(lower) || verb_3sg(lower);
  }

  static bool verb_3sg(const std::string& lower) {
    if (lower.size() < 3 || lower.back() != 's') return false;
    std::string stem = lower.substr(0, lower.size() - 1);
    if (rules::verb_stems().count(stem)) return true;
    if (ends_with(lower, "es") && rules::verb_stems().count(lower.substr(0, lower.size() - 2)))
      return true;
    if (ends_with(lower, "ies")) {
      std::string ystem = lower.substr(0, lower.size() - 3) + "y";
      if (rules::verb_stems().count(ystem)) return true;
    }
    return false;
  }

  // -- stage iv: lemmatizer ---------------------------------------------------

  static void lemmatize(Token& t) {
    const std::string lower = to_lower(t.surface);
    auto it = rules::irregular_lemmas().find(lower);
    if (it != rules::irregular_lemmas().end()) {
      t.lemma = it->second;
      t.plural = t.is_nominal() && lower != it->second && ends_with(lower, "s");
      if (lower == "children" || lower == "men" || lower == "women" ||
          lower == "criteria" || lower == "indices" || lower == "matrices" ||
          lower == "analyses" || lower == "feet")
        t.plural = true;
      return;
    }

    if (t.is_nominal()) {
      t.lemma = singularize(lower, t.plural);
      return;
    }
    if (t.pos == pos::kVerb || t.pos == pos::kAux) {
      t.lemma = verb_base(lower);
      return;
    }
    t.lemma = lower;
  }

  static std::string singularize(const std::string& lower, bool& plural) {
    plural = false;
    if (lower.size() > 4 && ends_with(lower, "ies")) {
      plural = true;
      return lower.substr(0, lower.size() - 3) + "y";
    }
    for (std::string_view suf : {"sses", "shes", "ches", "xes", "zes"})
      if (ends_with(lower, suf) && lower.size() > suf.size() + 1) {
        plural = true;
        return lower.substr(0, lower.size() - 2);
      }
    if (lower.size() > 4 && ends_with(lower, "ses")) {
      plural = true;
      return lower.substr(0, lower.size() - 1);
    }
    if (lower.size() > 3 && lower.back() == 's' && !ends_with(lower, "ss") &&
        !ends_with(lower, "us") && !ends_with(lower, "is")) {
      plural = true;
      return lower.substr(0, lower.size() - 1);
    }
    return lower;
  }

  static std::string verb_base(const std::string& lower) {
    if (lower.size() > 4 && ends_with(lower, "ies"))
      return lower.substr(0, lower.size() - 3) + "y";
    if (lower.size() > 4 && ends_with(lower, "ied"))
      return lower.substr(0, lower.size() - 3) + "y";
    if (lower.size() > 4 && ends_with(lower, "ing")) {
      std::string stem = lower.substr(0, lower.size() - 3);
      return restore_stem(stem);
    }
    if (lower.size() > 3 && ends_with(lower, "ed")) {
      std::string stem = lower.substr(0, lower.size() - 2);
      return restore_stem(stem);
    }
    if (lower.size() > 3 && ends_with(lower, "es") &&
        rules::verb_stems().count(lower.substr(0, lower.size() - 2)))
      return lower.substr(0, lower.size() - 2);
    if (lower.size() > 2 && lower.back() == 's' && !ends_with(lower, "ss"))
      return lower.substr(0, lower.size() - 1);
    return lower;
  }

  static std::string restore_stem(std::string stem) {
    if (rules::verb_stems().count(stem)) return stem;
    if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) {
      std::string undoubled = stem.substr(0, stem.size() - 1);
      if (rules::verb_stems().count(undoubled)) return undoubled;
    }
    if (rules::verb_stems().count(stem + "e")) return stem + "e";
    return stem;
  }

  // -- stage v: NP chunker ----------------------------------------------------

  static bool possessive_pron(const Token& t) {
    const std::string lower = to_lower(t.surface);
    return t.pos == pos::kPron &&
           (lower == "its" || lower == "their" || lower == "his" || lower == "her");
  }

  static void chunk_sentence(TokenAnnotations& ann, const TokenSpan& sent) {
    auto& tokens = ann.tokens;
    std::vector<NPSpan> base;

    // base NPs: (DET | possessive PRON)? (ADJ|NUM)* (NOUN|PROPN)+
    std::size_t i = sent.begin;
    while (i < sent.end) {
      std::size_t start = i;
      if (tokens[i].pos == pos::kDet || possessive_pron(tokens[i])) ++i;
      while (i < sent.end && (tokens[i].pos == pos::kAdj || tokens[i].pos == pos::kNum)) ++i;
      std::size_t nominal_start = i;
      while (i < sent.end && tokens[i].is_nominal()) ++i;
      if (i > nominal_start) {
        base.push_back({start, i, i - 1, false});
      } else {
        i = start + 1;
      }
    }

    // attach "X of Y": the of-phrase folds into the left NP, head stays left
    std::vector<NPSpan> merged;
    for (std::size_t k = 0; k < base.size(); ++k) {
      NPSpan np = base[k];
      while (k + 1 < base.size() && base[k + 1].begin == np.end + 1 &&
             np.end < sent.end && to_lower(tokens[np.end].surface) == "of") {
        np.end = base[k + 1].end;
        ++k;
      }
      merged.push_back(np);
    }

    // coordination: NP (, NP)* (and|or) NP — joined only by commas/CCONJ
    std::vector<NPSpan> chunks = merged;
    std::size_t run_start = 0;
    auto flush_run = [&](std::size_t from, std::size_t to) {
      if (to - from < 2) return;
      bool has_cc = false;
      for (std::size_t t = merged[from].begin; t < merged[to - 1].end; ++t)
        if (tokens[t].pos == pos::kCconj) has_cc = true;
      if (!has_cc) return;
      chunks.push_back({merged[from].begin, merged[to - 1].end, merged[from].head, true});
    };
    for (std::size_t k = 1; k <= merged.size(); ++k) {
      bool joined = false;
      if (k < merged.size()) {
        joined = true;
        for (std::size_t t = merged[k - 1].end; t < merged[k].begin; ++t) {
          const std::string lower = to_lower(tokens[t].surface);
          if (lower != "," && tokens[t].pos != pos::kCconj) {
            joined = false;
            break;
          }
        }
        if (merged[k].begin == merged[k - 1].end) joined = false;  // need a joiner
      }
      if (!joined) {
        flush_run(run_start, k);
        run_start = k;
      }
    }

    // pronoun-only spans never form chunks (guaranteed by the nominal rule);
    // sort outer-first for stable downstream ordering
    std::sort(chunks.begin(), chunks.end(), [](const NPSpan& a, const NPSpan& b) {
      if (a.begin != b.begin) return a.begin < b.begin;
      return a.end > b.end;
    });
    ann.np_chunks.insert(ann.np_chunks.end(), chunks.begin(), chunks.end());
  }

  // -- stage vi: dependency heuristics ---------------------------------------

  static void parse_dependencies(TokenAnnotations& ann, const TokenSpan& sent) {
    auto& tokens = ann.tokens;

    auto first_of = [&](const char* tag) -> std::optional<std::size_t> {
      for (std::size_t i = sent.begin; i < sent.end; ++i)
        if (tokens[i].pos == tag) return i;
      return std::nullopt;
    };

    std::optional<std::size_t> root = first_of(pos::kVerb);
    if (!root) root = first_of(pos::kAux);
    if (!root) {
      for (const NPSpan& np : ann.np_chunks)
        if (np.head >= sent.begin && np.head < sent.end && !np.coordinated) {
          root = np.head;
          break;
        }
    }
    if (!root) root = sent.begin;
    tokens[*root].dep_head = std::nullopt;
    tokens[*root].dep_relation = "root";

    bool passive = false;
    if (tokens[*root].pos == pos::kVerb) {
      const std::string& rs = to_lower(tokens[*root].surface);
      bool participle = ends_with(rs, "ed") || ends_with(rs, "en");
      for (std::size_t i = sent.begin; i < *root; ++i)
        if (tokens[i].pos == pos::kAux && tokens[i].lemma == "be" && participle)
          passive = true;
    }

    auto attach = [&](std::size_t dep, std::size_t head, const char* rel) {
      if (dep == *root || dep == head) return;
      if (tokens[dep].dep_head) return;  // first assignment wins
      tokens[dep].dep_head = head;
      tokens[dep].dep_relation = rel;
    };

    // NP-internal structure
    for (const NPSpan& np : ann.np_chunks) {
      if (np.begin < sent.begin || np.end > sent.end) continue;
      if (np.coordinated) continue;
      for (std::size_t i = np.begin; i < np.end; ++i) {
        if (i == np.head) continue;
        const std::string& p = tokens[i].pos;
        if (p == pos::kDet)
          attach(i, np.head, "det");
        else if (p == pos::kAdj)
          attach(i, np.head, "amod");
        else if (p == pos::kNum)
          attach(i, np.head, "nummod");
        else if (p == pos::kPron)
          attach(i, np.head, "nmod:poss");
        else if (p == pos::kAdp) {
          // "groups of folders": case-mark the inner nominal
          std::size_t inner = i + 1;
          while (inner < np.end && !tokens[inner].is_nominal()) ++inner;
          if (inner < np.end) {
            attach(i, inner, "case");
            attach(inner, np.head, "nmod");
          }
        } else if (tokens[i].is_nominal() && i < np.head) {
          attach(i, np.head, "compound");
        }
      }
    }

    // coordination
    std::vector<const NPSpan*> coords;
    for (const NPSpan& np : ann.np_chunks)
      if (np.coordinated && np.begin >= sent.begin && np.end <= sent.end)
        coords.push_back(&np);
    for (const NPSpan* co : coords) {
      std::optional<std::size_t> first_head;
      for (const NPSpan& np : ann.np_chunks) {
        if (np.coordinated || np.begin < co->begin || np.end > co->end) continue;
        if (!first_head) {
          first_head = np.head;
        } else {
          attach(np.head, *first_head, "conj");
        }
      }
      for (std::size_t t = co->begin; t < co->end; ++t)
        if (tokens[t].pos == pos::kCconj && first_head) attach(t, *first_head, "cc");
    }

    // clause-level attachment of NP heads
    for (const NPSpan& np : ann.np_chunks) {
      if (np.coordinated || np.begin < sent.begin || np.end > sent.end) continue;
      std::size_t h = np.head;
      if (h == *root || tokens[h].dep_head) continue;
      bool after_adp = np.begin > sent.begin && tokens[np.begin - 1].pos == pos::kAdp;
      if (after_adp) {
        std::size_t adp = np.begin - 1;
        attach(adp, h, "case");
        std::optional<std::size_t> governor;
        for (std::size_t j = adp; j-- > sent.begin;) {
          if (tokens[j].pos == pos::kVerb) {
            governor = j;
            break;
          }
          if (tokens[j].is_nominal() && !governor) governor = j;
        }
        attach(h, governor.value_or(*root), governor && tokens[*governor].is_nominal()
                                                ? "nmod"
                                                : "obl");
      } else if (h < *root) {
        attach(h, *root, passive ? "nsubj:pass" : "nsubj");
      } else {
        bool has_obj = false;
        for (std::size_t j = sent.begin; j < sent.end; ++j)
          if (tokens[j].dep_relation == "obj") has_obj = true;
        attach(h, *root, has_obj ? "obl" : "obj");
      }
    }

    // everything else hangs off the root
    for (std::size_t i = sent.begin; i < sent.end; ++i) {
      if (i == *root || tokens[i].dep_head) continue;
      const std::string& p = tokens[i].pos;
      const char* rel = "dep";
      if (p == pos::kPunct)
        rel = "punct";
      else if (p == pos::kAux)
        rel = passive ? "aux:pass" : "aux";
      else if (p == pos::kAdv)
        rel = "advmod";
      else if (p == pos::kSconj || p == pos::kPart)
        rel = "mark";
      else if (p == pos::kPron)
        rel = i < *root ? "nsubj" : "obj";
      else if (p == pos::kCconj)
        rel = "cc";
      attach(i, *root, rel);
    }
  }

  // -- stage vii: semantic cues -----------------------------------------------

  static void attach_semantics(TokenAnnotations& ann) {
    for (std::size_t s = 0; s < ann.sentences.size(); ++s) {
      const TokenSpan& sent = ann.sentences[s];
      for (std::size_t i = sent.begin; i < sent.end; ++i) {
        Token& t = ann.tokens[i];
        if (t.pos == pos::kPropn && i != sent.begin) t.cues.named_entity = true;

        if (!t.is_nominal()) {
          t.cues.abstractness = 0.5;
          continue;
        }
        if (rules::animate_lemmas().count(t.lemma)) {
          t.cues.animacy = Animacy::Animate;
          t.cues.abstractness = 0.0;
        } else if (t.pos == pos::kPropn) {
          t.cues.animacy = Animacy::Unknown;
        } else {
          t.cues.animacy = Animacy::Inanimate;
          if (rules::concrete_lemmas().count(t.lemma))
            t.cues.abstractness = 0.0;
          else if (rules::has_abstract_suffix(t.lemma))
            t.cues.abstractness = 1.0;
        }
        if (rules::collective_lemmas().count(t.lemma)) t.cues.collective = true;
      }
    }
  }
};

}  // namespace taphsir
