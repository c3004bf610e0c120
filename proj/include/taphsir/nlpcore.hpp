#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taphsir/annotations.hpp"
#include "taphsir/corpus.hpp"
#include "taphsir/errors.hpp"
#include "taphsir/strutil.hpp"

namespace taphsir {

// ---------------------------------------------------------------------------
// Analyzer interface
// ---------------------------------------------------------------------------

// Seven-stage linguistic analysis: tokenize, sentence-split, POS, lemma,
// chunking, dependencies, semantic cues. Implementations need not be safe
// for concurrent use; the contract is one instance per worker. Produced
// annotations are plain values, safe to share once built.
class LinguisticAnalyzer {
 public:
  virtual ~LinguisticAnalyzer() = default;
  virtual std::string identity() const = 0;
  virtual TokenAnnotations analyze_text(const std::string& text) const = 0;
};

inline TokenAnnotations analyze(const Requirement& req, const LinguisticAnalyzer& analyzer) {
  if (trim_view(req.text).empty())
    throw AnalysisError(req.id, "requirement text is empty");
  try {
    return analyzer.analyze_text(req.text);
  } catch (const AnalysisError&) {
    throw;
  } catch (const std::exception& e) {
    throw AnalysisError(req.id, e.what());
  }
}

inline void analyze_document(Document& doc, const LinguisticAnalyzer& analyzer) {
  for (Requirement& req : doc.requirements) req.annotations = analyze(req, analyzer);
}

// ---------------------------------------------------------------------------
// Pronouns
// ---------------------------------------------------------------------------

enum class PronounClass { Personal, Possessive, Reflexive, Demonstrative };

inline std::string to_string(PronounClass c) {
  switch (c) {
    case PronounClass::Personal: return "personal";
    case PronounClass::Possessive: return "possessive";
    case PronounClass::Reflexive: return "reflexive";
    case PronounClass::Demonstrative: return "demonstrative";
  }
  return "personal";
}

inline std::optional<PronounClass> pronoun_class_from(std::string_view s) {
  if (s == "personal") return PronounClass::Personal;
  if (s == "possessive") return PronounClass::Possessive;
  if (s == "reflexive") return PronounClass::Reflexive;
  if (s == "demonstrative") return PronounClass::Demonstrative;
  return std::nullopt;
}

struct PronounOccurrence {
  std::size_t req_ordinal = 0;
  std::size_t token_index = 0;
  std::string surface;
  PronounClass pronoun_class = PronounClass::Personal;
};

namespace detail {

// Third-person pronominal forms only; first/second person never anchor
// anaphora analysis here. "her" is split on context by the caller.
inline std::optional<PronounClass> classify_third_person(const std::string& lower) {
  static const std::set<std::string> personal = {"it", "they", "them", "he", "him", "she"};
  static const std::set<std::string> possessive = {"its", "their", "theirs", "his", "hers"};
  static const std::set<std::string> reflexive = {"itself", "themselves", "himself",
                                                  "herself", "themself"};
  static const std::set<std::string> demonstrative = {"this", "that", "these", "those"};
  if (personal.count(lower)) return PronounClass::Personal;
  if (possessive.count(lower)) return PronounClass::Possessive;
  if (reflexive.count(lower)) return PronounClass::Reflexive;
  if (demonstrative.count(lower)) return PronounClass::Demonstrative;
  return std::nullopt;
}

inline bool pronoun_is_plural_form(const std::string& lower) {
  static const std::set<std::string> plural = {"they", "them", "their", "theirs",
                                               "themselves", "themself", "these", "those"};
  return plural.count(lower) > 0;
}

enum class Gender { Unknown, Masculine, Feminine, Neuter };

inline Gender pronoun_gender(const std::string& lower) {
  if (lower == "he" || lower == "him" || lower == "his" || lower == "himself")
    return Gender::Masculine;
  if (lower == "she" || lower == "her" || lower == "hers" || lower == "herself")
    return Gender::Feminine;
  if (lower == "it" || lower == "its" || lower == "itself") return Gender::Neuter;
  return Gender::Unknown;
}

inline Animacy pronoun_animacy(const std::string& lower) {
  switch (pronoun_gender(lower)) {
    case Gender::Masculine:
    case Gender::Feminine: return Animacy::Animate;
    case Gender::Neuter: return Animacy::Inanimate;
    case Gender::Unknown: return Animacy::Unknown;
  }
  return Animacy::Unknown;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pleonastic "it"
// ---------------------------------------------------------------------------

// Templates matched against the tokens following a candidate "it", within
// its sentence:
//   it <be|MODAL be> [ADV] <pleonastic adjective/participle> <that|to|for|whether>
//   it <be> the case that ...
//   it <weather verb> ...
// Returns 1.0 for a full template match, 0.5 when the copular frame matches
// but no complementizer follows, 0 otherwise.
inline double pleonastic_pattern_score(const TokenAnnotations& ann, std::size_t it_index) {
  static const std::set<std::string> adjectives = {
      "required",   "necessary", "possible",    "impossible", "important",
      "essential",  "mandatory", "recommended", "desirable",  "critical",
      "acceptable", "permissible", "assumed",   "expected",   "ensured",
      "likely",     "unlikely",  "clear",       "evident",    "obvious",
      "understood", "noted",     "useful",      "sufficient"};
  static const std::set<std::string> modals = {"shall", "should", "must", "will",
                                               "would", "may",   "might", "can",
                                               "could"};
  static const std::set<std::string> weather = {"rain", "snow", "hail", "thunder",
                                                "drizzle"};

  const auto& tokens = ann.tokens;
  if (it_index >= tokens.size() || to_lower(tokens[it_index].surface) != "it") return 0.0;
  const std::size_t sent_end = ann.sentences.empty()
                                   ? tokens.size()
                                   : ann.sentences[ann.sentence_of(it_index)].end;

  std::size_t i = it_index + 1;
  if (i >= sent_end) return 0.0;

  if (weather.count(tokens[i].lemma)) return 1.0;

  // optional modal, then a form of "be"
  if (modals.count(to_lower(tokens[i].surface))) ++i;
  if (i >= sent_end || tokens[i].lemma != "be") return 0.0;
  ++i;
  while (i < sent_end && tokens[i].pos == pos::kAdv) ++i;
  if (i >= sent_end) return 0.0;

  std::string word = to_lower(tokens[i].surface);
  if (word == "the" && i + 2 < sent_end && to_lower(tokens[i + 1].surface) == "case" &&
      to_lower(tokens[i + 2].surface) == "that")
    return 1.0;
  if (!adjectives.count(word)) return 0.0;
  ++i;
  if (i < sent_end) {
    std::string next = to_lower(tokens[i].surface);
    if (next == "that" || next == "to" || next == "for" || next == "whether") return 1.0;
  }
  return 0.5;
}

// ---------------------------------------------------------------------------
// find_pronouns
// ---------------------------------------------------------------------------

struct PronounFilter {
  std::set<PronounClass> target_classes = {PronounClass::Personal, PronounClass::Possessive};
  bool exclude_pleonastic_it = true;
};

// All tokens tagged PRON whose third-person class is in the target set,
// in (ordinal, token index) order. Requires analyzed requirements.
inline std::vector<PronounOccurrence> find_pronouns(const Document& doc,
                                                    const PronounFilter& filter = {}) {
  std::vector<PronounOccurrence> out;
  for (const Requirement& req : doc.requirements) {
    const auto& tokens = req.annotations.tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].pos != pos::kPron) continue;
      std::string lower = to_lower(tokens[i].surface);

      std::optional<PronounClass> cls;
      if (lower == "her") {
        // possessive before a nominal or adjective, personal otherwise
        bool possessive = i + 1 < tokens.size() &&
                          (tokens[i + 1].is_nominal() || tokens[i + 1].pos == pos::kAdj);
        cls = possessive ? PronounClass::Possessive : PronounClass::Personal;
      } else {
        cls = detail::classify_third_person(lower);
      }
      if (!cls || !filter.target_classes.count(*cls)) continue;
      if (filter.exclude_pleonastic_it && lower == "it" &&
          pleonastic_pattern_score(req.annotations, i) >= 1.0)
        continue;

      out.push_back({req.ordinal, i, tokens[i].surface, *cls});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Context
// ---------------------------------------------------------------------------

struct ContextToken {
  std::size_t req_ordinal = 0;
  std::size_t token_index = 0;  // within the requirement
  Token token;
};

// NP chunk projected into context coordinates.
struct ContextNP {
  std::size_t begin = 0;
  std::size_t end = 0;   // exclusive
  std::size_t head = 0;  // context index of the head token
  std::size_t req_ordinal = 0;
  NPSpan req_span;       // original requirement-local span
};

// The pronoun's requirement plus a window of preceding requirements, as one
// concatenated token sequence. Tokens are copied; a context stays valid on
// its own and is shared read-only between the triples built over it.
struct Context {
  std::shared_ptr<const Document> doc;
  std::vector<std::size_t> req_ordinals;  // contiguous, ends at the pronoun's requirement
  std::vector<ContextToken> tokens;
  std::vector<ContextNP> np_spans;
  std::vector<TokenSpan> sentences;  // context coordinates
  std::size_t pronoun_position = 0;

  const Token& token(std::size_t i) const { return tokens.at(i).token; }
  const Token& pronoun_token() const { return tokens.at(pronoun_position).token; }

  std::size_t sentence_of(std::size_t i) const {
    for (std::size_t s = 0; s < sentences.size(); ++s)
      if (sentences[s].contains(i)) return s;
    return sentences.empty() ? 0 : sentences.size() - 1;
  }

  // Surface text of a context token range, reconstructed from the original
  // requirement text so spacing survives. Ranges spanning requirement
  // boundaries are joined with single spaces.
  std::string span_text(std::size_t begin, std::size_t end) const {
    std::string out;
    std::size_t i = begin;
    while (i < end) {
      std::size_t j = i;
      while (j + 1 < end && tokens[j + 1].req_ordinal == tokens[i].req_ordinal) ++j;
      const Requirement& req = doc->at(tokens[i].req_ordinal);
      std::size_t from = tokens[i].token.char_start;
      std::size_t to = tokens[j].token.char_end;
      if (!out.empty()) out += ' ';
      out += req.text.substr(from, to - from);
      i = j + 1;
    }
    return out;
  }
};

inline Context build_context(const PronounOccurrence& p,
                             std::shared_ptr<const Document> doc,
                             std::size_t window = 1) {
  Context ctx;
  ctx.doc = doc;
  std::size_t first = p.req_ordinal >= window ? p.req_ordinal - window : 0;

  std::size_t offset = 0;
  std::size_t sentence_offset_token = 0;
  for (std::size_t ord = first; ord <= p.req_ordinal; ++ord) {
    const Requirement& req = doc->at(ord);
    const TokenAnnotations& ann = req.annotations;
    ctx.req_ordinals.push_back(ord);

    for (std::size_t i = 0; i < ann.tokens.size(); ++i)
      ctx.tokens.push_back({ord, i, ann.tokens[i]});
    for (const NPSpan& np : ann.np_chunks)
      ctx.np_spans.push_back({np.begin + offset, np.end + offset, np.head + offset, ord, np});
    for (const TokenSpan& s : ann.sentences)
      ctx.sentences.push_back({s.begin + offset, s.end + offset});

    offset += ann.tokens.size();
    sentence_offset_token = offset;
  }
  (void)sentence_offset_token;

  std::size_t pronoun_offset = 0;
  for (std::size_t ord = first; ord < p.req_ordinal; ++ord)
    pronoun_offset += doc->at(ord).annotations.tokens.size();
  ctx.pronoun_position = pronoun_offset + p.token_index;

  if (ctx.pronoun_position >= ctx.tokens.size())
    throw InternalConsistencyError("pronoun token index out of context range");
  return ctx;
}

// ---------------------------------------------------------------------------
// Candidates & triples
// ---------------------------------------------------------------------------

struct CandidateAntecedent {
  std::size_t req_ordinal = 0;
  NPSpan req_span;            // requirement-local coordinates
  std::size_t ctx_begin = 0;  // context coordinates, half-open
  std::size_t ctx_end = 0;
  std::size_t ctx_head = 0;
  std::string text;
  int recency_rank = 0;  // 1 = nearest NP left of the pronoun
  bool coordinated = false;

  bool is_plural(const Context& ctx) const {
    return coordinated || ctx.token(ctx_head).plural;
  }
};

// Every NP chunk in the context whose last token strictly precedes the
// pronoun, nearest first. Coordinations contribute both the full span and
// each conjunct (the chunker emits all of them). An optional cap keeps the
// nearest `max_candidates`, dropping the farthest.
inline std::vector<CandidateAntecedent> extract_candidates(
    const Context& ctx, const PronounOccurrence& p,
    std::optional<std::size_t> max_candidates = std::nullopt) {
  (void)p;
  std::vector<const ContextNP*> spans;
  for (const ContextNP& np : ctx.np_spans)
    if (np.end <= ctx.pronoun_position) spans.push_back(&np);

  // Nearest first: later end wins, then the inner (shorter) span.
  std::sort(spans.begin(), spans.end(), [](const ContextNP* a, const ContextNP* b) {
    if (a->end != b->end) return a->end > b->end;
    return a->begin > b->begin;
  });

  std::vector<CandidateAntecedent> out;
  out.reserve(spans.size());
  for (const ContextNP* np : spans) {
    CandidateAntecedent c;
    c.req_ordinal = np->req_ordinal;
    c.req_span = np->req_span;
    c.ctx_begin = np->begin;
    c.ctx_end = np->end;
    c.ctx_head = np->head;
    c.text = ctx.span_text(np->begin, np->end);
    c.recency_rank = static_cast<int>(out.size()) + 1;
    c.coordinated = np->req_span.coordinated;
    out.push_back(std::move(c));
    if (max_candidates && out.size() >= *max_candidates) break;
  }
  return out;
}

struct Triple {
  PronounOccurrence pronoun;
  std::shared_ptr<const Context> context;
  CandidateAntecedent candidate;
  std::string triple_id;  // doc/req/p<token index>/c<rank>
};

inline std::string make_triple_id(const std::string& doc_id, const std::string& req_id,
                                  std::size_t pronoun_token_index, int rank) {
  return doc_id + "/" + req_id + "/p" + std::to_string(pronoun_token_index) + "/c" +
         std::to_string(rank);
}

// One triple per candidate; all triples share the same context object.
inline std::vector<Triple> make_triples(const PronounOccurrence& p,
                                        std::shared_ptr<const Context> ctx,
                                        const std::vector<CandidateAntecedent>& candidates) {
  const Document& doc = *ctx->doc;
  const std::string& req_id = doc.at(p.req_ordinal).id;

  std::vector<Triple> out;
  out.reserve(candidates.size());
  for (const CandidateAntecedent& c : candidates) {
    if (c.ctx_end > ctx->pronoun_position)
      throw InternalConsistencyError("candidate does not precede its pronoun");
    Triple t;
    t.pronoun = p;
    t.context = ctx;
    t.candidate = c;
    t.triple_id = make_triple_id(doc.doc_id, req_id, p.token_index, c.recency_rank);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace taphsir
