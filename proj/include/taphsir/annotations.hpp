#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace taphsir {

// Universal POS tags as produced by the analyzers.
namespace pos {
inline constexpr const char* kNoun = "NOUN";
inline constexpr const char* kProperNoun = "PROPN";
inline constexpr const char* kVerb = "VERB";
inline constexpr const char* kAux = "AUX";
inline constexpr const char* kAdj = "ADJ";
inline constexpr const char* kAdv = "ADV";
inline constexpr const char* kPron = "PRON";
inline constexpr const char* kDet = "DET";
inline constexpr const char* kAdp = "ADP";
inline constexpr const char* kNum = "NUM";
inline constexpr const char* kCconj = "CCONJ";
inline constexpr const char* kSconj = "SCONJ";
inline constexpr const char* kPart = "PART";
inline constexpr const char* kPunct = "PUNCT";
inline constexpr const char* kOther = "X";
}  // namespace pos

enum class Animacy { Unknown, Animate, Inanimate };

// Outputs of the semantic analysis stage, attached per token.
struct SemanticCues {
  Animacy animacy = Animacy::Unknown;
  bool named_entity = false;
  bool collective = false;
  double abstractness = 0.5;  // 0 concrete, 1 abstract, 0.5 unknown
};

struct Token {
  std::string surface;
  std::string lemma;
  std::string pos;
  std::optional<std::size_t> dep_head;  // none for the sentence root
  std::string dep_relation;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive
  bool plural = false;
  SemanticCues cues;

  bool is_nominal() const { return pos == pos::kNoun || pos == pos::kProperNoun; }
};

// Half-open token range.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Noun-phrase chunk over requirement-local token indices. Coordinated NPs
// appear both as one span covering the whole coordination and as one span
// per conjunct; conjunct spans nest inside the coordination span.
struct NPSpan {
  std::size_t begin = 0;
  std::size_t end = 0;    // exclusive
  std::size_t head = 0;   // head token index, begin <= head < end
  bool coordinated = false;

  std::size_t last_token() const { return end - 1; }
  friend bool operator==(const NPSpan&, const NPSpan&) = default;
};

struct TokenAnnotations {
  std::vector<Token> tokens;
  std::vector<TokenSpan> sentences;  // partition the token list
  std::vector<NPSpan> np_chunks;

  // Sentence index of a token, by linear scan; sentences are few.
  std::size_t sentence_of(std::size_t token_index) const {
    for (std::size_t i = 0; i < sentences.size(); ++i)
      if (sentences[i].contains(token_index)) return i;
    return sentences.empty() ? 0 : sentences.size() - 1;
  }
};

}  // namespace taphsir
