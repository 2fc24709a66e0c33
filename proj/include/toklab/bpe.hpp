#pragma once

// Character-level byte-pair encoding: training, encoding and serialization.
//
// The corpus is treated as one continuous string of Unicode scalar values.
// There is no pre-tokenization: whitespace is an ordinary character, so merges
// may span word boundaries and produce phrase-like tokens.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "toklab/error.hpp"

namespace toklab::bpe {

using TokenId = std::uint32_t;

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("training corpus is empty") {}
};

class TargetTooSmall : public Error {
 public:
  TargetTooSmall(std::size_t target, std::size_t required)
      : Error("target vocabulary size " + std::to_string(target) +
              " is smaller than alphabet + specials (" +
              std::to_string(required) + ")"),
        required_(required) {}
  std::size_t required() const { return required_; }

 private:
  std::size_t required_;
};

class UnknownCharacter : public Error {
 public:
  UnknownCharacter(char32_t c, std::size_t offset)
      : Error("character U+" + hex(c) + " at offset " + std::to_string(offset) +
              " is not in the model alphabet"),
        character_(c),
        offset_(offset) {}
  char32_t character() const { return character_; }
  // Offset in code points from the start of the encoded text.
  std::size_t offset() const { return offset_; }

 private:
  static std::string hex(char32_t c);
  char32_t character_;
  std::size_t offset_;
};

class InvalidId : public Error {
 public:
  explicit InvalidId(TokenId id)
      : Error("token id " + std::to_string(id) + " is not in the vocabulary"),
        id_(id) {}
  TokenId id() const { return id_; }

 private:
  TokenId id_;
};

class MalformedModel : public Error {
 public:
  using Error::Error;
};

struct MergeRule {
  std::string left;
  std::string right;
  std::string result;  // left + right
  std::size_t rank = 0;

  bool operator==(const MergeRule&) const = default;
};

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::string> surface;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
};

// Padding, unknown, classification, separator, mask.
const std::vector<std::string>& default_specials();

enum class UnknownPolicy {
  kError,
  kSubstitute,  // map to the "[UNK]"-style special; requires one in the model
};

// Immutable trained tokenizer. Ids are laid out as specials, then the base
// alphabet in code-point order, then merge results in rank order (a result
// string produced by two different merges keeps its first id).
class BpeModel {
 public:
  BpeModel(std::u32string alphabet, std::vector<MergeRule> merges,
           std::vector<std::string> specials, std::size_t target_vocab_size);

  const std::u32string& base_alphabet() const { return alphabet_; }
  const std::vector<MergeRule>& merges() const { return merges_; }
  const std::vector<std::string>& specials() const { return specials_; }
  std::size_t target_vocab_size() const { return target_; }
  std::size_t effective_capacity() const { return target_ - specials_.size(); }

  // Number of distinct vocabulary entries, specials included.
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::optional<TokenId> token_id(std::string_view token) const;
  const std::string& token(TokenId id) const;
  bool is_special(TokenId id) const { return id < specials_.size(); }

  // The model a smaller training target would have produced: merges are
  // truncated at the first point the vocabulary reaches `target`.
  BpeModel truncated(std::size_t target) const;

  TokenSequence encode(std::string_view text,
                       UnknownPolicy policy = UnknownPolicy::kError) const;
  std::string decode(std::span<const TokenId> ids) const;

  // Length in code points of the longest non-special entry.
  std::size_t max_token_length() const;

  std::string serialize() const;
  static BpeModel deserialize(std::string_view text);

  bool operator==(const BpeModel& other) const;

 private:
  struct PairInfo {
    std::vector<std::uint32_t> ranks;  // ascending
    TokenId result = 0;
  };

  std::u32string alphabet_;
  std::vector<MergeRule> merges_;
  std::vector<std::string> specials_;
  std::size_t target_;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> ids_;
  std::unordered_map<char32_t, TokenId> char_ids_;
  std::unordered_map<std::uint64_t, PairInfo> pairs_;
  std::vector<std::uint64_t> rank_pair_;  // rank -> packed (left, right) ids
  std::vector<TokenId> rank_result_;
};

// Greedy training: repeatedly merges the most frequent adjacent pair in the
// current segmentation. Ties go to the smallest (left, right) pair in
// code-point order. Stops when the vocabulary reaches `target_vocab_size` or
// no pair occurs at least twice.
BpeModel train(std::string_view corpus, std::size_t target_vocab_size,
               const std::vector<std::string>& specials = default_specials());

}  // namespace toklab::bpe
