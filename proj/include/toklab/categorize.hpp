#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "toklab/lexicon.hpp"
#include "toklab/vocab.hpp"

namespace toklab::categorize {

struct CategoryReport {
  std::string category;
  std::vector<std::string> matched;  // sorted; a subset of the tokens
  std::map<std::string, std::size_t> per_file_counts;
  std::size_t list_size = 0;
  std::size_t vocab_size = 0;
  double coverage_of_list = 0;   // matched / list_size
  double coverage_of_vocab = 0;  // matched / vocab_size
};

CategoryReport match_category(const std::string& category,
                              const std::set<std::string>& tokens,
                              const std::set<std::string>& list);

// Clean lowercase distinct tokens of one file.
std::set<std::string> clean_lower_set(const vocab::VocabularyFile& file);
// Clean cased distinct tokens of one file.
std::set<std::string> clean_cased_set(const vocab::VocabularyFile& file);

enum class ProperNounRule {
  kInitialCapital,  // first character A-Z
  kStrict,          // A-Z followed only by a-z
};

std::set<std::string> proper_noun_candidates(
    const std::set<std::string>& cased_clean,
    ProperNounRule rule = ProperNounRule::kInitialCapital);

// Length > 1 and every character A-Z.
std::set<std::string> all_caps_tokens(const std::set<std::string>& tokens);

// Groups of two or more tokens sharing a lowercase form, each sorted.
std::vector<std::vector<std::string>> case_variant_groups(
    const std::set<std::string>& cased_clean);
std::size_t tokens_in_groups(const std::vector<std::vector<std::string>>& groups);
// Tokens that lowercasing folds away: sum of (group size - 1), which equals
// |cased| - |lowercased| over the grouped set.
std::size_t redundant_case_variants(const std::vector<std::vector<std::string>>& groups);

// Per-file exact matches of clean lowercase tokens against the list.
CategoryReport bad_word_scan(const std::vector<vocab::VocabularyFile>& files,
                             const std::set<std::string>& bad_words);

struct SuspectHit {
  std::vector<std::string> containing;  // watch words, sorted
  bool all_caps = false;
};

// Tokens (compared lowercase) of at least min_len code points that occur
// inside some watch word. min_len must be >= 3.
std::map<std::string, SuspectHit> substring_suspect_scan(
    const std::vector<std::string>& tokens, const std::set<std::string>& watch,
    std::size_t min_len = 3);

struct LongToken {
  std::string token;
  std::size_t length = 0;  // code points
  bool repeated_run = false;
};

struct LengthStats {
  std::map<std::size_t, std::size_t> histogram;
  std::vector<LongToken> longest;              // top-k, ties by token
  std::vector<LongToken> longest_nonrepeating;  // top-k without a flagged run
};

// A token of length >= 4 whose longest run of one repeated code point covers
// at least half of it is flagged as a formatting token.
bool has_repeated_run(const std::string& token);
LengthStats vocab_length_stats(const std::vector<std::string>& tokens,
                               std::size_t top_k = 20);

// One report per CSW19 tag; a token inherits every tag of its surface form.
std::vector<CategoryReport> pos_reports(
    const std::set<std::string>& tokens,
    const std::map<std::string, std::set<lexicon::PosTag>>& words_pos);

}  // namespace toklab::categorize
