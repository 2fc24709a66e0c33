#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "toklab/error.hpp"

namespace toklab::lexicon {

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& why)
      : Error("line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class ListKind { kCsw19, kS2, kAffixes, kFunctionWords, kBadWords, kIconicity };

std::string_view kind_name(ListKind kind);

enum class PosTag {
  kNoun,
  kVerb,
  kAdjective,
  kAdverb,
  kInterjection,
  kPreposition,
  kPronoun,
  kConjunction,
};

inline constexpr PosTag kAllPosTags[] = {
    PosTag::kNoun,         PosTag::kVerb,        PosTag::kAdjective,
    PosTag::kAdverb,       PosTag::kInterjection, PosTag::kPreposition,
    PosTag::kPronoun,      PosTag::kConjunction};

std::string_view pos_name(PosTag tag);
// Full names or the usual abbreviations (n, v, adj, adv, interj, prep, ...).
std::optional<PosTag> parse_pos(std::string_view text);

struct CswEntry {
  std::string word;
  std::set<PosTag> pos;
  std::vector<std::string> affixes;  // annotation order, duplicates removed
};

// WORD [TAB POS[,POS...] [TAB affix,affix...]]; repeated words are merged.
std::vector<CswEntry> parse_csw19(std::istream& in);
// One entry per line, trimmed and lowercased; blank lines skipped.
std::vector<std::string> parse_word_list(std::istream& in);
// word TAB decimal; a non-numeric first line is taken as a header.
std::map<std::string, double> parse_iconicity(std::istream& in);

std::vector<CswEntry> load_csw19(const std::filesystem::path& path);
std::vector<std::string> load_word_list(const std::filesystem::path& path);
std::map<std::string, double> load_iconicity(const std::filesystem::path& path);

struct Lexicon {
  std::vector<CswEntry> csw19;
  std::map<std::string, std::set<PosTag>> words_pos;
  std::set<std::string> s2;
  std::set<std::string> affixes;  // affix file plus CSW19 annotation affixes
  std::set<std::string> function_words;
  std::set<std::string> bad_words;
  std::map<std::string, double> iconicity;
  std::set<std::string> master_morphemes;

  // CSW19, S2 and function words: the set a "word" must belong to.
  const std::set<std::string>& word_set() const { return word_set_; }
  bool is_word(std::string_view lower) const;

  // Recomputes affixes, words_pos, master_morphemes and word_set.
  void finalize(const std::set<std::string>& affix_file_entries);

 private:
  std::set<std::string> word_set_;
};

// Union of the three lists after aggressive cleaning and lowercasing.
std::set<std::string> build_morpheme_master(const std::vector<CswEntry>& csw19,
                                            const std::set<std::string>& s2,
                                            const std::set<std::string>& affixes);

struct ListPaths {
  std::optional<std::filesystem::path> csw19;
  std::optional<std::filesystem::path> s2;
  std::optional<std::filesystem::path> affixes;
  std::optional<std::filesystem::path> function_words;
  std::vector<std::filesystem::path> bad_words;
  std::optional<std::filesystem::path> iconicity;

  // csw19.txt, s2.txt, affixes.txt, function_words.txt, bad_words*.txt and
  // iconicity.tsv; missing files are left unset.
  static ListPaths from_directory(const std::filesystem::path& dir);
};

Lexicon load_lexicon(const ListPaths& paths);

struct AffixExpansion {
  std::size_t annotations = 0;
  std::map<std::string, std::size_t> affix_frequency;
  std::set<std::string> generated;
  std::vector<std::string> missing_from_list;  // generated but not listed
  std::set<std::string> base_words;            // full list minus generated

  bool all_in_list() const { return missing_from_list.empty(); }
  double affix_share(const std::string& affix) const;
};

AffixExpansion expand_affixed_forms(const std::vector<CswEntry>& csw19);

// Tag assignments per POS over the given words (multi-tag words count once
// per tag).
std::map<PosTag, std::size_t> pos_distribution(
    const std::map<std::string, std::set<PosTag>>& words_pos,
    const std::set<std::string>* restrict_to = nullptr);

struct CountCheck {
  std::string name;
  std::size_t expected = 0;
  std::size_t actual = 0;
  bool available = false;  // false when the list needed was not supplied

  bool pass() const { return available && expected == actual; }
};

// Published sizes for the canonical list releases; meaningful only when
// those exact releases are loaded.
std::vector<CountCheck> canonical_count_checks(const Lexicon& lexicon,
                                               const ListPaths& paths);

}  // namespace toklab::lexicon
