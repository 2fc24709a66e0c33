#include "toklab/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_set>

#include "toklab/normalize.hpp"
#include "toklab/utf8.hpp"

namespace toklab::lexicon {
namespace {

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path.string());
  return in;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Reads lines, dropping one trailing CR; rejects invalid UTF-8.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!utf8::is_valid(line)) throw MalformedRecord(number, "invalid UTF-8");
    fn(number, line);
  }
}

std::string lower(std::string_view s) { return normalize::ascii_lower(s); }

}  // namespace

std::string_view kind_name(ListKind kind) {
  switch (kind) {
    case ListKind::kCsw19: return "csw19";
    case ListKind::kS2: return "s2";
    case ListKind::kAffixes: return "affixes";
    case ListKind::kFunctionWords: return "function_words";
    case ListKind::kBadWords: return "bad_words";
    case ListKind::kIconicity: return "iconicity";
  }
  return "?";
}

std::string_view pos_name(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return "noun";
    case PosTag::kVerb: return "verb";
    case PosTag::kAdjective: return "adjective";
    case PosTag::kAdverb: return "adverb";
    case PosTag::kInterjection: return "interjection";
    case PosTag::kPreposition: return "preposition";
    case PosTag::kPronoun: return "pronoun";
    case PosTag::kConjunction: return "conjunction";
  }
  return "?";
}

std::optional<PosTag> parse_pos(std::string_view text) {
  static const std::map<std::string, PosTag, std::less<>> names = {
      {"noun", PosTag::kNoun},         {"n", PosTag::kNoun},
      {"verb", PosTag::kVerb},         {"v", PosTag::kVerb},
      {"adjective", PosTag::kAdjective}, {"adj", PosTag::kAdjective},
      {"adverb", PosTag::kAdverb},     {"adv", PosTag::kAdverb},
      {"interjection", PosTag::kInterjection},
      {"interj", PosTag::kInterjection}, {"intj", PosTag::kInterjection},
      {"preposition", PosTag::kPreposition}, {"prep", PosTag::kPreposition},
      {"pronoun", PosTag::kPronoun},   {"pron", PosTag::kPronoun},
      {"conjunction", PosTag::kConjunction}, {"conj", PosTag::kConjunction},
  };
  std::string key = lower(utf8::strip(text));
  if (!key.empty() && key.back() == '.') key.pop_back();
  const auto it = names.find(key);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

std::vector<CswEntry> parse_csw19(std::istream& in) {
  std::vector<CswEntry> entries;
  std::map<std::string, std::size_t> index;
  for_each_line(in, [&](std::size_t number, const std::string& line) {
    if (utf8::strip(line).empty()) return;
    const auto fields = split(line, '\t');
    if (fields.size() > 3) throw MalformedRecord(number, "more than 3 fields");
    const std::string word = lower(utf8::strip(fields[0]));
    if (word.empty()) throw MalformedRecord(number, "empty word");
    if (word.find(' ') != std::string::npos) {
      throw MalformedRecord(number, "word contains a space");
    }
    auto [it, inserted] = index.emplace(word, entries.size());
    if (inserted) entries.push_back({word, {}, {}});
    CswEntry& entry = entries[it->second];
    if (fields.size() >= 2) {
      for (auto part : split(fields[1], ',')) {
        if (utf8::strip(part).empty()) continue;
        const auto tag = parse_pos(part);
        if (!tag) {
          throw MalformedRecord(number,
                                "unknown part of speech '" + std::string(part) + "'");
        }
        entry.pos.insert(*tag);
      }
    }
    if (fields.size() == 3) {
      for (auto part : split(fields[2], ',')) {
        const std::string affix = lower(utf8::strip(part));
        if (affix.empty()) continue;
        if (std::find(entry.affixes.begin(), entry.affixes.end(), affix) ==
            entry.affixes.end()) {
          entry.affixes.push_back(affix);
        }
      }
    }
  });
  return entries;
}

std::vector<std::string> parse_word_list(std::istream& in) {
  std::vector<std::string> words;
  for_each_line(in, [&](std::size_t number, const std::string& line) {
    if (line.find('\t') != std::string::npos) {
      throw MalformedRecord(number, "tab in a one-entry-per-line list");
    }
    std::string word = lower(utf8::strip(line));
    if (!word.empty()) words.push_back(std::move(word));
  });
  return words;
}

std::map<std::string, double> parse_iconicity(std::istream& in) {
  std::map<std::string, double> scores;
  for_each_line(in, [&](std::size_t number, const std::string& line) {
    if (utf8::strip(line).empty()) return;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) throw MalformedRecord(number, "expected word TAB score");
    const std::string word = lower(utf8::strip(fields[0]));
    const std::string text = utf8::strip(fields[1]);
    double value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      if (number == 1) return;  // header
      throw MalformedRecord(number, "score is not a number");
    }
    if (word.empty()) throw MalformedRecord(number, "empty word");
    scores[word] = value;
  });
  return scores;
}

std::vector<CswEntry> load_csw19(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_csw19(in);
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_word_list(in);
}

std::map<std::string, double> load_iconicity(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_iconicity(in);
}

bool Lexicon::is_word(std::string_view lower) const {
  return word_set_.count(std::string(lower)) > 0;
}

void Lexicon::finalize(const std::set<std::string>& affix_file_entries) {
  words_pos.clear();
  affixes = affix_file_entries;
  for (const auto& e : csw19) {
    words_pos[e.word].insert(e.pos.begin(), e.pos.end());
    affixes.insert(e.affixes.begin(), e.affixes.end());
  }
  master_morphemes = build_morpheme_master(csw19, s2, affixes);
  word_set_.clear();
  for (const auto& e : csw19) word_set_.insert(e.word);
  word_set_.insert(s2.begin(), s2.end());
  word_set_.insert(function_words.begin(), function_words.end());
}

std::set<std::string> build_morpheme_master(const std::vector<CswEntry>& csw19,
                                            const std::set<std::string>& s2,
                                            const std::set<std::string>& affixes) {
  std::set<std::string> master;
  auto add = [&master](std::string_view entry) {
    std::string clean = normalize::ascii_lower(normalize::clean_aggressive(entry));
    if (!clean.empty()) master.insert(std::move(clean));
  };
  for (const auto& e : csw19) add(e.word);
  for (const auto& w : s2) add(w);
  for (const auto& a : affixes) add(a);
  return master;
}

ListPaths ListPaths::from_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoFailure(dir.string());
  ListPaths paths;
  auto maybe = [&dir](const char* name) -> std::optional<fs::path> {
    const fs::path p = dir / name;
    if (fs::is_regular_file(p)) return p;
    return std::nullopt;
  };
  paths.csw19 = maybe("csw19.txt");
  paths.s2 = maybe("s2.txt");
  paths.affixes = maybe("affixes.txt");
  paths.function_words = maybe("function_words.txt");
  paths.iconicity = maybe("iconicity.tsv");
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("bad_words") &&
        name.ends_with(".txt")) {
      paths.bad_words.push_back(entry.path());
    }
  }
  std::sort(paths.bad_words.begin(), paths.bad_words.end());
  return paths;
}

Lexicon load_lexicon(const ListPaths& paths) {
  Lexicon lex;
  auto as_set = [](const std::vector<std::string>& v) {
    return std::set<std::string>(v.begin(), v.end());
  };
  if (paths.csw19) lex.csw19 = load_csw19(*paths.csw19);
  if (paths.s2) lex.s2 = as_set(load_word_list(*paths.s2));
  if (paths.function_words) {
    lex.function_words = as_set(load_word_list(*paths.function_words));
  }
  for (const auto& p : paths.bad_words) {
    for (auto& w : load_word_list(p)) lex.bad_words.insert(std::move(w));
  }
  if (paths.iconicity) lex.iconicity = load_iconicity(*paths.iconicity);
  std::set<std::string> affix_file;
  if (paths.affixes) affix_file = as_set(load_word_list(*paths.affixes));
  lex.finalize(affix_file);
  return lex;
}

double AffixExpansion::affix_share(const std::string& affix) const {
  if (annotations == 0) return 0.0;
  const auto it = affix_frequency.find(affix);
  if (it == affix_frequency.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(annotations);
}

AffixExpansion expand_affixed_forms(const std::vector<CswEntry>& csw19) {
  AffixExpansion out;
  std::unordered_set<std::string> full;
  full.reserve(csw19.size());
  for (const auto& e : csw19) full.insert(e.word);
  for (const auto& e : csw19) {
    for (const auto& affix : e.affixes) {
      ++out.annotations;
      ++out.affix_frequency[affix];
      out.generated.insert(e.word + affix);
    }
  }
  for (const auto& g : out.generated) {
    if (!full.count(g)) out.missing_from_list.push_back(g);
  }
  for (const auto& e : csw19) {
    if (!out.generated.count(e.word)) out.base_words.insert(e.word);
  }
  return out;
}

std::map<PosTag, std::size_t> pos_distribution(
    const std::map<std::string, std::set<PosTag>>& words_pos,
    const std::set<std::string>* restrict_to) {
  std::map<PosTag, std::size_t> counts;
  for (const auto& [word, tags] : words_pos) {
    if (restrict_to && !restrict_to->count(word)) continue;
    for (PosTag t : tags) ++counts[t];
  }
  return counts;
}

std::vector<CountCheck> canonical_count_checks(const Lexicon& lexicon,
                                               const ListPaths& paths) {
  std::vector<CountCheck> checks;
  const bool csw = paths.csw19.has_value();
  const bool all_morph = csw && paths.s2 && paths.affixes;
  const AffixExpansion expansion = expand_affixed_forms(lexicon.csw19);

  std::set<std::string> csw_plus = lexicon.affixes;
  for (const auto& e : lexicon.csw19) csw_plus.insert(e.word);

  checks.push_back({"csw19 entries", 279496, lexicon.csw19.size(), csw});
  checks.push_back({"csw19 + affixes", 279585, csw_plus.size(),
                    csw && paths.affixes.has_value()});
  checks.push_back({"affixes", 316, lexicon.affixes.size(),
                    csw && paths.affixes.has_value()});
  checks.push_back({"affix annotations (generated forms)", 90686,
                    expansion.annotations, csw});
  checks.push_back({"generated forms missing from csw19", 0,
                    expansion.missing_from_list.size(), csw});
  checks.push_back({"base words", 189558, expansion.base_words.size(), csw});
  checks.push_back({"master morphemes", 458685, lexicon.master_morphemes.size(),
                    all_morph});
  checks.push_back({"function words", 277, lexicon.function_words.size(),
                    paths.function_words.has_value()});
  checks.push_back({"bad-word union", 965, lexicon.bad_words.size(),
                    !paths.bad_words.empty()});
  return checks;
}

}  // namespace toklab::lexicon
