#include "toklab/categorize.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "toklab/normalize.hpp"
#include "toklab/utf8.hpp"

namespace toklab::categorize {
namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

CategoryReport match_category(const std::string& category,
                              const std::set<std::string>& tokens,
                              const std::set<std::string>& list) {
  CategoryReport r;
  r.category = category;
  std::set_intersection(tokens.begin(), tokens.end(), list.begin(), list.end(),
                        std::back_inserter(r.matched));
  r.list_size = list.size();
  r.vocab_size = tokens.size();
  r.coverage_of_list = ratio(r.matched.size(), r.list_size);
  r.coverage_of_vocab = ratio(r.matched.size(), r.vocab_size);
  return r;
}

std::set<std::string> clean_cased_set(const vocab::VocabularyFile& file) {
  std::set<std::string> out;
  for (const auto& t : file.tokens) {
    std::string c = normalize::clean_aggressive(normalize::strip_markers(t));
    if (!c.empty()) out.insert(std::move(c));
  }
  return out;
}

std::set<std::string> clean_lower_set(const vocab::VocabularyFile& file) {
  std::set<std::string> out;
  for (const auto& t : clean_cased_set(file)) out.insert(normalize::ascii_lower(t));
  return out;
}

std::set<std::string> proper_noun_candidates(const std::set<std::string>& cased_clean,
                                             ProperNounRule rule) {
  std::set<std::string> out;
  for (const auto& t : cased_clean) {
    if (t.empty() || !is_upper(t[0])) continue;
    if (rule == ProperNounRule::kStrict &&
        !std::all_of(t.begin() + 1, t.end(), is_lower)) {
      continue;
    }
    out.insert(t);
  }
  return out;
}

std::set<std::string> all_caps_tokens(const std::set<std::string>& tokens) {
  std::set<std::string> out;
  for (const auto& t : tokens) {
    if (t.size() > 1 && std::all_of(t.begin(), t.end(), is_upper)) out.insert(t);
  }
  return out;
}

std::vector<std::vector<std::string>> case_variant_groups(
    const std::set<std::string>& cased_clean) {
  std::map<std::string, std::vector<std::string>> by_lower;
  for (const auto& t : cased_clean) by_lower[normalize::ascii_lower(t)].push_back(t);
  std::vector<std::vector<std::string>> groups;
  for (auto& [lower, members] : by_lower) {
    if (members.size() >= 2) groups.push_back(std::move(members));
  }
  return groups;
}

std::size_t tokens_in_groups(const std::vector<std::vector<std::string>>& groups) {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

std::size_t redundant_case_variants(const std::vector<std::vector<std::string>>& groups) {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size() - 1;
  return n;
}

CategoryReport bad_word_scan(const std::vector<vocab::VocabularyFile>& files,
                             const std::set<std::string>& bad_words) {
  std::set<std::string> all_tokens;
  std::set<std::string> matched;
  std::map<std::string, std::size_t> per_file;
  for (const auto& f : files) {
    const auto tokens = clean_lower_set(f);
    std::size_t hits = 0;
    for (const auto& t : tokens) {
      if (bad_words.count(t)) {
        ++hits;
        matched.insert(t);
      }
    }
    per_file[f.name] += hits;
    all_tokens.insert(tokens.begin(), tokens.end());
  }
  CategoryReport r;
  r.category = "bad_words";
  r.matched.assign(matched.begin(), matched.end());
  r.per_file_counts = std::move(per_file);
  r.list_size = bad_words.size();
  r.vocab_size = all_tokens.size();
  r.coverage_of_list = ratio(r.matched.size(), r.list_size);
  r.coverage_of_vocab = ratio(r.matched.size(), r.vocab_size);
  return r;
}

std::map<std::string, SuspectHit> substring_suspect_scan(
    const std::vector<std::string>& tokens, const std::set<std::string>& watch,
    std::size_t min_len) {
  if (min_len < 3) throw std::invalid_argument("min_len must be at least 3");
  // Every substring of every watch word, mapped back to its words.
  std::unordered_map<std::string, std::set<std::string>> pieces;
  for (const auto& w : watch) {
    const std::u32string chars = utf8::decode(normalize::ascii_lower(w));
    for (std::size_t i = 0; i < chars.size(); ++i) {
      for (std::size_t len = min_len; i + len <= chars.size(); ++len) {
        pieces[utf8::encode(chars.substr(i, len))].insert(w);
      }
    }
  }
  std::map<std::string, SuspectHit> out;
  for (const auto& t : tokens) {
    if (utf8::length(t) < min_len) continue;
    const auto it = pieces.find(normalize::ascii_lower(t));
    if (it == pieces.end()) continue;
    SuspectHit hit;
    hit.containing.assign(it->second.begin(), it->second.end());
    hit.all_caps = std::all_of(t.begin(), t.end(), is_upper);
    out[t] = std::move(hit);
  }
  return out;
}

bool has_repeated_run(const std::string& token) {
  const std::u32string chars = utf8::try_decode(token).value_or(
      std::u32string(token.begin(), token.end()));
  if (chars.size() < 4) return false;
  std::size_t best = 1;
  std::size_t run = 1;
  for (std::size_t i = 1; i < chars.size(); ++i) {
    run = chars[i] == chars[i - 1] ? run + 1 : 1;
    best = std::max(best, run);
  }
  return 2 * best >= chars.size();
}

LengthStats vocab_length_stats(const std::vector<std::string>& tokens,
                               std::size_t top_k) {
  LengthStats stats;
  std::vector<LongToken> all;
  all.reserve(tokens.size());
  for (const auto& t : tokens) {
    LongToken lt{t, utf8::length(t), has_repeated_run(t)};
    ++stats.histogram[lt.length];
    all.push_back(std::move(lt));
  }
  std::sort(all.begin(), all.end(), [](const LongToken& a, const LongToken& b) {
    if (a.length != b.length) return a.length > b.length;
    return a.token < b.token;
  });
  for (const auto& lt : all) {
    if (stats.longest.size() < top_k) stats.longest.push_back(lt);
    if (!lt.repeated_run && stats.longest_nonrepeating.size() < top_k) {
      stats.longest_nonrepeating.push_back(lt);
    }
    if (stats.longest.size() >= top_k && stats.longest_nonrepeating.size() >= top_k) {
      break;
    }
  }
  return stats;
}

std::vector<CategoryReport> pos_reports(
    const std::set<std::string>& tokens,
    const std::map<std::string, std::set<lexicon::PosTag>>& words_pos) {
  std::vector<CategoryReport> out;
  for (lexicon::PosTag tag : lexicon::kAllPosTags) {
    std::set<std::string> list;
    for (const auto& [word, tags] : words_pos) {
      if (tags.count(tag)) list.insert(word);
    }
    out.push_back(match_category(std::string(lexicon::pos_name(tag)), tokens, list));
  }
  return out;
}

}  // namespace toklab::categorize
