#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace toklab::normalize {

// Boundary markers removed by strip_markers. Leading markers are stripped
// repeatedly; prefixes once per pass; passes repeat until nothing changes.
struct MarkerConfig {
  bool strip_whitespace = true;
  std::vector<std::string> leading = {"_", "\xE2\x96\x81"};  // "_", U+2581
  std::vector<std::string> prefixes = {"##"};
};

std::string strip_markers(std::string_view token, const MarkerConfig& config = {});

// Keeps [A-Za-z ] only. Works on bytes: no multi-byte sequence can contain
// an ASCII byte, so non-Latin characters vanish whole.
std::string clean_aggressive(std::string_view token);

std::string ascii_lower(std::string_view text);

struct TokenRecord {
  std::string raw;
  std::string stripped;
  std::string clean;
  std::string clean_lower;

  bool empty_after_clean() const { return clean.empty(); }
};

TokenRecord make_record(std::string_view raw, const MarkerConfig& config = {});
std::vector<TokenRecord> make_records(const std::vector<std::string>& raw,
                                      const MarkerConfig& config = {});

// Sorted distinct non-empty strings; lowercased first when !case_sensitive.
std::vector<std::string> dedup(const std::vector<std::string>& tokens,
                               bool case_sensitive);

struct CleanCounts {
  std::size_t raw = 0;
  std::size_t cleaned = 0;  // sum over files of distinct non-empty clean tokens
  std::size_t unique_cased = 0;  // across all files
  std::size_t unique_lower = 0;
};

// Clean tokens are strip -> clean; counts follow the monotone chain
// unique_lower <= unique_cased <= cleaned <= raw.
CleanCounts count_clean(const std::vector<std::vector<std::string>>& files,
                        const MarkerConfig& config = {});
CleanCounts count_clean(const std::vector<std::string>& raw,
                        const MarkerConfig& config = {});

// raw TAB stripped TAB clean TAB clean_lower, with \t \n \r \\ escaped.
void write_tsv(std::ostream& out, const std::vector<TokenRecord>& records);

std::string escape_field(std::string_view field);

}  // namespace toklab::normalize
