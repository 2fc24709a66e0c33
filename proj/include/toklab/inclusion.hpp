#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "toklab/categorize.hpp"
#include "toklab/vocab.hpp"

namespace toklab::inclusion {

enum class Mode {
  kRaw,         // marker-stripped, otherwise untouched
  kClean,       // strip -> clean, case kept
  kCleanLower,  // strip -> clean -> lowercase
};

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

std::string token_form(const std::string& raw, Mode mode);

// Token -> the files (by index) whose vocabulary contains its form.
class InclusionTable {
 public:
  static InclusionTable build(const std::vector<vocab::VocabularyFile>& files,
                              Mode mode);

  Mode mode() const { return mode_; }
  std::size_t file_count() const { return file_names_.size(); }
  const std::vector<std::string>& file_names() const { return file_names_; }
  std::size_t size() const { return files_of_.size(); }

  // 0 when the token is in no file.
  std::size_t count(const std::string& token) const;
  const std::map<std::string, std::vector<std::uint32_t>>& membership() const {
    return files_of_;
  }

  // count -> number of tokens with that count, for counts 1..file_count.
  std::map<std::size_t, std::size_t> tokens_by_count() const;
  double mean_count() const;

 private:
  Mode mode_ = Mode::kClean;
  std::vector<std::string> file_names_;
  std::map<std::string, std::vector<std::uint32_t>> files_of_;
};

using Series = std::vector<std::pair<double, double>>;  // (x, y)

// (count, share of table tokens at that count) for counts 1..F.
Series portion_by_count(const InclusionTable& table);
// (count, share of the tokens at that count that are in `reference`).
Series portion_in_reference(const InclusionTable& table,
                            const std::set<std::string>& reference);

struct DecayFit {
  double rate = 0;       // slope of log(portion) against count
  double intercept = 0;
  double residual = 0;   // root mean square, log space
  std::size_t points = 0;
};

// Ordinary least squares on points with count >= 1 and portion > 0;
// needs at least three.
DecayFit fit_decay(const Series& portion_by_count);

struct InclusionLength {
  std::size_t count = 0;
  std::size_t tokens = 0;
  double mean_length = 0;  // code points; 0 when no tokens
  std::string longest;     // ties broken lexicographically
};

std::vector<InclusionLength> length_by_inclusion(const InclusionTable& table);

struct CategoryAverage {
  std::string category;
  std::size_t tokens = 0;
  double mean_files = 0;
  double mean_length = 0;
};

// Type-weighted means over each category's matched tokens; empty
// categories are absent.
std::vector<CategoryAverage> category_file_averages(
    const InclusionTable& table,
    const std::vector<categorize::CategoryReport>& reports);

// Same, over the k matched tokens with the highest counts (ties by token).
std::vector<CategoryAverage> truncated_category_averages(
    const InclusionTable& table,
    const std::vector<categorize::CategoryReport>& reports, std::size_t k);

struct ZipfFit {
  double slope = 0;
  double intercept = 0;
  std::size_t types = 0;
};

std::map<std::string, std::size_t> frequencies(const std::vector<std::string>& tokens);

// Least-squares slope of log frequency against log rank (rank 1 = most
// frequent, ties by token). Needs at least ten distinct tokens.
ZipfFit zipf_check(const std::map<std::string, std::size_t>& frequencies);
// The same on bare frequency values; the rank order is derived by sorting.
ZipfFit zipf_check(std::vector<double> frequencies);

}  // namespace toklab::inclusion
