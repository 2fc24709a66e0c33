#include "toklab/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "toklab/normalize.hpp"
#include "toklab/utf8.hpp"

namespace toklab::inclusion {
namespace {

struct Line {
  double slope = 0;
  double intercept = 0;
  double rms = 0;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw DegenerateSeries("all x values are equal");
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    ss += r * r;
  }
  line.rms = std::sqrt(ss / n);
  return line;
}

std::vector<std::pair<std::size_t, std::string>> ranked(
    const InclusionTable& table, const std::vector<std::string>& tokens) {
  std::vector<std::pair<std::size_t, std::string>> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.emplace_back(table.count(t), t);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  return out;
}

CategoryAverage average_of(const std::string& name,
                           const std::vector<std::pair<std::size_t, std::string>>& items) {
  CategoryAverage avg;
  avg.category = name;
  avg.tokens = items.size();
  double files = 0;
  double length = 0;
  for (const auto& [count, token] : items) {
    files += static_cast<double>(count);
    length += static_cast<double>(utf8::length(token));
  }
  avg.mean_files = files / static_cast<double>(items.size());
  avg.mean_length = length / static_cast<double>(items.size());
  return avg;
}

}  // namespace

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kRaw: return "raw";
    case Mode::kClean: return "clean";
    case Mode::kCleanLower: return "clean_lower";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::kRaw, Mode::kClean, Mode::kCleanLower}) {
    if (mode_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown inclusion mode '" + std::string(name) + "'");
}

std::string token_form(const std::string& raw, Mode mode) {
  std::string form = normalize::strip_markers(raw);
  if (mode == Mode::kRaw) return form;
  form = normalize::clean_aggressive(form);
  if (mode == Mode::kCleanLower) form = normalize::ascii_lower(form);
  return form;
}

InclusionTable InclusionTable::build(const std::vector<vocab::VocabularyFile>& files,
                                     Mode mode) {
  if (files.empty()) throw std::invalid_argument("no vocabulary files");
  InclusionTable table;
  table.mode_ = mode;
  for (std::uint32_t i = 0; i < files.size(); ++i) {
    table.file_names_.push_back(files[i].name);
    std::set<std::string> forms;
    for (const auto& t : files[i].tokens) {
      std::string form = token_form(t, mode);
      if (!form.empty()) forms.insert(std::move(form));
    }
    for (const auto& f : forms) table.files_of_[f].push_back(i);
  }
  return table;
}

std::size_t InclusionTable::count(const std::string& token) const {
  const auto it = files_of_.find(token);
  return it == files_of_.end() ? 0 : it->second.size();
}

std::map<std::size_t, std::size_t> InclusionTable::tokens_by_count() const {
  std::map<std::size_t, std::size_t> out;
  for (std::size_t c = 1; c <= file_count(); ++c) out[c] = 0;
  for (const auto& [token, files] : files_of_) ++out[files.size()];
  return out;
}

double InclusionTable::mean_count() const {
  if (files_of_.empty()) return 0;
  double total = 0;
  for (const auto& [token, files] : files_of_) total += static_cast<double>(files.size());
  return total / static_cast<double>(files_of_.size());
}

Series portion_by_count(const InclusionTable& table) {
  Series out;
  const double total = static_cast<double>(table.size());
  for (const auto& [count, n] : table.tokens_by_count()) {
    out.emplace_back(static_cast<double>(count),
                     total == 0 ? 0.0 : static_cast<double>(n) / total);
  }
  return out;
}

Series portion_in_reference(const InclusionTable& table,
                            const std::set<std::string>& reference) {
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> tally;
  for (std::size_t c = 1; c <= table.file_count(); ++c) tally[c] = {0, 0};
  for (const auto& [token, files] : table.membership()) {
    auto& [hits, all] = tally[files.size()];
    ++all;
    if (reference.count(token)) ++hits;
  }
  Series out;
  for (const auto& [count, t] : tally) {
    out.emplace_back(static_cast<double>(count),
                     t.second == 0 ? 0.0
                                   : static_cast<double>(t.first) /
                                         static_cast<double>(t.second));
  }
  return out;
}

DecayFit fit_decay(const Series& series) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [count, portion] : series) {
    if (count >= 1 && portion > 0 && std::isfinite(portion)) {
      x.push_back(count);
      y.push_back(std::log(portion));
    }
  }
  if (x.size() < 3) {
    throw DegenerateSeries("decay fit needs at least 3 positive points, got " +
                           std::to_string(x.size()));
  }
  const Line line = ols(x, y);
  return {line.slope, line.intercept, line.rms, x.size()};
}

std::vector<InclusionLength> length_by_inclusion(const InclusionTable& table) {
  std::vector<InclusionLength> rows(table.file_count());
  std::vector<std::size_t> longest_len(table.file_count(), 0);
  std::vector<double> total(table.file_count(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].count = i + 1;
  for (const auto& [token, files] : table.membership()) {
    const std::size_t idx = files.size() - 1;
    const std::size_t len = utf8::length(token);
    InclusionLength& row = rows[idx];
    ++row.tokens;
    total[idx] += static_cast<double>(len);
    // Map iteration is ordered, so the first token of a length wins ties.
    if (len > longest_len[idx]) {
      longest_len[idx] = len;
      row.longest = token;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].tokens > 0) {
      rows[i].mean_length = total[i] / static_cast<double>(rows[i].tokens);
    }
  }
  return rows;
}

std::vector<CategoryAverage> category_file_averages(
    const InclusionTable& table,
    const std::vector<categorize::CategoryReport>& reports) {
  std::vector<CategoryAverage> out;
  for (const auto& r : reports) {
    if (r.matched.empty()) continue;
    out.push_back(average_of(r.category, ranked(table, r.matched)));
  }
  return out;
}

std::vector<CategoryAverage> truncated_category_averages(
    const InclusionTable& table,
    const std::vector<categorize::CategoryReport>& reports, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  std::vector<CategoryAverage> out;
  for (const auto& r : reports) {
    if (r.matched.empty()) continue;
    auto items = ranked(table, r.matched);
    if (items.size() > k) items.resize(k);
    out.push_back(average_of(r.category, items));
  }
  return out;
}

std::map<std::string, std::size_t> frequencies(const std::vector<std::string>& tokens) {
  std::map<std::string, std::size_t> out;
  for (const auto& t : tokens) ++out[t];
  return out;
}

ZipfFit zipf_check(std::vector<double> frequencies) {
  std::erase_if(frequencies, [](double f) { return !(f > 0); });
  if (frequencies.size() < 10) {
    throw DegenerateSeries("zipf check needs at least 10 distinct tokens, got " +
                           std::to_string(frequencies.size()));
  }
  std::sort(frequencies.begin(), frequencies.end(), std::greater<>());
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    x.push_back(std::log(static_cast<double>(i + 1)));
    y.push_back(std::log(frequencies[i]));
  }
  const Line line = ols(x, y);
  return {line.slope, line.intercept, frequencies.size()};
}

ZipfFit zipf_check(const std::map<std::string, std::size_t>& freq) {
  std::vector<double> values;
  values.reserve(freq.size());
  for (const auto& [token, n] : freq) values.push_back(static_cast<double>(n));
  return zipf_check(std::move(values));
}

}  // namespace toklab::inclusion
