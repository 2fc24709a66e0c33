#include "toklab/normalize.hpp"

#include <algorithm>
#include <iterator>

#include "toklab/utf8.hpp"

namespace toklab::normalize {

std::string strip_markers(std::string_view token, const MarkerConfig& config) {
  std::string current(token);
  while (true) {
    std::string next = config.strip_whitespace ? utf8::strip(current) : current;
    std::string_view view = next;
    for (bool again = true; again;) {
      again = false;
      for (const auto& marker : config.leading) {
        while (!marker.empty() && view.starts_with(marker)) {
          view.remove_prefix(marker.size());
          again = true;
        }
      }
    }
    for (const auto& prefix : config.prefixes) {
      if (!prefix.empty() && view.starts_with(prefix)) {
        view.remove_prefix(prefix.size());
      }
    }
    next = std::string(view);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::string clean_aggressive(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == ' ') {
      out.push_back(c);
    }
  }
  return out;
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

TokenRecord make_record(std::string_view raw, const MarkerConfig& config) {
  TokenRecord r;
  r.raw = std::string(raw);
  r.stripped = strip_markers(raw, config);
  r.clean = clean_aggressive(r.stripped);
  r.clean_lower = ascii_lower(r.clean);
  return r;
}

std::vector<TokenRecord> make_records(const std::vector<std::string>& raw,
                                      const MarkerConfig& config) {
  std::vector<TokenRecord> out;
  out.reserve(raw.size());
  for (const auto& t : raw) out.push_back(make_record(t, config));
  return out;
}

std::vector<std::string> dedup(const std::vector<std::string>& tokens,
                               bool case_sensitive) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t.empty()) continue;
    out.push_back(case_sensitive ? t : ascii_lower(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CleanCounts count_clean(const std::vector<std::vector<std::string>>& files,
                        const MarkerConfig& config) {
  CleanCounts counts;
  std::vector<std::string> all;
  for (const auto& raw : files) {
    counts.raw += raw.size();
    std::vector<std::string> clean;
    clean.reserve(raw.size());
    for (const auto& t : raw) {
      clean.push_back(clean_aggressive(strip_markers(t, config)));
    }
    auto distinct = dedup(clean, true);
    counts.cleaned += distinct.size();
    all.insert(all.end(), std::make_move_iterator(distinct.begin()),
               std::make_move_iterator(distinct.end()));
  }
  const auto cased = dedup(all, true);
  counts.unique_cased = cased.size();
  counts.unique_lower = dedup(cased, false).size();
  return counts;
}

CleanCounts count_clean(const std::vector<std::string>& raw,
                        const MarkerConfig& config) {
  return count_clean(std::vector<std::vector<std::string>>{raw}, config);
}

std::string escape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void write_tsv(std::ostream& out, const std::vector<TokenRecord>& records) {
  out << "raw\tstripped\tclean\tclean_lower\n";
  for (const auto& r : records) {
    out << escape_field(r.raw) << '\t' << escape_field(r.stripped) << '\t'
        << escape_field(r.clean) << '\t' << escape_field(r.clean_lower)
        << '\n';
  }
}

}  // namespace toklab::normalize
