#include "toklab/vocab.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <map>

#include <json.hpp>

#include "toklab/digest.hpp"
#include "toklab/utf8.hpp"

namespace toklab::vocab {
namespace {

// Returns the decoded token, or the reason it is a problem.
bool accept_text(std::string_view bytes, Utf8Policy policy, std::string& out) {
  if (utf8::is_valid(bytes)) {
    out.assign(bytes);
    return true;
  }
  if (policy == Utf8Policy::kReplace) {
    out = utf8::decode_lossy(bytes);
    return true;
  }
  return false;
}

void parse_lines(VocabularyFile& file, std::string_view content,
                 Utf8Policy policy) {
  std::size_t start = 0;
  std::size_t number = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++number;

    if (file.source_format == Format::kLinePerToken) {
      std::string token;
      if (line.empty()) {
        file.problems.push_back({number, std::string(line), "empty line"});
      } else if (!accept_text(line, policy, token)) {
        file.problems.push_back({number, std::string(line), "invalid UTF-8"});
      } else {
        file.tokens.push_back(std::move(token));
      }
      continue;
    }

    // base64_rank: "<base64> <rank>"
    std::string_view record = line;
    if (!record.empty() && record.back() == '\r') record.remove_suffix(1);
    const auto space = record.find(' ');
    std::int64_t rank = 0;
    std::optional<std::string> bytes;
    if (space == std::string_view::npos || space == 0) {
      file.problems.push_back({number, std::string(line), "malformed record"});
      continue;
    }
    const std::string_view rank_text = record.substr(space + 1);
    const auto [ptr, ec] = std::from_chars(
        rank_text.data(), rank_text.data() + rank_text.size(), rank);
    if (rank_text.empty() || ec != std::errc() ||
        ptr != rank_text.data() + rank_text.size()) {
      file.problems.push_back({number, std::string(line), "malformed rank"});
      continue;
    }
    bytes = base64_decode(record.substr(0, space));
    if (!bytes) {
      file.problems.push_back({number, std::string(line), "malformed base64"});
      continue;
    }
    std::string token;
    if (!accept_text(*bytes, policy, token)) {
      file.problems.push_back({number, std::string(line), "invalid UTF-8"});
      continue;
    }
    file.tokens.push_back(std::move(token));
    file.ranks.push_back(rank);
  }
  file.line_count = number;
}

void parse_map(VocabularyFile& file, std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedVocab(file.name + ": " + e.what());
  }
  if (!doc.is_object()) throw MalformedVocab(file.name + ": not a JSON object");
  std::vector<std::pair<std::int64_t, std::string>> entries;
  std::size_t index = 0;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    ++index;
    if (!it.value().is_number_integer()) {
      file.problems.push_back({index, it.key(), "id is not an integer"});
      continue;
    }
    if (it.key().empty()) {
      file.problems.push_back({index, it.key(), "empty token"});
      continue;
    }
    entries.emplace_back(it.value().get<std::int64_t>(), it.key());
  }
  std::sort(entries.begin(), entries.end());
  for (auto& [id, token] : entries) {
    file.ranks.push_back(id);
    file.tokens.push_back(std::move(token));
  }
  file.line_count = index;
}

}  // namespace

std::string_view format_name(Format format) {
  switch (format) {
    case Format::kLinePerToken: return "line_per_token";
    case Format::kTokenToIdMap: return "token_to_id_map";
    case Format::kBase64Rank: return "base64_rank";
  }
  return "?";
}

Format parse_format(std::string_view name) {
  for (Format f : {Format::kLinePerToken, Format::kTokenToIdMap,
                   Format::kBase64Rank}) {
    if (format_name(f) == name) return f;
  }
  throw UnknownFormat(std::string(name));
}

Format guess_format(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json") return Format::kTokenToIdMap;
  if (ext == ".tiktoken") return Format::kBase64Rank;
  return Format::kLinePerToken;
}

std::set<std::string> VocabularyFile::unique_problem_lines() const {
  std::set<std::string> out;
  for (const auto& p : problems) out.insert(p.raw);
  return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
  if (text.empty() || text.size() % 4 != 0) return std::nullopt;
  std::size_t padding = 0;
  if (text.back() == '=') ++padding;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++padding;
  // Padding is only legal at the very end.
  if (text.substr(0, text.size() - padding).find('=') != std::string_view::npos) {
    return std::nullopt;
  }
  std::string out(text.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0 || static_cast<std::size_t>(n) != out.size()) return std::nullopt;
  out.resize(out.size() - padding);
  return out;
}

VocabularyFile parse_vocab(std::string name, std::string_view content,
                           Format format, Utf8Policy policy) {
  VocabularyFile file;
  file.name = std::move(name);
  file.source_format = format;
  if (format == Format::kTokenToIdMap) {
    parse_map(file, content);
  } else {
    parse_lines(file, content, policy);
  }
  return file;
}

VocabularyFile load_vocab_file(const std::filesystem::path& path, Format format,
                               Utf8Policy policy) {
  return parse_vocab(path.filename().string(), read_file(path), format, policy);
}

std::string token_list_digest(const std::vector<std::string>& tokens) {
  std::string buffer;
  for (const auto& t : tokens) {
    buffer += std::to_string(t.size());
    buffer.push_back(':');
    buffer += t;
  }
  return sha256_hex(buffer);
}

std::vector<DuplicateGroup> detect_duplicates(
    const std::vector<VocabularyFile>& files) {
  std::map<std::string, std::vector<std::size_t>> by_digest;
  for (std::size_t i = 0; i < files.size(); ++i) {
    by_digest[token_list_digest(files[i].tokens)].push_back(i);
  }
  std::vector<DuplicateGroup> groups;
  for (auto& [digest, indices] : by_digest) {
    // Split a bucket further on exact equality in case of a collision.
    std::vector<std::vector<std::size_t>> exact;
    for (std::size_t i : indices) {
      auto it = std::find_if(exact.begin(), exact.end(), [&](const auto& g) {
        return files[g.front()].tokens == files[i].tokens;
      });
      if (it == exact.end()) {
        exact.push_back({i});
      } else {
        it->push_back(i);
      }
    }
    for (const auto& g : exact) {
      DuplicateGroup group;
      for (std::size_t i : g) group.members.push_back(files[i].name);
      std::sort(group.members.begin(), group.members.end());
      group.representative = group.members.front();
      groups.push_back(std::move(group));
    }
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.representative < b.representative;
  });
  return groups;
}

void write_manifest(std::ostream& out, const std::vector<VocabularyFile>& files,
                    const std::vector<DuplicateGroup>& groups) {
  nlohmann::ordered_json doc;
  std::size_t total_tokens = 0;
  std::size_t total_problems = 0;
  std::set<std::string> unique_problems;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    const auto problems = f.unique_problem_lines();
    total_tokens += f.tokens.size();
    total_problems += f.problem_count();
    unique_problems.insert(problems.begin(), problems.end());
    list.push_back({{"name", f.name},
                    {"format", format_name(f.source_format)},
                    {"lines", f.line_count},
                    {"tokens", f.tokens.size()},
                    {"problem_lines", f.problem_count()},
                    {"unique_problem_lines", problems.size()},
                    {"token_digest", token_list_digest(f.tokens)}});
  }
  doc["files"] = std::move(list);
  nlohmann::ordered_json g = nlohmann::ordered_json::array();
  for (const auto& group : groups) {
    g.push_back({{"representative", group.representative},
                 {"members", group.members}});
  }
  doc["duplicate_groups"] = std::move(g);
  doc["totals"] = {{"files", files.size()},
                   {"distinct_maps", groups.size()},
                   {"tokens", total_tokens},
                   {"problem_lines", total_problems},
                   {"unique_problem_lines", unique_problems.size()}};
  out << doc.dump(2, ' ', false, nlohmann::json::error_handler_t::replace)
      << '\n';
}

}  // namespace toklab::vocab
