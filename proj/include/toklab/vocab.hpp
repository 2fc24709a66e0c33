#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "toklab/error.hpp"

namespace toklab::vocab {

enum class Format { kLinePerToken, kTokenToIdMap, kBase64Rank };

class UnknownFormat : public Error {
 public:
  explicit UnknownFormat(const std::string& name)
      : Error("unknown vocabulary format '" + name + "'") {}
};

// The whole file is unreadable in its format (e.g. a map that is not JSON).
class MalformedVocab : public Error {
 public:
  using Error::Error;
};

std::string_view format_name(Format format);
Format parse_format(std::string_view name);
// .json -> token_to_id_map, .tiktoken -> base64_rank, otherwise line_per_token.
Format guess_format(const std::filesystem::path& path);

enum class Utf8Policy {
  kStrict,   // invalid UTF-8 makes a problem line
  kReplace,  // invalid sequences become U+FFFD
};

struct ProblemLine {
  std::size_t line = 0;  // 1-based; entry index for maps
  std::string raw;
  std::string reason;
};

struct VocabularyFile {
  std::string name;
  Format source_format = Format::kLinePerToken;
  std::vector<std::string> tokens;
  std::vector<std::int64_t> ranks;  // parallel to tokens; empty for line_per_token
  std::vector<ProblemLine> problems;
  std::size_t line_count = 0;

  std::size_t problem_count() const { return problems.size(); }
  std::set<std::string> unique_problem_lines() const;
};

VocabularyFile parse_vocab(std::string name, std::string_view content,
                           Format format, Utf8Policy policy = Utf8Policy::kStrict);
VocabularyFile load_vocab_file(const std::filesystem::path& path, Format format,
                               Utf8Policy policy = Utf8Policy::kStrict);

std::optional<std::string> base64_decode(std::string_view text);

struct DuplicateGroup {
  std::vector<std::string> members;  // sorted
  std::string representative;        // smallest member name
};

// Partition by identical raw token lists; groups ordered by representative.
std::vector<DuplicateGroup> detect_duplicates(
    const std::vector<VocabularyFile>& files);

// Digest over the length-prefixed token list.
std::string token_list_digest(const std::vector<std::string>& tokens);

void write_manifest(std::ostream& out, const std::vector<VocabularyFile>& files,
                    const std::vector<DuplicateGroup>& groups);

}  // namespace toklab::vocab
