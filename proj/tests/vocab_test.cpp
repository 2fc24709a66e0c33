#include "toklab/vocab.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

using namespace toklab;
using namespace toklab::vocab;

TEST(LinePerToken, Basic) {
  const auto f = parse_vocab("f", "a\nb\n", Format::kLinePerToken);
  EXPECT_EQ(f.tokens, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(f.problem_count(), 0u);
  EXPECT_EQ(f.line_count, 2u);
}

TEST(LinePerToken, ProblemsAreCountedAndKeptRaw) {
  const std::string content = "a\n\xFF\xFE\n\nb \n\xFF\xFE\nc";
  const auto f = parse_vocab("f", content, Format::kLinePerToken);
  EXPECT_EQ(f.tokens, (std::vector<std::string>{"a", "b ", "c"}));
  ASSERT_EQ(f.problem_count(), 3u);
  EXPECT_EQ(f.problems[0].line, 2u);
  EXPECT_EQ(f.problems[0].raw, "\xFF\xFE");
  EXPECT_EQ(f.problems[1].reason, "empty line");
  EXPECT_EQ(f.unique_problem_lines().size(), 2u);
  EXPECT_EQ(f.tokens.size() + f.problem_count(), f.line_count);
}

TEST(LinePerToken, ReplacePolicyKeepsLines) {
  const auto f = parse_vocab("f", "a\xFFz\n", Format::kLinePerToken,
                             Utf8Policy::kReplace);
  EXPECT_EQ(f.tokens, (std::vector<std::string>{"a\xEF\xBF\xBDz"}));
  EXPECT_EQ(f.problem_count(), 0u);
}

TEST(Base64Rank, DecodesRecords) {
  const auto f = parse_vocab("t", "YWJj 7\nIGJhbms= 8\n", Format::kBase64Rank);
  EXPECT_EQ(f.tokens, (std::vector<std::string>{"abc", " bank"}));
  EXPECT_EQ(f.ranks, (std::vector<std::int64_t>{7, 8}));
}

TEST(Base64Rank, MalformedRecordsAreProblems) {
  const auto f = parse_vocab(
      "t", "YWJj\nYW!j 1\nYWJj x\n/w== 3\nYQ== 4\nY=Jj 5\n", Format::kBase64Rank);
  EXPECT_EQ(f.tokens, (std::vector<std::string>{"a"}));
  ASSERT_EQ(f.problem_count(), 5u);
  EXPECT_EQ(f.problems[0].reason, "malformed record");
  EXPECT_EQ(f.problems[1].reason, "malformed base64");
  EXPECT_EQ(f.problems[2].reason, "malformed rank");
  EXPECT_EQ(f.problems[3].reason, "invalid UTF-8");  // 0xFF
  EXPECT_EQ(f.problems[4].reason, "malformed base64");
}

TEST(Base64, Decoder) {
  EXPECT_EQ(base64_decode("YWJj"), "abc");
  EXPECT_EQ(base64_decode("YWI="), "ab");
  EXPECT_EQ(base64_decode("YQ=="), "a");
  EXPECT_EQ(base64_decode("AAA="), std::string("\0\0", 2));
  EXPECT_FALSE(base64_decode("").has_value());
  EXPECT_FALSE(base64_decode("YWJ").has_value());
  EXPECT_FALSE(base64_decode("Y===").has_value());
}

TEST(TokenMap, SortedById) {
  const auto f = parse_vocab("m", R"({"b": 2, "a": 0, "[UNK]": 1, "bad": "x"})",
                             Format::kTokenToIdMap);
  EXPECT_EQ(f.tokens, (std::vector<std::string>{"a", "[UNK]", "b"}));
  EXPECT_EQ(f.ranks, (std::vector<std::int64_t>{0, 1, 2}));
  ASSERT_EQ(f.problem_count(), 1u);
  EXPECT_EQ(f.problems[0].raw, "bad");
  EXPECT_THROW(parse_vocab("m", "[1,2]", Format::kTokenToIdMap), MalformedVocab);
  EXPECT_THROW(parse_vocab("m", "{", Format::kTokenToIdMap), MalformedVocab);
}

TEST(Formats, NamesAndGuessing) {
  EXPECT_EQ(parse_format("base64_rank"), Format::kBase64Rank);
  EXPECT_THROW(parse_format("yaml"), UnknownFormat);
  EXPECT_EQ(guess_format("x/vocab.json"), Format::kTokenToIdMap);
  EXPECT_EQ(guess_format("o200k_base.tiktoken"), Format::kBase64Rank);
  EXPECT_EQ(guess_format("vocab.txt"), Format::kLinePerToken);
  EXPECT_THROW(load_vocab_file("/nonexistent/v.txt", Format::kLinePerToken), IoFailure);
}

TEST(Duplicates, Partition) {
  const auto f = parse_vocab("f", "a\nb\n", Format::kLinePerToken);
  auto copy = f;
  copy.name = "copy-of-f";
  auto other = parse_vocab("g", "a\nc\n", Format::kLinePerToken);
  const auto groups = detect_duplicates({f, other, copy});
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].members, (std::vector<std::string>{"copy-of-f", "f"}));
  EXPECT_EQ(groups[0].representative, "copy-of-f");
  EXPECT_EQ(groups[1].members, (std::vector<std::string>{"g"}));
  std::size_t total = 0;
  for (const auto& g : groups) total += g.members.size();
  EXPECT_EQ(total, 3u);
}

TEST(Duplicates, LengthPrefixAvoidsConcatenationCollisions) {
  EXPECT_NE(token_list_digest({"ab", "c"}), token_list_digest({"a", "bc"}));
  EXPECT_EQ(token_list_digest({"ab", "c"}), token_list_digest({"ab", "c"}));
}

TEST(Manifest, ReportsTotals) {
  const auto f = parse_vocab("f", "a\n\xFF\n", Format::kLinePerToken);
  auto g = f;
  g.name = "g";
  std::ostringstream out;
  write_manifest(out, {f, g}, detect_duplicates({f, g}));
  const auto doc = nlohmann::json::parse(out.str());
  EXPECT_EQ(doc["totals"]["problem_lines"], 2);
  EXPECT_EQ(doc["totals"]["unique_problem_lines"], 1);
  EXPECT_EQ(doc["totals"]["distinct_maps"], 1);
  EXPECT_EQ(doc["files"][0]["tokens"], 1);
}
