#include "toklab/categorize.hpp"

#include <gtest/gtest.h>

#include <random>

#include "toklab/normalize.hpp"

using namespace toklab;
using namespace toklab::categorize;

namespace {

vocab::VocabularyFile file(std::string name, const std::string& lines) {
  return vocab::parse_vocab(std::move(name), lines, vocab::Format::kLinePerToken);
}

std::set<std::string> random_set(std::mt19937& rng, std::size_t n) {
  static const std::string alphabet = "abcAB";
  std::uniform_int_distribution<std::size_t> len(1, 4);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::set<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    for (std::size_t k = len(rng); k > 0; --k) s += alphabet[pick(rng)];
    out.insert(s);
  }
  return out;
}

}  // namespace

TEST(MatchCategory, EmptyTokens) {
  const auto r = match_category("m", {}, {"un", "re"});
  EXPECT_TRUE(r.matched.empty());
  EXPECT_EQ(r.coverage_of_list, 0.0);
  EXPECT_EQ(r.coverage_of_vocab, 0.0);
}

TEST(MatchCategory, AgreesWithDoubleLoop) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tokens = random_set(rng, 30);
    const auto list = random_set(rng, 30);
    std::vector<std::string> expected;
    for (const auto& t : tokens) {
      for (const auto& l : list) {
        if (t == l) expected.push_back(t);
      }
    }
    const auto r = match_category("c", tokens, list);
    EXPECT_EQ(r.matched, expected);
    EXPECT_GE(r.coverage_of_list, 0.0);
    EXPECT_LE(r.coverage_of_list, 1.0);
    EXPECT_LE(r.coverage_of_vocab, 1.0);
    EXPECT_NEAR(r.coverage_of_list * static_cast<double>(list.size()),
                static_cast<double>(r.matched.size()), 1e-9);
    EXPECT_NEAR(r.coverage_of_vocab * static_cast<double>(tokens.size()),
                static_cast<double>(r.matched.size()), 1e-9);
  }
}

TEST(CleanSets, StripCleanAndLower) {
  const auto f = file("v", "\xE2\x96\x81The\n##the\nBank!\n123\n");
  EXPECT_EQ(clean_cased_set(f), (std::set<std::string>{"Bank", "The", "the"}));
  EXPECT_EQ(clean_lower_set(f), (std::set<std::string>{"bank", "the"}));
}

TEST(ProperNouns, InitialCapital) {
  EXPECT_EQ(proper_noun_candidates({"The", "the", "Bank"}),
            (std::set<std::string>{"Bank", "The"}));
  EXPECT_EQ(proper_noun_candidates({"McDonald", "Paris", "IBM"}, ProperNounRule::kStrict),
            (std::set<std::string>{"Paris"}));
}

TEST(ProperNouns, PartitionsInput) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto input = random_set(rng, 40);
    for (auto rule : {ProperNounRule::kInitialCapital, ProperNounRule::kStrict}) {
      const auto cand = proper_noun_candidates(input, rule);
      std::size_t rest = 0;
      for (const auto& t : input) rest += cand.count(t) == 0;
      EXPECT_EQ(cand.size() + rest, input.size());
      for (const auto& t : cand) EXPECT_TRUE(input.count(t));
    }
  }
}

TEST(AllCaps, Examples) {
  EXPECT_EQ(all_caps_tokens({"IGGER", "Ab", "A"}), (std::set<std::string>{"IGGER"}));
  EXPECT_TRUE(all_caps_tokens({"abc", "lower"}).empty());
}

TEST(CaseVariants, Groups) {
  const auto groups = case_variant_groups({"The", "the", "THE", "bank"});
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0], (std::vector<std::string>{"THE", "The", "the"}));
  EXPECT_EQ(tokens_in_groups(groups), 3u);
  EXPECT_EQ(redundant_case_variants(groups), 2u);
  EXPECT_TRUE(case_variant_groups({"a", "b", "c"}).empty());
}

TEST(CaseVariants, RedundantEqualsLoweringLoss) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cased = random_set(rng, 50);
    std::set<std::string> lower;
    for (const auto& t : cased) lower.insert(normalize::ascii_lower(t));
    EXPECT_EQ(redundant_case_variants(case_variant_groups(cased)), cased.size() - lower.size());
  }
}

TEST(BadWords, PerFileCounts) {
  const std::vector<vocab::VocabularyFile> files = {file("a", "damn\nhello\nDamn\n"),
                                                    file("b", "0\n1\n2\n")};
  const auto r = bad_word_scan(files, {"damn", "heck"});
  EXPECT_EQ(r.matched, (std::vector<std::string>{"damn"}));
  EXPECT_EQ(r.per_file_counts.at("a"), 1u);
  EXPECT_EQ(r.per_file_counts.at("b"), 0u);
  EXPECT_DOUBLE_EQ(r.coverage_of_list, 0.5);
}

TEST(Suspects, Containment) {
  const auto hits = substring_suspect_scan({"igger", "xyz", "IGGER", "ig"}, {"trigger"});
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits.at("igger").containing, (std::vector<std::string>{"trigger"}));
  EXPECT_FALSE(hits.at("igger").all_caps);
  EXPECT_TRUE(hits.at("IGGER").all_caps);
  EXPECT_TRUE(substring_suspect_scan({"igger"}, {}).empty());
  EXPECT_THROW(substring_suspect_scan({"a"}, {"abc"}, 2), std::invalid_argument);
}

TEST(Suspects, AgreesWithBruteForce) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto watch_set = random_set(rng, 6);
    std::set<std::string> watch;
    for (const auto& w : watch_set) watch.insert(w + w);  // longer watch words
    const auto tokens_set = random_set(rng, 60);
    const std::vector<std::string> tokens(tokens_set.begin(), tokens_set.end());
    const auto hits = substring_suspect_scan(tokens, watch, 3);
    for (const auto& t : tokens) {
      std::string lower = t;
      for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      std::vector<std::string> expected;
      for (const auto& w : watch) {
        std::string wl = w;
        for (auto& c : wl) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (t.size() >= 3 && wl.find(lower) != std::string::npos) expected.push_back(w);
      }
      if (expected.empty()) {
        EXPECT_EQ(hits.count(t), 0u) << t;
      } else {
        ASSERT_EQ(hits.count(t), 1u) << t;
        EXPECT_EQ(hits.at(t).containing, expected);
      }
    }
  }
}

TEST(Lengths, HistogramAndRuns) {
  const auto stats = vocab_length_stats({"a", "ab"});
  EXPECT_EQ(stats.histogram, (std::map<std::size_t, std::size_t>{{1, 1}, {2, 1}}));
  EXPECT_TRUE(has_repeated_run(std::string(40, '-')));
  EXPECT_TRUE(has_repeated_run("  ====="));
  EXPECT_FALSE(has_repeated_run("abcdefghijklmnopqrstuvwxyz"));
  EXPECT_FALSE(has_repeated_run("aaa"));  // too short to be flagged
}

TEST(Lengths, LongestSkipsFormattingRuns) {
  const std::vector<std::string> tokens = {std::string(40, '-'), "abcdefghijklmnopqrstuvwxyz",
                                           "short", "\xC3\xA9\xC3\xA9"};
  const auto stats = vocab_length_stats(tokens, 2);
  ASSERT_EQ(stats.longest.size(), 2u);
  EXPECT_EQ(stats.longest[0].length, 40u);
  EXPECT_TRUE(stats.longest[0].repeated_run);
  EXPECT_EQ(stats.longest_nonrepeating[0].token, "abcdefghijklmnopqrstuvwxyz");
  EXPECT_EQ(stats.longest_nonrepeating[1].token, "short");
  EXPECT_EQ(stats.histogram.at(2), 1u);  // code points, not bytes
}

TEST(Pos, InheritsEveryTag) {
  const std::map<std::string, std::set<lexicon::PosTag>> pos = {
      {"run", {lexicon::PosTag::kNoun, lexicon::PosTag::kVerb}},
      {"blue", {lexicon::PosTag::kAdjective}}};
  const auto reports = pos_reports({"run", "blue", "zzz"}, pos);
  ASSERT_EQ(reports.size(), std::size(lexicon::kAllPosTags));
  std::map<std::string, std::vector<std::string>> by_name;
  for (const auto& r : reports) by_name[r.category] = r.matched;
  EXPECT_EQ(by_name.at(std::string(lexicon::pos_name(lexicon::PosTag::kNoun))),
            (std::vector<std::string>{"run"}));
  EXPECT_EQ(by_name.at(std::string(lexicon::pos_name(lexicon::PosTag::kVerb))),
            (std::vector<std::string>{"run"}));
  EXPECT_EQ(by_name.at(std::string(lexicon::pos_name(lexicon::PosTag::kAdjective))),
            (std::vector<std::string>{"blue"}));
}
