#include "toklab/lexicon.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace toklab;
using namespace toklab::lexicon;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("toklab_lex_" + std::to_string(::testing::UnitTest::GetInstance()
                                                 ->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name, std::ios::binary) << text;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

const char* kCsw =
    "CAT\tn,v\ts,ty\n"
    "CATS\tn\n"
    "CATTY\tadj\n"
    "RUN\tverb,noun\ts,ning\n"
    "RUNS\tn,v\n"
    "RUNNING\tn,adj\n"
    "OH\tinterj\n";

}  // namespace

TEST(Csw19, ParsesPosAndAffixes) {
  std::istringstream in(kCsw);
  const auto entries = parse_csw19(in);
  ASSERT_EQ(entries.size(), 7u);
  EXPECT_EQ(entries[0].word, "cat");
  EXPECT_EQ(entries[0].pos, (std::set<PosTag>{PosTag::kNoun, PosTag::kVerb}));
  EXPECT_EQ(entries[0].affixes, (std::vector<std::string>{"s", "ty"}));
  EXPECT_EQ(entries[6].pos, (std::set<PosTag>{PosTag::kInterjection}));
}

TEST(Csw19, RejectsBadRecords) {
  std::istringstream bad_pos("CAT\tsomething\n");
  try {
    parse_csw19(bad_pos);
    FAIL();
  } catch (const MalformedRecord& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  std::istringstream too_many("A\tn\ts\tx\n");
  EXPECT_THROW(parse_csw19(too_many), MalformedRecord);
  std::istringstream bad_utf8("ok\tn\n\xFF\tn\n");
  try {
    parse_csw19(bad_utf8);
    FAIL();
  } catch (const MalformedRecord& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(WordList, LowercasesTrimsAndSkipsBlanks) {
  std::istringstream in("  The\r\n\nAND\nor \n");
  EXPECT_EQ(parse_word_list(in), (std::vector<std::string>{"the", "and", "or"}));
}

TEST(Iconicity, HeaderAndScores) {
  std::istringstream in("word\tscore\nbuzz\t4.5\nthe\t-0.25\n");
  const auto scores = parse_iconicity(in);
  EXPECT_DOUBLE_EQ(scores.at("buzz"), 4.5);
  EXPECT_DOUBLE_EQ(scores.at("the"), -0.25);
  std::istringstream bad("word\tscore\nbuzz\tloud\n");
  EXPECT_THROW(parse_iconicity(bad), MalformedRecord);
}

TEST(Expansion, GeneratedFormsAndBaseWords) {
  std::istringstream in(kCsw);
  const auto entries = parse_csw19(in);
  const AffixExpansion e = expand_affixed_forms(entries);
  EXPECT_EQ(e.annotations, 4u);
  EXPECT_EQ(e.generated,
            (std::set<std::string>{"cats", "catty", "runs", "running"}));
  EXPECT_TRUE(e.all_in_list());
  EXPECT_EQ(e.base_words, (std::set<std::string>{"cat", "run", "oh"}));
  EXPECT_DOUBLE_EQ(e.affix_share("s"), 0.5);
  // |base| + |generated| = |full| when every generated form is listed.
  EXPECT_EQ(e.base_words.size() + e.generated.size(), entries.size());
}

TEST(Expansion, ReportsFormsMissingFromList) {
  std::istringstream in("DOG\tn\ts,gy\nDOGS\tn\n");
  const AffixExpansion e = expand_affixed_forms(parse_csw19(in));
  EXPECT_FALSE(e.all_in_list());
  EXPECT_EQ(e.missing_from_list, (std::vector<std::string>{"doggy"}));
}

TEST(Master, UnionAfterCleaning) {
  std::istringstream in(kCsw);
  const auto csw = parse_csw19(in);
  const auto master_alone = build_morpheme_master(csw, {}, {});
  std::set<std::string> words;
  for (const auto& e : csw) words.insert(e.word);
  EXPECT_EQ(master_alone, words);

  const auto master =
      build_morpheme_master(csw, {"re-elect", "o'clock"}, {"'s", "un", "s"});
  EXPECT_TRUE(master.count("reelect"));
  EXPECT_TRUE(master.count("oclock"));
  EXPECT_TRUE(master.count("s"));
  EXPECT_FALSE(master.count("'s"));
  EXPECT_TRUE(master.count("un"));
}

TEST(Master, LoadOrderDoesNotMatter) {
  std::istringstream in(kCsw);
  const auto csw = parse_csw19(in);
  auto reversed = csw;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(build_morpheme_master(csw, {"a", "b"}, {"x"}),
            build_morpheme_master(reversed, {"b", "a"}, {"x"}));
}

TEST(Lexicon, LoadsDirectoryAndFinalizes) {
  TempDir dir;
  dir.write("csw19.txt", kCsw);
  dir.write("s2.txt", "Alice\nbank\n");
  dir.write("affixes.txt", "un\n's\n");
  dir.write("function_words.txt", "the\nof\n");
  dir.write("bad_words_a.txt", "darn\nheck\n");
  dir.write("bad_words_b.txt", "heck\ndrat\n");
  dir.write("iconicity.tsv", "buzz\t4.1\n");
  const ListPaths paths = ListPaths::from_directory(dir.path());
  ASSERT_EQ(paths.bad_words.size(), 2u);
  const Lexicon lex = load_lexicon(paths);
  EXPECT_EQ(lex.bad_words, (std::set<std::string>{"darn", "drat", "heck"}));
  // Annotation affixes join the affix file entries.
  EXPECT_EQ(lex.affixes,
            (std::set<std::string>{"'s", "ning", "s", "ty", "un"}));
  for (const auto& a : lex.affixes) {
    if (a != "'s") EXPECT_TRUE(lex.master_morphemes.count(a)) << a;
  }
  EXPECT_TRUE(lex.is_word("alice"));
  EXPECT_TRUE(lex.is_word("the"));
  EXPECT_TRUE(lex.is_word("cat"));
  EXPECT_FALSE(lex.is_word("ning"));
  EXPECT_EQ(lex.words_pos.at("run"),
            (std::set<PosTag>{PosTag::kNoun, PosTag::kVerb}));
  EXPECT_DOUBLE_EQ(lex.iconicity.at("buzz"), 4.1);

  const auto checks = canonical_count_checks(lex, paths);
  for (const auto& c : checks) {
    EXPECT_TRUE(c.available) << c.name;
    if (c.name == "generated forms missing from csw19") {
      EXPECT_TRUE(c.pass());
    } else {
      EXPECT_FALSE(c.pass()) << c.name;  // toy lists are not canonical
    }
  }
}

TEST(Lexicon, MissingDirectoryIsAnIoFailure) {
  EXPECT_THROW(ListPaths::from_directory("/nonexistent/toklab"), IoFailure);
}

TEST(Pos, ParsesNamesAndAbbreviations) {
  EXPECT_EQ(parse_pos("N"), PosTag::kNoun);
  EXPECT_EQ(parse_pos("adj."), PosTag::kAdjective);
  EXPECT_EQ(parse_pos("Conjunction"), PosTag::kConjunction);
  EXPECT_FALSE(parse_pos("det").has_value());
  const std::map<std::string, std::set<PosTag>> words = {
      {"run", {PosTag::kNoun, PosTag::kVerb}}, {"cat", {PosTag::kNoun}}};
  const auto dist = pos_distribution(words);
  EXPECT_EQ(dist.at(PosTag::kNoun), 2u);
  EXPECT_EQ(dist.at(PosTag::kVerb), 1u);
  const std::set<std::string> only_cat = {"cat"};
  EXPECT_EQ(pos_distribution(words, &only_cat).count(PosTag::kVerb), 0u);
}
