#include "toklab/utf8.hpp"

#include <gtest/gtest.h>

using namespace toklab;

TEST(Utf8, DecodesMultibyteScalars) {
  EXPECT_EQ(utf8::decode("a\xC3\xA9\xE4\xB8\xAD\xF0\x9F\x98\x80"),
            U"aé中\U0001F600");
  EXPECT_EQ(utf8::encode(U"aé中\U0001F600"),
            "a\xC3\xA9\xE4\xB8\xAD\xF0\x9F\x98\x80");
}

TEST(Utf8, RejectsOverlongSurrogateAndTruncated) {
  EXPECT_FALSE(utf8::is_valid("\xC0\xAF"));
  EXPECT_FALSE(utf8::is_valid("\xED\xA0\x80"));
  EXPECT_FALSE(utf8::is_valid("\xF4\x90\x80\x80"));
  EXPECT_FALSE(utf8::is_valid("\xE4\xB8"));
  try {
    utf8::decode("ab\xFF");
    FAIL();
  } catch (const utf8::InvalidUtf8& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(Utf8, LossyUsesOneReplacementPerMaximalSubpart) {
  // Same results as Python's bytes.decode("utf-8", "replace").
  EXPECT_EQ(utf8::decode_lossy("a\xE4\xB8z"), "a\xEF\xBF\xBDz");
  EXPECT_EQ(utf8::decode_lossy("\xF0\x80\x80"),
            "\xEF\xBF\xBD\xEF\xBF\xBD\xEF\xBF\xBD");
  EXPECT_EQ(utf8::decode_lossy("\xE0\xA0"), "\xEF\xBF\xBD");
}

TEST(Utf8, LengthCountsCodePoints) {
  EXPECT_EQ(utf8::length("h\xC3\xA9llo"), 5u);
  EXPECT_EQ(utf8::length("\xFF\xFE"), 2u);
}

TEST(Utf8, StripMatchesPythonWhitespace) {
  EXPECT_EQ(utf8::strip("  bank\n"), "bank");
  EXPECT_EQ(utf8::strip("\xE3\x80\x80x\xC2\xA0"), "x");  // U+3000, U+00A0
  EXPECT_EQ(utf8::strip("\xE2\x96\x81x"), "\xE2\x96\x81x");  // U+2581 is not space
  EXPECT_EQ(utf8::strip(" \t "), "");
}
