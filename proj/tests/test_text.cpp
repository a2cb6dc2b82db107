/*
 * Copyright 2026 The evdet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "evdet/text.hpp"

namespace evdet {
namespace {

using Tokens = std::vector<std::string>;

TEST(NormalizeTest, LowercasesAndComposes) {
  EXPECT_EQ(normalize_text("BOSTON Marathon"), "boston marathon");
  // "e" + combining acute composes to U+00E9.
  EXPECT_EQ(normalize_text("Sacudio\xCC\x81"), "sacudi\xC3\xB3");
  EXPECT_EQ(normalize_text("SACUDIÓ"), "sacudió");
}

TEST(NormalizeTest, InvalidUtf8IsReplaced) {
  const std::string out = normalize_text("ok\xFF");
  EXPECT_EQ(out, "ok\xEF\xBF\xBD");
}

TEST(TokenizeTest, KeepsHashtagsMentionsAndNonEnglishTerms) {
  const Stoplist empty;
  EXPECT_EQ(tokenize(normalize_text("#Indonesia tsunami, @USGS magnitud 8.6 sacudió!"), empty),
            (Tokens{"#indonesia", "tsunami", "@usgs", "magnitud", "sacudió"}));
}

TEST(TokenizeTest, DropsShortTokensAndBarePrefixes) {
  const Stoplist empty;
  EXPECT_EQ(tokenize("a # @ #x ab c #ok", empty), (Tokens{"ab", "#ok"}));
}

TEST(TokenizeTest, SplitsOnPunctuationAndKeepsDuplicates) {
  const Stoplist empty;
  EXPECT_EQ(tokenize("quake!quake...quake", empty), (Tokens{"quake", "quake", "quake"}));
}

TEST(TokenizeTest, StoplistIsApplied) {
  const Stoplist stop = Stoplist::from_text("# comment\nthe\n\nen\n");
  EXPECT_EQ(stop.size(), 2u);
  EXPECT_EQ(tokenize("the quake en turquia", stop), (Tokens{"quake", "turquia"}));
}

TEST(StoplistTest, BuiltinIsMultilingual) {
  const auto& stop = Stoplist::builtin();
  for (const char* word : {"the", "and", "de", "que", "il", "sono", "rt"}) {
    EXPECT_TRUE(stop.contains(word)) << word;
  }
  EXPECT_FALSE(stop.contains("earthquake"));
  EXPECT_FALSE(stop.contains("terremoto"));
}

TEST(CodePointTest, CountsScalarValues) {
  EXPECT_EQ(count_code_points(""), 0u);
  EXPECT_EQ(count_code_points("abc"), 3u);
  EXPECT_EQ(count_code_points("sacudió"), 7u);
  EXPECT_EQ(count_code_points("\xF0\x9F\x98\x80"), 1u);  // one emoji, four bytes
}

TEST(CodePointTest, TruncatesOnBoundaries) {
  std::string text = "ñññ";
  EXPECT_TRUE(truncate_code_points(text, 2));
  EXPECT_EQ(text, "ññ");
  EXPECT_FALSE(truncate_code_points(text, 2));
  std::string short_text = "abc";
  EXPECT_FALSE(truncate_code_points(short_text, 140));
  EXPECT_EQ(short_text, "abc");
}

TEST(TrimTest, StripsWhitespace) {
  EXPECT_EQ(trim("  a b \t\n"), "a b");
  EXPECT_EQ(trim(" \t "), "");
}

}  // namespace
}  // namespace evdet
